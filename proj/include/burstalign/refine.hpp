#pragma once

#include "burstalign/types.hpp"

namespace burstalign {

// Dense full-resolution displacement: aligned(p) is taken from
// frame(p + (dy(p), dx(p))). Confidence lies in [0, 1].
struct FlowField {
  Plane dy;
  Plane dx;
  Plane confidence;

  FlowField() = default;
  FlowField(int width, int height);

  int width() const { return dy.width(); }
  int height() const { return dy.height(); }
  // Zero displacement, confidence 1.
  static FlowField identity(int width, int height);
};

struct RefineConfig {
  int radius = 2;         // D_s, full-resolution pixels, in [1, 4]
  int window_radius = 8;  // matching window is (2w + 1)^2
  double variance_eps = 1e-8;

  void validate() const;
};

// Per-pixel exhaustive integer search in [-radius, radius]^2 minimising the
// windowed SAD between the demosaiced green planes. The winner is snapped to
// even parity; confidence = exp(-SSD / (n * (2 * var + eps))) where SSD is the
// windowed squared difference at the snapped offset, n the window pixel count
// and var the windowed mean of var_ref.
FlowField dense_refine(const BayerFrame& aligned, const BayerFrame& ref, const Plane& var_ref,
                       const RefineConfig& cfg = {});

// Integer gather with reflect-101 padding. Flow values are rounded and
// snapped to even parity, so the CFA phase at every pixel is preserved.
Plane warp_plane(const Plane& src, const FlowField& flow);
BayerFrame warp(const BayerFrame& frame, const FlowField& flow);

}  // namespace burstalign
