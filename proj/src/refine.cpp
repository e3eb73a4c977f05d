#include "burstalign/refine.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "burstalign/dpbm.hpp"
#include "burstalign/errors.hpp"
#include "burstalign/image_core.hpp"
#include "burstalign/parallel.hpp"

namespace burstalign {

namespace {

Plane green_plane(const BayerFrame& frame) {
  const RgbImage rgb = demosaic_bilinear(frame);
  Plane g(frame.width(), frame.height());
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) g.at(y, x) = rgb.at(y, x, static_cast<int>(Channel::Green));
  }
  return g;
}

// Window sums over [y - r, y + r] x [x - r, x + r] clipped to the frame, as a
// horizontal pass followed by a vertical pass. Direct summation keeps sums of
// exact zeros exactly zero.
Plane window_sum(const Plane& p, int r) {
  const int w = p.width();
  const int h = p.height();
  Plane horiz(w, h);
  parallel_for(0, h, [&](int y) {
    const auto row = p.row(y);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = std::max(0, x - r); i <= std::min(w - 1, x + r); ++i) acc += row[i];
      horiz.at(y, x) = acc;
    }
  });
  Plane out(w, h);
  parallel_for(0, h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int j = std::max(0, y - r); j <= std::min(h - 1, y + r); ++j) acc += horiz.at(j, x);
      out.at(y, x) = acc;
    }
  });
  return out;
}

int window_count(int y, int x, int w, int h, int r) {
  const int ny = std::min(h - 1, y + r) - std::max(0, y - r) + 1;
  const int nx = std::min(w - 1, x + r) - std::max(0, x - r) + 1;
  return ny * nx;
}

int gather_offset(double v) { return snap_even(static_cast<int>(std::lround(v))); }

}  // namespace

FlowField::FlowField(int width, int height)
    : dy(width, height), dx(width, height), confidence(width, height) {}

FlowField FlowField::identity(int width, int height) {
  FlowField f(width, height);
  for (double& c : f.confidence.data()) c = 1.0;
  return f;
}

void RefineConfig::validate() const {
  if (radius < 1 || radius > 4) throw ConfigError("refine radius D_s must lie in [1, 4], got " + std::to_string(radius));
  if (window_radius < 1) throw ConfigError("refine window radius must be >= 1");
  if (!(variance_eps > 0.0)) throw ConfigError("refine variance eps must be positive");
}

FlowField dense_refine(const BayerFrame& aligned, const BayerFrame& ref, const Plane& var_ref,
                       const RefineConfig& cfg) {
  cfg.validate();
  if (!aligned.samples.same_dims(ref.samples) || !var_ref.same_dims(ref.samples)) {
    throw DimensionError("dense_refine: frame size mismatch");
  }
  const int w = ref.width();
  const int h = ref.height();
  const Plane ref_g = green_plane(ref);
  const Plane tgt_g = green_plane(aligned);

  std::vector<Offset> offsets;
  for (int dy = -cfg.radius; dy <= cfg.radius; ++dy) {
    for (int dx = -cfg.radius; dx <= cfg.radius; ++dx) offsets.push_back({dy, dx});
  }

  std::vector<Plane> sad(offsets.size());
  std::vector<Plane> ssd(offsets.size());
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    Plane abs_diff(w, h);
    Plane sq_diff(w, h);
    const Offset o = offsets[k];
    parallel_for(0, h, [&](int y) {
      for (int x = 0; x < w; ++x) {
        const double d = ref_g.at(y, x) - tgt_g.at_reflect(y + o.dy, x + o.dx);
        abs_diff.at(y, x) = std::abs(d);
        sq_diff.at(y, x) = d * d;
      }
    });
    sad[k] = window_sum(abs_diff, cfg.window_radius);
    ssd[k] = window_sum(sq_diff, cfg.window_radius);
  }
  const Plane var_sum = window_sum(var_ref, cfg.window_radius);

  auto index_of = [&](Offset o) {
    return static_cast<std::size_t>((o.dy + cfg.radius) * (2 * cfg.radius + 1) + (o.dx + cfg.radius));
  };

  FlowField flow(w, h);
  parallel_for(0, h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < offsets.size(); ++k) {
        const double a = sad[k].at(y, x);
        const double b = sad[best].at(y, x);
        if (a < b || (a == b && offsets[k].squared_norm() < offsets[best].squared_norm())) best = k;
      }
      const Offset snapped{snap_even(offsets[best].dy), snap_even(offsets[best].dx)};
      const int n = window_count(y, x, w, h, cfg.window_radius);
      const double mean_var = var_sum.at(y, x) / n;
      const double residual = ssd[index_of(snapped)].at(y, x);
      flow.dy.at(y, x) = snapped.dy;
      flow.dx.at(y, x) = snapped.dx;
      flow.confidence.at(y, x) = std::exp(-residual / (n * (2.0 * mean_var + cfg.variance_eps)));
    }
  });
  return flow;
}

Plane warp_plane(const Plane& src, const FlowField& flow) {
  if (!src.same_dims(flow.dy)) throw DimensionError("warp: flow size mismatch");
  Plane out(src.width(), src.height());
  parallel_for(0, src.height(), [&](int y) {
    for (int x = 0; x < src.width(); ++x) {
      const int sy = reflect_index(y + gather_offset(flow.dy.at(y, x)), src.height());
      const int sx = reflect_index(x + gather_offset(flow.dx.at(y, x)), src.width());
      out.at(y, x) = src.at(sy, sx);
    }
  });
  return out;
}

BayerFrame warp(const BayerFrame& frame, const FlowField& flow) {
  return BayerFrame(warp_plane(frame.samples, flow), frame.pattern);
}

}  // namespace burstalign
