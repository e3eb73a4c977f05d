#pragma once

#include <array>
#include <cstdint>

#include "burstalign/types.hpp"

namespace burstalign {

// Samples the channel selected by `pattern` at every pixel.
BayerFrame mosaic(const RgbImage& rgb, BayerPattern pattern);

// Bilinear CFA interpolation. Known samples pass through; missing channels
// are the mean of the nearest same-colour neighbours (2 or 4 of them), with
// reflect-101 padding at the borders. No clipping.
RgbImage demosaic_bilinear(const BayerFrame& bayer);

// clean + N(0, sigma_s * clean + sigma_r^2), unclipped. Each row draws from
// its own stream derived from (seed, row), so the result is independent of
// the thread count.
BayerFrame add_noise(const BayerFrame& clean, const NoiseParams& np, std::uint64_t seed);

// Per-pixel noise variance sigma_s * max(y, 0) + sigma_r^2.
Plane variance_map(const BayerFrame& noisy, const NoiseParams& np);

// 4x4 box mean. Dimensions must be multiples of 4.
Plane downsample_quarter(const Plane& frame);

// Extends `p` to (width, height) by reflect-101 padding on the right/bottom.
Plane pad_reflect(const Plane& p, int width, int height);

// Pads to the next multiple of 4 and box-downsamples: the 1/4-scale plane the
// coarse matcher runs on.
Plane quarter_scale_luma(const BayerFrame& frame);

struct IspConfig {
  std::array<double, 3> wb_gains{1.0, 1.0, 1.0};
  std::array<std::array<double, 3>, 3> ccm{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
  double gamma = 1.0 / 2.2;

  // Gains must be positive, ccm rows must sum to one.
  void validate() const;
};

// White balance, colour correction, clip to [0, 1], then v^gamma.
RgbImage isp_gamma(const RgbImage& x, const IspConfig& isp = {});

inline constexpr double kDisplayGamma = 1.0 / 2.2;
// v^(1/2.2) after clamping to [0, 1].
double gamma_compress(double v);

RgbImage clip_unit(const RgbImage& x);

// Moves the content by +shift: out(y, x) = in(y - dy, x - dx), reflect-101
// outside the frame.
RgbImage translate(const RgbImage& x, Offset shift);

// Separable gaussian blur with reflect-101 borders.
Plane gaussian_blur(const Plane& p, double sigma);

// Procedural linear-light test scene: multi-scale smooth texture with a few
// soft-edged blobs, values inside [0.02, 0.98].
RgbImage synthetic_scene(int width, int height, std::uint64_t seed);

// Stateless 64-bit mixer used to derive independent RNG streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace burstalign
