#include "burstalign/image_core.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "burstalign/errors.hpp"
#include "burstalign/parallel.hpp"

namespace burstalign {

namespace {

void require_even(int width, int height, const char* what) {
  if (width < 2 || height < 2 || width % 2 != 0 || height % 2 != 0) {
    throw DimensionError(std::string(what) + ": dimensions must be even and >= 2, got " + std::to_string(width) +
                         "x" + std::to_string(height));
  }
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over a combined key.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

BayerFrame mosaic(const RgbImage& rgb, BayerPattern pattern) {
  require_even(rgb.width(), rgb.height(), "mosaic");
  if (!rgb.in_unit_range()) throw ParameterError("mosaic: RGB samples must be finite and in [0, 1]");
  Plane out(rgb.width(), rgb.height());
  for (int y = 0; y < rgb.height(); ++y) {
    for (int x = 0; x < rgb.width(); ++x) {
      out.at(y, x) = rgb.at(y, x, static_cast<int>(pattern_color(pattern, y, x)));
    }
  }
  return BayerFrame(std::move(out), pattern);
}

RgbImage demosaic_bilinear(const BayerFrame& bayer) {
  require_even(bayer.width(), bayer.height(), "demosaic_bilinear");
  const Plane& s = bayer.samples;
  RgbImage out(bayer.width(), bayer.height());
  parallel_for(0, bayer.height(), [&](int y) {
    for (int x = 0; x < bayer.width(); ++x) {
      const auto here = static_cast<int>(bayer.color_at(y, x));
      const double cross = 0.25 * (s.at_reflect(y - 1, x) + s.at_reflect(y + 1, x) + s.at_reflect(y, x - 1) +
                                   s.at_reflect(y, x + 1));
      out.at(y, x, here) = s.at(y, x);
      if (here == static_cast<int>(Channel::Green)) {
        const auto horiz = static_cast<int>(bayer.color_at(y, x + 1));
        const auto vert = static_cast<int>(bayer.color_at(y + 1, x));
        out.at(y, x, horiz) = 0.5 * (s.at_reflect(y, x - 1) + s.at_reflect(y, x + 1));
        out.at(y, x, vert) = 0.5 * (s.at_reflect(y - 1, x) + s.at_reflect(y + 1, x));
      } else {
        const int other = 2 - here;
        out.at(y, x, static_cast<int>(Channel::Green)) = cross;
        out.at(y, x, other) = 0.25 * (s.at_reflect(y - 1, x - 1) + s.at_reflect(y - 1, x + 1) +
                                      s.at_reflect(y + 1, x - 1) + s.at_reflect(y + 1, x + 1));
      }
    }
  });
  return out;
}

BayerFrame add_noise(const BayerFrame& clean, const NoiseParams& np, std::uint64_t seed) {
  np.validate();
  for (double v : clean.samples.data()) {
    if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("add_noise: clean samples must lie in [0, 1]");
  }
  BayerFrame out = clean;
  if (np.sigma_s == 0.0 && np.sigma_r == 0.0) return out;
  parallel_for(0, clean.height(), [&](int y) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(y)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto dst = out.samples.row(y);
    const auto src = clean.samples.row(y);
    for (std::size_t x = 0; x < dst.size(); ++x) {
      dst[x] = src[x] + std::sqrt(np.variance_at(src[x])) * gauss(rng);
    }
  });
  return out;
}

Plane variance_map(const BayerFrame& noisy, const NoiseParams& np) {
  np.validate();
  Plane m(noisy.width(), noisy.height());
  const auto src = noisy.samples.data();
  auto dst = m.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = np.variance_at(std::max(src[i], 0.0));
  return m;
}

Plane downsample_quarter(const Plane& frame) {
  if (frame.width() % 4 != 0 || frame.height() % 4 != 0 || frame.empty()) {
    throw DimensionError("downsample_quarter: dimensions must be positive multiples of 4, got " +
                         std::to_string(frame.width()) + "x" + std::to_string(frame.height()));
  }
  Plane out(frame.width() / 4, frame.height() / 4);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      double sum = 0.0;
      for (int dy = 0; dy < 4; ++dy) {
        for (int dx = 0; dx < 4; ++dx) sum += frame.at(4 * y + dy, 4 * x + dx);
      }
      out.at(y, x) = sum / 16.0;
    }
  }
  return out;
}

Plane pad_reflect(const Plane& p, int width, int height) {
  if (width < p.width() || height < p.height()) throw DimensionError("pad_reflect: target smaller than source");
  Plane out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) out.at(y, x) = p.at_reflect(y, x);
  }
  return out;
}

Plane quarter_scale_luma(const BayerFrame& frame) {
  const int w = (frame.width() + 3) / 4 * 4;
  const int h = (frame.height() + 3) / 4 * 4;
  if (w == frame.width() && h == frame.height()) return downsample_quarter(frame.samples);
  return downsample_quarter(pad_reflect(frame.samples, w, h));
}

void IspConfig::validate() const {
  for (double g : wb_gains) {
    if (!(g > 0.0)) throw ParameterError("isp: white-balance gains must be positive");
  }
  for (const auto& row : ccm) {
    if (std::abs(row[0] + row[1] + row[2] - 1.0) > 1e-9) {
      throw ParameterError("isp: colour-correction rows must sum to 1");
    }
  }
  if (!(gamma > 0.0)) throw ParameterError("isp: gamma exponent must be positive");
}

RgbImage isp_gamma(const RgbImage& x, const IspConfig& isp) {
  isp.validate();
  RgbImage out(x.width(), x.height());
  for (int y = 0; y < x.height(); ++y) {
    for (int c = 0; c < x.width(); ++c) {
      std::array<double, 3> balanced{};
      for (int k = 0; k < 3; ++k) balanced[k] = isp.wb_gains[k] * x.at(y, c, k);
      for (int k = 0; k < 3; ++k) {
        const double v = isp.ccm[k][0] * balanced[0] + isp.ccm[k][1] * balanced[1] + isp.ccm[k][2] * balanced[2];
        out.at(y, c, k) = std::pow(std::clamp(v, 0.0, 1.0), isp.gamma);
      }
    }
  }
  return out;
}

double gamma_compress(double v) { return std::pow(std::clamp(v, 0.0, 1.0), kDisplayGamma); }

RgbImage clip_unit(const RgbImage& x) {
  RgbImage out = x;
  for (double& v : out.data()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

RgbImage translate(const RgbImage& x, Offset shift) {
  RgbImage out(x.width(), x.height());
  for (int y = 0; y < x.height(); ++y) {
    const int sy = reflect_index(y - shift.dy, x.height());
    for (int c = 0; c < x.width(); ++c) {
      const int sx = reflect_index(c - shift.dx, x.width());
      for (int k = 0; k < 3; ++k) out.at(y, c, k) = x.at(sy, sx, k);
    }
  }
  return out;
}

Plane gaussian_blur(const Plane& p, double sigma) {
  if (!(sigma > 0.0)) return p;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double norm = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    norm += kernel[i + radius];
  }
  for (double& k : kernel) k /= norm;

  Plane tmp(p.width(), p.height());
  for (int y = 0; y < p.height(); ++y) {
    for (int x = 0; x < p.width(); ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * p.at_reflect(y, x + i);
      tmp.at(y, x) = acc;
    }
  }
  Plane out(p.width(), p.height());
  for (int y = 0; y < p.height(); ++y) {
    for (int x = 0; x < p.width(); ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * tmp.at_reflect(y + i, x);
      out.at(y, x) = acc;
    }
  }
  return out;
}

namespace {

Plane noise_plane(int width, int height, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Plane p(width, height);
  for (double& v : p.data()) v = u(rng);
  return p;
}

// Rescales to zero mean and unit peak magnitude.
void normalize_peak(Plane& p) {
  double mean = 0.0;
  for (double v : p.data()) mean += v;
  mean /= static_cast<double>(p.size());
  double peak = 1e-12;
  for (double v : p.data()) peak = std::max(peak, std::abs(v - mean));
  for (double& v : p.data()) v = (v - mean) / peak;
}

}  // namespace

RgbImage synthetic_scene(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, 0x5CE7E));
  Plane luma(width, height);
  const double scales[] = {12.0, 5.0, 2.0};
  const double amps[] = {0.6, 0.3, 0.1};
  for (int i = 0; i < 3; ++i) {
    Plane octave = gaussian_blur(noise_plane(width, height, rng), scales[i]);
    normalize_peak(octave);
    for (std::size_t k = 0; k < luma.size(); ++k) luma.data()[k] += amps[i] * octave.data()[k];
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int blobs = 6;
  for (int b = 0; b < blobs; ++b) {
    const double cy = unit(rng) * height;
    const double cx = unit(rng) * width;
    const double r = (0.05 + 0.1 * unit(rng)) * std::min(width, height);
    const double level = unit(rng) < 0.5 ? -0.5 : 0.5;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double d = std::hypot(y - cy, x - cx);
        const double edge = 0.5 * (1.0 - std::tanh((d - r) / 1.5));
        luma.at(y, x) += level * edge;
      }
    }
  }

  RgbImage out(width, height);
  std::array<Plane, 3> tint;
  for (auto& t : tint) {
    t = gaussian_blur(noise_plane(width, height, rng), 16.0);
    normalize_peak(t);
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double l = 0.45 + 0.3 * luma.at(y, x);
      for (int k = 0; k < 3; ++k) {
        out.at(y, x, k) = std::clamp(l * (1.0 + 0.25 * tint[k].at(y, x)), 0.02, 0.98);
      }
    }
  }
  return out;
}

}  // namespace burstalign
