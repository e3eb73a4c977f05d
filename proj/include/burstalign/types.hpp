#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace burstalign {

// Integer displacement, row component first.
struct Offset {
  int dy = 0;
  int dx = 0;

  friend bool operator==(const Offset&, const Offset&) = default;
  Offset operator+(const Offset& o) const { return {dy + o.dy, dx + o.dx}; }
  Offset operator-(const Offset& o) const { return {dy - o.dy, dx - o.dx}; }
  int squared_norm() const { return dy * dy + dx * dx; }
};

// Mirror index into [0, n) without repeating the edge sample
// (-1 -> 1, n -> n - 2). Preserves index parity when n is even, which keeps
// the Bayer phase intact under reflective padding.
int reflect_index(int i, int n);

// Single-channel row-major grid of doubles.
class Plane {
 public:
  Plane() = default;
  Plane(int width, int height, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int y, int x) { return data_[index(y, x)]; }
  double at(int y, int x) const { return data_[index(y, x)]; }
  double at_reflect(int y, int x) const {
    return data_[index(reflect_index(y, height_), reflect_index(x, width_))];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> row(int y) {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }
  std::span<const double> row(int y) const {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }

  bool same_dims(const Plane& o) const { return width_ == o.width_ && height_ == o.height_; }
  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  std::size_t index(int y, int x) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

enum class Channel { Red = 0, Green = 1, Blue = 2 };

// Linear-light three channel image, channels interleaved per pixel.
// Width and height must be even and >= 2 so that a full Bayer quad tiling
// exists.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }

  double& at(int y, int x, int c) { return data_[index(y, x, c)]; }
  double at(int y, int x, int c) const { return data_[index(y, x, c)]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool same_dims(const RgbImage& o) const { return width_ == o.width_ && height_ == o.height_; }
  // All samples finite and within [0, 1].
  bool in_unit_range() const;
  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3 +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

enum class BayerPattern { RGGB, BGGR, GRBG, GBRG };

BayerPattern parse_pattern(std::string_view name);
std::string to_string(BayerPattern p);
// Colour recorded at (y, x) under the given pattern; depends on parity only.
Channel pattern_color(BayerPattern p, int y, int x);

// CFA mosaic. Noisy frames are stored unclipped, so samples may leave [0, 1].
struct BayerFrame {
  Plane samples;
  BayerPattern pattern = BayerPattern::RGGB;

  BayerFrame() = default;
  BayerFrame(Plane s, BayerPattern p);

  int width() const { return samples.width(); }
  int height() const { return samples.height(); }
  Channel color_at(int y, int x) const { return pattern_color(pattern, y, x); }
  friend bool operator==(const BayerFrame&, const BayerFrame&) = default;
};

// Heteroscedastic raw noise: variance sigma_s * x + sigma_r^2.
struct NoiseParams {
  double sigma_s = 0.0;
  double sigma_r = 0.0;

  static NoiseParams low() { return {2.5e-3, 1e-2}; }
  static NoiseParams high() { return {6.4e-3, 2e-2}; }
  static NoiseParams preset(std::string_view name);

  // Throws ParameterError on negative scales.
  void validate() const;
  double variance_at(double signal) const;
};

struct Burst {
  std::vector<BayerFrame> frames;
  std::vector<Plane> variance_maps;
  std::size_t ref_index = 0;

  std::size_t size() const { return frames.size(); }
  const BayerFrame& reference() const { return frames.at(ref_index); }
  // Throws DimensionError / ParameterError when the burst invariants fail.
  void validate() const;
};

}  // namespace burstalign
