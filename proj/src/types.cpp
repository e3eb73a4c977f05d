#include "burstalign/types.hpp"

#include <cmath>

#include "burstalign/errors.hpp"

namespace burstalign {

int reflect_index(int i, int n) {
  if (n <= 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

Plane::Plane(int width, int height, double fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw DimensionError("negative plane dimensions");
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

RgbImage::RgbImage(int width, int height, double fill) : width_(width), height_(height) {
  if (width < 2 || height < 2 || width % 2 != 0 || height % 2 != 0) {
    throw DimensionError("RGB image dimensions must be even and >= 2, got " + std::to_string(width) + "x" +
                         std::to_string(height));
  }
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3, fill);
}

bool RgbImage::in_unit_range() const {
  for (double v : data_) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) return false;
  }
  return true;
}

BayerPattern parse_pattern(std::string_view name) {
  if (name == "RGGB" || name == "rggb") return BayerPattern::RGGB;
  if (name == "BGGR" || name == "bggr") return BayerPattern::BGGR;
  if (name == "GRBG" || name == "grbg") return BayerPattern::GRBG;
  if (name == "GBRG" || name == "gbrg") return BayerPattern::GBRG;
  throw ParameterError("unknown Bayer pattern '" + std::string(name) + "'");
}

std::string to_string(BayerPattern p) {
  switch (p) {
    case BayerPattern::RGGB: return "RGGB";
    case BayerPattern::BGGR: return "BGGR";
    case BayerPattern::GRBG: return "GRBG";
    case BayerPattern::GBRG: return "GBRG";
  }
  return "RGGB";
}

Channel pattern_color(BayerPattern p, int y, int x) {
  const bool odd_row = (y & 1) != 0;
  const bool odd_col = (x & 1) != 0;
  if (odd_row != odd_col) {
    // GRBG / GBRG put green on the even diagonal instead.
    if (p == BayerPattern::RGGB || p == BayerPattern::BGGR) return Channel::Green;
    const bool red_row = (p == BayerPattern::GRBG) ? !odd_row : odd_row;
    return red_row ? Channel::Red : Channel::Blue;
  }
  if (p == BayerPattern::GRBG || p == BayerPattern::GBRG) return Channel::Green;
  const bool red_first = (p == BayerPattern::RGGB);
  return (!odd_row == red_first) ? Channel::Red : Channel::Blue;
}

BayerFrame::BayerFrame(Plane s, BayerPattern p) : samples(std::move(s)), pattern(p) {}

NoiseParams NoiseParams::preset(std::string_view name) {
  if (name == "low") return low();
  if (name == "high") return high();
  throw ParameterError("unknown noise preset '" + std::string(name) + "' (expected low or high)");
}

void NoiseParams::validate() const {
  if (!(sigma_s >= 0.0) || !(sigma_r >= 0.0)) {
    throw ParameterError("noise scales must be nonnegative");
  }
}

double NoiseParams::variance_at(double signal) const { return sigma_s * signal + sigma_r * sigma_r; }

void Burst::validate() const {
  if (frames.size() < 2) throw DimensionError("a burst needs at least two frames");
  if (ref_index >= frames.size()) throw ParameterError("reference index out of range");
  if (variance_maps.size() != frames.size()) throw DimensionError("one variance map per frame required");
  const auto& first = frames.front();
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (!frames[t].samples.same_dims(first.samples) || frames[t].pattern != first.pattern) {
      throw DimensionError("burst frames must share dimensions and pattern");
    }
    if (!variance_maps[t].same_dims(first.samples)) throw DimensionError("variance map size mismatch");
    for (double v : variance_maps[t].data()) {
      if (!(v >= 0.0)) throw ParameterError("variance maps must be nonnegative");
    }
  }
}

}  // namespace burstalign
