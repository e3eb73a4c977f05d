#include "burstalign/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "burstalign/errors.hpp"

namespace burstalign {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DimensionError(std::string(what) + ": length mismatch");
}

}  // namespace

void LossWeights::validate() const {
  if (!(beta >= 0.0 && rho >= 0.0 && eta >= 0.0)) throw ParameterError("loss weights must be nonnegative");
  if (!(epsilon > 0.0)) throw ParameterError("Charbonnier epsilon must be positive");
}

double mean_square(std::span<const double> w) {
  if (w.empty()) throw ParameterError("mean_square: empty vector");
  double sq = 0.0;
  for (double v : w) sq += v * v;
  return sq / static_cast<double>(w.size());
}

double l_one_hot(std::span<const double> w) {
  const double m = static_cast<double>(w.size());
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  return std::abs(sum - 1.0) + std::abs(mean_square(w) - 1.0 / m);
}

std::vector<double> l_one_hot_grad(std::span<const double> w) {
  const double m = static_cast<double>(w.size());
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  const double s_sum = sign(sum - 1.0);
  const double s_msq = sign(mean_square(w) - 1.0 / m);
  std::vector<double> g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) g[i] = s_sum + s_msq * 2.0 * w[i] / m;
  return g;
}

double l_bm(std::span<const double> d_noisy, std::span<const double> d_clean) {
  require_same_length(d_noisy.size(), d_clean.size(), "l_bm");
  double acc = 0.0;
  for (std::size_t i = 0; i < d_noisy.size(); ++i) {
    const double r = d_noisy[i] - d_clean[i];
    acc += r * r;
  }
  return acc;
}

std::vector<double> l_bm_grad(std::span<const double> d_noisy, std::span<const double> d_clean) {
  require_same_length(d_noisy.size(), d_clean.size(), "l_bm_grad");
  std::vector<double> g(d_noisy.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 2.0 * (d_noisy[i] - d_clean[i]);
  return g;
}

double charbonnier(std::span<const double> a, std::span<const double> b, double eps) {
  require_same_length(a.size(), b.size(), "charbonnier");
  if (a.empty()) throw DimensionError("charbonnier: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double r = a[i] - b[i];
    acc += std::sqrt(r * r + eps * eps);
  }
  return acc / static_cast<double>(a.size());
}

double charbonnier(const RgbImage& a, const RgbImage& b, double eps) {
  if (!a.same_dims(b)) throw DimensionError("charbonnier: image size mismatch");
  return charbonnier(a.data(), b.data(), eps);
}

std::vector<double> charbonnier_grad(std::span<const double> a, std::span<const double> b, double eps) {
  require_same_length(a.size(), b.size(), "charbonnier_grad");
  const double n = static_cast<double>(a.size());
  std::vector<double> g(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double r = a[i] - b[i];
    g[i] = r / (n * std::sqrt(r * r + eps * eps));
  }
  return g;
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

double l_ip(const RgbImage& x_interp, const RgbImage& x, const Mask& mask, double eps) {
  if (!x_interp.same_dims(x) || mask.width != x.width() || mask.height != x.height()) {
    throw DimensionError("l_ip: size mismatch");
  }
  double acc = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < x.height(); ++y) {
    for (int c = 0; c < x.width(); ++c) {
      if (!mask.at(y, c)) continue;
      for (int k = 0; k < 3; ++k) {
        const double r = x_interp.at(y, c, k) - x.at(y, c, k);
        acc += std::sqrt(r * r + eps * eps);
        ++n;
      }
    }
  }
  return n == 0 ? 0.0 : acc / static_cast<double>(n);
}

Plane luma(const RgbImage& x) {
  Plane l(x.width(), x.height());
  for (int y = 0; y < x.height(); ++y) {
    for (int c = 0; c < x.width(); ++c) {
      l.at(y, c) = 0.2126 * x.at(y, c, 0) + 0.7152 * x.at(y, c, 1) + 0.0722 * x.at(y, c, 2);
    }
  }
  return l;
}

Plane gradient_magnitude(const RgbImage& x) {
  const Plane l = luma(x);
  Plane g(x.width(), x.height());
  for (int y = 0; y < l.height(); ++y) {
    for (int c = 0; c < l.width(); ++c) {
      const double gx = 0.5 * (l.at_reflect(y, c + 1) - l.at_reflect(y, c - 1));
      const double gy = 0.5 * (l.at_reflect(y + 1, c) - l.at_reflect(y - 1, c));
      g.at(y, c) = std::hypot(gx, gy);
    }
  }
  return g;
}

double gradient_percentile(const RgbImage& x, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("percentile must lie in [0, 1]");
  const Plane g = gradient_magnitude(x);
  std::vector<double> v(g.data().begin(), g.data().end());
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[rank == 0 ? 0 : rank - 1];
}

Mask high_freq_mask(const RgbImage& x, double threshold) {
  const Plane g = gradient_magnitude(x);
  Mask m{x.width(), x.height(), std::vector<std::uint8_t>(g.size(), 0)};
  for (std::size_t i = 0; i < g.size(); ++i) m.bits[i] = g.data()[i] > threshold ? 1 : 0;
  return m;
}

Mask high_freq_mask(const RgbImage& x) { return high_freq_mask(x, gradient_percentile(x, kHighFreqPercentile)); }

double l_r(const RgbImage& x_hat, const RgbImage& x, const IspConfig& isp, double eps) {
  return charbonnier(x_hat, x, eps) + charbonnier(isp_gamma(x_hat, isp), isp_gamma(x, isp), eps);
}

double total_loss(const LossParts& parts, const LossWeights& weights, bool enable_bm) {
  weights.validate();
  double loss = parts.reconstruction + weights.beta * parts.interpolation + weights.rho * parts.one_hot;
  if (enable_bm) loss += weights.eta * parts.block_matching;
  return loss;
}

double temperature_at(long iter, long total) {
  if (total <= 0 || iter >= total) return kFinalTemperature;
  if (iter <= 0) return kInitialTemperature;
  const double frac = static_cast<double>(iter) / static_cast<double>(total);
  return std::pow(10.0, std::log10(kInitialTemperature) +
                            frac * (std::log10(kFinalTemperature) - std::log10(kInitialTemperature)));
}

}  // namespace burstalign
