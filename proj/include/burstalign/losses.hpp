#pragma once

#include <span>
#include <vector>

#include "burstalign/image_core.hpp"
#include "burstalign/types.hpp"

namespace burstalign {

struct LossWeights {
  double beta = 1.0;     // interpolation loss
  double rho = 1e5;      // one-hot penalty
  double eta = 1e3;      // clean-guided matching loss
  double epsilon = 1e-3; // Charbonnier constant

  void validate() const;
};

struct LossParts {
  double reconstruction = 0.0;  // L_r
  double interpolation = 0.0;   // L_ip
  double one_hot = 0.0;         // L_one-hot
  double block_matching = 0.0;  // L_BM
};

// Mean of squares (sum w_i^2) / M; a one-hot vector gives exactly 1 / M.
double mean_square(std::span<const double> w);

// |sum(w) - 1| + |mean_square(w) - 1/M|.
double l_one_hot(std::span<const double> w);
// Subgradient; sign(0) is taken as 0.
std::vector<double> l_one_hot_grad(std::span<const double> w);

// ||d_noisy - d_clean||^2.
double l_bm(std::span<const double> d_noisy, std::span<const double> d_clean);
// Gradient with respect to d_noisy.
std::vector<double> l_bm_grad(std::span<const double> d_noisy, std::span<const double> d_clean);

// mean_i sqrt((a_i - b_i)^2 + eps^2).
double charbonnier(std::span<const double> a, std::span<const double> b, double eps = 1e-3);
double charbonnier(const RgbImage& a, const RgbImage& b, double eps = 1e-3);
// Gradient with respect to a.
std::vector<double> charbonnier_grad(std::span<const double> a, std::span<const double> b, double eps = 1e-3);

// Binary per-pixel mask (1 / 0), row-major.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  std::uint8_t at(int y, int x) const { return bits[static_cast<std::size_t>(y) * width + x]; }
  std::size_t count() const;
};

// Charbonnier penalty averaged over every channel of the masked pixels; 0 for
// an empty mask.
double l_ip(const RgbImage& x_interp, const RgbImage& x, const Mask& mask, double eps = 1e-3);

// Rec. 709 luma of a linear RGB image.
Plane luma(const RgbImage& x);
// Central-difference luma gradient magnitude, reflect-101 borders.
Plane gradient_magnitude(const RgbImage& x);
// Nearest-rank percentile (q in [0, 1]) of the gradient magnitudes.
double gradient_percentile(const RgbImage& x, double q);

inline constexpr double kHighFreqPercentile = 0.75;
// 1 where the luma gradient magnitude strictly exceeds `threshold`.
Mask high_freq_mask(const RgbImage& x, double threshold);
// Threshold defaults to the 75th percentile of the image's magnitudes.
Mask high_freq_mask(const RgbImage& x);

// charbonnier(x_hat, x) + charbonnier(isp(x_hat), isp(x)).
double l_r(const RgbImage& x_hat, const RgbImage& x, const IspConfig& isp = {}, double eps = 1e-3);

// L_r + beta L_ip + rho L_one-hot + eta L_BM. With enable_bm = false the
// matching term is dropped (it only guides early training).
double total_loss(const LossParts& parts, const LossWeights& weights = {}, bool enable_bm = true);

inline constexpr double kInitialTemperature = 1e-2;
inline constexpr double kFinalTemperature = 1e-3;
// Log-linear anneal from 1e-2 at iter 0 to 1e-3 at iter >= total.
double temperature_at(long iter, long total);

}  // namespace burstalign
