#include "burstalign/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "burstalign/errors.hpp"
#include "burstalign/image_core.hpp"

namespace burstalign {

namespace {

std::vector<double> gaussian_window(int size, double sigma) {
  std::vector<double> k(size);
  const double c = (size - 1) / 2.0;
  double norm = 0.0;
  for (int i = 0; i < size; ++i) {
    k[i] = std::exp(-0.5 * (i - c) * (i - c) / (sigma * sigma));
    norm += k[i];
  }
  for (double& v : k) v /= norm;
  return k;
}

// Separable 'valid' correlation: output is (w - n + 1) x (h - n + 1).
Plane filter_valid(const Plane& p, const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int ow = p.width() - n + 1;
  const int oh = p.height() - n + 1;
  Plane horiz(ow, p.height());
  for (int y = 0; y < p.height(); ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += k[i] * p.at(y, x + i);
      horiz.at(y, x) = acc;
    }
  }
  Plane out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += k[i] * horiz.at(y + i, x);
      out.at(y, x) = acc;
    }
  }
  return out;
}

Plane channel(const RgbImage& x, int c) {
  Plane p(x.width(), x.height());
  for (int y = 0; y < x.height(); ++y) {
    for (int i = 0; i < x.width(); ++i) p.at(y, i) = x.at(y, i, c);
  }
  return p;
}

Plane product(const Plane& a, const Plane& b) {
  Plane out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
  return out;
}

}  // namespace

RgbImage gamma_image(const RgbImage& x) {
  RgbImage out = x;
  for (double& v : out.data()) v = gamma_compress(v);
  return out;
}

double psnr(const RgbImage& a, const RgbImage& b) {
  if (!a.same_dims(b)) throw DimensionError("psnr: image size mismatch");
  double se = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    se += d * d;
  }
  if (se == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = se / static_cast<double>(a.data().size());
  return 10.0 * std::log10(1.0 / mse);
}

double psnr_gamma(const RgbImage& a, const RgbImage& b) { return psnr(gamma_image(a), gamma_image(b)); }

double ssim(const RgbImage& a, const RgbImage& b, const SsimParams& params) {
  if (!a.same_dims(b)) throw DimensionError("ssim: image size mismatch");
  if (a.width() < params.window || a.height() < params.window) {
    throw DimensionError("ssim: image smaller than the SSIM window");
  }
  const auto k = gaussian_window(params.window, params.sigma);
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    const Plane pa = channel(a, c);
    const Plane pb = channel(b, c);
    const Plane mu_a = filter_valid(pa, k);
    const Plane mu_b = filter_valid(pb, k);
    const Plane e_aa = filter_valid(product(pa, pa), k);
    const Plane e_bb = filter_valid(product(pb, pb), k);
    const Plane e_ab = filter_valid(product(pa, pb), k);
    double acc = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
      const double ma = mu_a.data()[i];
      const double mb = mu_b.data()[i];
      const double var_a = e_aa.data()[i] - ma * ma;
      const double var_b = e_bb.data()[i] - mb * mb;
      const double cov = e_ab.data()[i] - ma * mb;
      const double num = (2.0 * ma * mb + params.c1) * (2.0 * cov + params.c2);
      const double den = (ma * ma + mb * mb + params.c1) * (var_a + var_b + params.c2);
      acc += num / den;
    }
    total += acc / static_cast<double>(mu_a.size());
  }
  return total / 3.0;
}

double ssim_gamma(const RgbImage& a, const RgbImage& b, const SsimParams& params) {
  return ssim(gamma_image(a), gamma_image(b), params);
}

}  // namespace burstalign
