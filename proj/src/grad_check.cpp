#include "burstalign/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "burstalign/image_core.hpp"
#include "burstalign/losses.hpp"
#include "burstalign/matching.hpp"

namespace burstalign {

namespace {

constexpr double kJacobianTolerance = 1e-5;
constexpr double kLossTolerance = 1e-6;
constexpr double kJacobianFloor = 1e-3;
constexpr double kLossFloor = 1e-8;

// Random distance vector: even cases spread over [0, 1], odd cases packed
// within a few temperatures so the softmax is far from one-hot.
std::vector<double> random_distances(std::mt19937_64& rng, std::size_t idx, double temperature) {
  std::uniform_int_distribution<int> size(2, 16);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> d(static_cast<std::size_t>(size(rng)));
  const double spread = (idx % 2 == 0) ? 1.0 : 8.0 * temperature;
  for (double& v : d) v = spread * u(rng);
  return d;
}

GradCheckRow jacobian_suite(std::mt19937_64& rng, std::size_t cases, double temperature) {
  GradCheckRow row{"soft_weights_jacobian T=" + std::string(temperature == 1e-2 ? "1e-2" : "1e-3"), cases, 0.0,
                   kJacobianTolerance, false};
  const double h = 1e-6;
  for (std::size_t c = 0; c < cases; ++c) {
    auto d = random_distances(rng, c, temperature);
    const std::size_t m = d.size();
    const auto jac = soft_weights_jacobian(d, temperature);
    for (std::size_t j = 0; j < m; ++j) {
      const double saved = d[j];
      d[j] = saved + h;
      const auto wp = soft_weights(d, temperature);
      d[j] = saved - h;
      const auto wm = soft_weights(d, temperature);
      d[j] = saved;
      for (std::size_t i = 0; i < m; ++i) {
        const double numeric = (wp[i] - wm[i]) / (2.0 * h);
        row.max_rel_error = std::max(row.max_rel_error, relative_error(jac[i * m + j], numeric, kJacobianFloor));
      }
    }
  }
  row.pass = row.max_rel_error < row.tolerance;
  return row;
}

template <typename Loss, typename Grad>
void check_gradient(std::vector<double>& x, Loss loss, Grad grad, double h, GradCheckRow& row) {
  const auto g = grad(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double fp = loss(x);
    x[i] = saved - h;
    const double fm = loss(x);
    x[i] = saved;
    row.max_rel_error = std::max(row.max_rel_error, relative_error(g[i], (fp - fm) / (2.0 * h), kLossFloor));
  }
}

}  // namespace

double relative_error(double analytic, double numeric, double floor) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

std::vector<GradCheckRow> run_grad_checks(std::uint64_t seed, std::size_t cases) {
  std::mt19937_64 rng(mix_seed(seed, 0x6EAD));
  std::vector<GradCheckRow> rows;
  rows.push_back(jacobian_suite(rng, cases, 1e-2));
  rows.push_back(jacobian_suite(rng, cases, 1e-3));

  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> size(2, 16);

  GradCheckRow charb{"charbonnier", cases, 0.0, kLossTolerance, false};
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = static_cast<std::size_t>(size(rng));
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      b[i] = u(rng);
      a[i] = b[i] + 0.02 * (u(rng) - 0.5);
    }
    check_gradient(
        a, [&](const std::vector<double>& x) { return charbonnier(x, b); },
        [&](const std::vector<double>& x) { return charbonnier_grad(x, b); }, 1e-7, charb);
  }
  charb.pass = charb.max_rel_error < charb.tolerance;
  rows.push_back(charb);

  GradCheckRow bm{"l_bm", cases, 0.0, kLossTolerance, false};
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = static_cast<std::size_t>(size(rng));
    std::vector<double> noisy(n), clean(n);
    for (std::size_t i = 0; i < n; ++i) {
      noisy[i] = u(rng);
      clean[i] = u(rng);
    }
    check_gradient(
        noisy, [&](const std::vector<double>& x) { return l_bm(x, clean); },
        [&](const std::vector<double>& x) { return l_bm_grad(x, clean); }, 1e-6, bm);
  }
  bm.pass = bm.max_rel_error < bm.tolerance;
  rows.push_back(bm);

  GradCheckRow oh{"l_one_hot", cases, 0.0, kLossTolerance, false};
  const double h = 1e-6;
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = static_cast<std::size_t>(size(rng));
    std::vector<double> w(n);
    // Stay away from the kinks of the two absolute values.
    do {
      for (double& v : w) v = u(rng) * 2.0 / static_cast<double>(n);
    } while (std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) < 1e3 * h ||
             std::abs(mean_square(w) - 1.0 / static_cast<double>(n)) < 1e3 * h);
    check_gradient(
        w, [](const std::vector<double>& x) { return l_one_hot(x); },
        [](const std::vector<double>& x) { return l_one_hot_grad(x); }, h, oh);
  }
  oh.pass = oh.max_rel_error < oh.tolerance;
  rows.push_back(oh);
  return rows;
}

}  // namespace burstalign
