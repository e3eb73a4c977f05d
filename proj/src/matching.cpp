#include "burstalign/matching.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "burstalign/errors.hpp"

namespace burstalign {

void CandidateSet::validate() const {
  if (candidates.empty()) throw ParameterError("candidate set is empty");
  if (positions.size() != candidates.size()) throw DimensionError("one position per candidate required");
  if (ref_patch.width() != ref_patch.height() || ref_patch.empty()) {
    throw DimensionError("reference patch must be square and non-empty");
  }
  for (const auto& c : candidates) {
    if (!c.same_dims(ref_patch)) throw DimensionError("candidate patch size differs from reference patch");
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& p : positions) {
    if (!seen.emplace(p.dy, p.dx).second) throw ParameterError("candidate positions must be distinct");
  }
}

double mean_abs_diff(const Plane& a, const Plane& b) {
  if (!a.same_dims(b)) throw DimensionError("mean_abs_diff: patch size mismatch");
  const auto da = a.data();
  const auto db = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) sum += std::abs(da[i] - db[i]);
  return sum / static_cast<double>(da.size());
}

std::vector<double> normalize_mads(std::span<const double> mads, double eps_d) {
  double sq = eps_d * eps_d;
  for (double m : mads) sq += m * m;
  const double norm = std::sqrt(sq);
  std::vector<double> d(mads.size());
  for (std::size_t i = 0; i < mads.size(); ++i) d[i] = norm > 0.0 ? mads[i] / norm : 0.0;
  return d;
}

std::vector<double> nma_distances(const CandidateSet& cs, double eps_d) {
  cs.validate();
  std::vector<double> mads(cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) mads[i] = mean_abs_diff(cs.candidates[i], cs.ref_patch);
  return normalize_mads(mads, eps_d);
}

std::vector<double> soft_weights(std::span<const double> distances, double temperature) {
  if (!(temperature > 0.0)) throw ParameterError("soft_weights: temperature must be positive");
  if (distances.empty()) throw ParameterError("soft_weights: empty distance vector");
  double dmin = distances[0];
  for (double d : distances) {
    if (!std::isfinite(d)) throw ParameterError("soft_weights: distances must be finite");
    dmin = std::min(dmin, d);
  }
  std::vector<double> w(distances.size());
  double total = 0.0;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    w[i] = std::exp(-(distances[i] - dmin) / temperature);
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

std::vector<double> soft_weights_jacobian(std::span<const double> distances, double temperature) {
  const auto w = soft_weights(distances, temperature);
  const std::size_t m = w.size();
  std::vector<double> jac(m * m, 0.0);
  const double scale = 1.0 / temperature;
  for (std::size_t i = 0; i < m; ++i) {
    double off_diagonal = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      jac[i * m + j] = scale * w[i] * w[j];
      off_diagonal += jac[i * m + j];
    }
    // w_i (1 - w_i) = w_i sum_{j != i} w_j, which keeps each row summing to 0.
    jac[i * m + i] = -off_diagonal;
  }
  return jac;
}

SoftMatch soft_match(const CandidateSet& cs, double temperature, double eps_d) {
  SoftMatch out;
  out.distances = nma_distances(cs, eps_d);
  out.weights = soft_weights(out.distances, temperature);
  out.temperature = temperature;
  out.blended_patch = Plane(cs.patch_side(), cs.patch_side());
  auto blended = out.blended_patch.data();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const double w = out.weights[i];
    const auto cand = cs.candidates[i].data();
    for (std::size_t k = 0; k < blended.size(); ++k) blended[k] += w * cand[k];
    out.expected_offset[0] += w * cs.positions[i].dy;
    out.expected_offset[1] += w * cs.positions[i].dx;
  }
  return out;
}

std::size_t hard_argmin(std::span<const double> distances, std::span<const Offset> positions) {
  if (distances.empty()) throw ParameterError("hard_argmin: empty distance vector");
  if (positions.size() != distances.size()) throw DimensionError("hard_argmin: one position per distance");
  std::size_t best = 0;
  for (std::size_t i = 1; i < distances.size(); ++i) {
    if (distances[i] < distances[best]) {
      best = i;
    } else if (distances[i] == distances[best]) {
      const int mi = positions[i].squared_norm();
      const int mb = positions[best].squared_norm();
      if (mi < mb || (mi == mb && std::pair(positions[i].dy, positions[i].dx) <
                                      std::pair(positions[best].dy, positions[best].dx))) {
        best = i;
      }
    }
  }
  return best;
}

}  // namespace burstalign
