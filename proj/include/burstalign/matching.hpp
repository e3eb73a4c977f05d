#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "burstalign/types.hpp"

namespace burstalign {

inline constexpr double kDefaultDistanceEps = 1e-12;

// A reference patch and M candidate patches from a target frame. Positions
// are candidate offsets relative to the search center.
struct CandidateSet {
  Plane ref_patch;
  std::vector<Plane> candidates;
  std::vector<Offset> positions;

  int patch_side() const { return ref_patch.width(); }
  std::size_t size() const { return candidates.size(); }
  // Throws DimensionError on mismatched patches, ParameterError on M < 1 or
  // duplicate positions.
  void validate() const;
};

struct SoftMatch {
  std::vector<double> distances;
  std::vector<double> weights;
  double temperature = 0.0;
  Plane blended_patch;
  std::array<double, 2> expected_offset{0.0, 0.0};  // (dy, dx)
};

// Mean absolute difference between two equally sized patches.
double mean_abs_diff(const Plane& a, const Plane& b);

// Normalized mean-absolute distances from precomputed MADs:
// d_i = mad_i / sqrt(sum_j mad_j^2 + eps^2).
std::vector<double> normalize_mads(std::span<const double> mads, double eps_d = kDefaultDistanceEps);

std::vector<double> nma_distances(const CandidateSet& cs, double eps_d = kDefaultDistanceEps);

// softmax(-d / T) with max-shift. Throws ParameterError when T <= 0 or a
// distance is not finite.
std::vector<double> soft_weights(std::span<const double> distances, double temperature);

// Row-major M x M matrix J with J[i*M + j] = dw_i / dd_j
// = -(1/T) * w_i * (delta_ij - w_j).
std::vector<double> soft_weights_jacobian(std::span<const double> distances, double temperature);

SoftMatch soft_match(const CandidateSet& cs, double temperature, double eps_d = kDefaultDistanceEps);

// Index of the smallest distance. Exact ties go to the smallest squared
// offset magnitude, then to raster order (dy, then dx).
std::size_t hard_argmin(std::span<const double> distances, std::span<const Offset> positions);

}  // namespace burstalign
