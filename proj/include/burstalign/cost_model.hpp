#pragma once

#include <cstdint>

#include "burstalign/dpbm.hpp"

namespace burstalign {

// Multiply-add accounting for dense offset estimation.
struct CostParams {
  std::uint64_t F = 1;    // multiply-adds per receptive-field sample
  std::uint64_t D = 28;   // one-stage receptive field side
  std::uint64_t D_s = 2;  // refinement receptive field side
  std::uint64_t k = 16;   // patch side
  std::uint64_t H = 256;
  std::uint64_t W = 256;

  // F, D, k, H, W positive; 0 <= D_s <= D. Throws ParameterError.
  void validate() const;
};

// F * D^2 * H * W.
std::uint64_t one_stage_cost(const CostParams& cp);
// F * (floor(D^2 / k^2) + D_s^2) * H * W, all in exact integer arithmetic.
std::uint64_t two_stage_cost(const CostParams& cp);

struct CandidateAudit {
  std::size_t measured = 0;     // distance evaluations counted inside dpbm
  std::size_t closed_form = 0;  // patches * ((floor(2D/s) + 1)^2 + (2s - 1)^2)
  std::size_t patches = 0;
};

// Runs the coarse search on a synthetic two-frame burst of the given
// quarter-scale size and counts its distance evaluations.
CandidateAudit audit_candidates(const SearchConfig& cfg, int width, int height);

}  // namespace burstalign
