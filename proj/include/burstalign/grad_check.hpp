#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace burstalign {

struct GradCheckRow {
  std::string suite;
  std::size_t cases = 0;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// |analytic - numeric| / max(|analytic|, |numeric|, floor). Entries whose
// magnitude is below `floor` are effectively compared in absolute terms.
double relative_error(double analytic, double numeric, double floor);

// Analytic-vs-central-difference comparisons for the softmax Jacobian
// (T = 1e-2 and 1e-3) and the Charbonnier, L_BM and one-hot loss gradients.
std::vector<GradCheckRow> run_grad_checks(std::uint64_t seed, std::size_t cases = 1000);

}  // namespace burstalign
