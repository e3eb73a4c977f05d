#include "burstalign/cost_model.hpp"

#include <limits>

#include "burstalign/errors.hpp"
#include "burstalign/image_core.hpp"

namespace burstalign {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    throw ParameterError("cost model: multiply-add count overflows 64 bits");
  }
  return a * b;
}

}  // namespace

void CostParams::validate() const {
  if (F == 0 || D == 0 || k == 0 || H == 0 || W == 0) throw ParameterError("cost model parameters must be positive");
  if (D_s > D) throw ParameterError("cost model: D_s must not exceed D");
}

std::uint64_t one_stage_cost(const CostParams& cp) {
  cp.validate();
  return checked_mul(checked_mul(checked_mul(cp.F, cp.D * cp.D), cp.H), cp.W);
}

std::uint64_t two_stage_cost(const CostParams& cp) {
  cp.validate();
  const std::uint64_t d2 = cp.D * cp.D;
  const std::uint64_t k2 = cp.k * cp.k;
  const std::uint64_t per_pixel = d2 / k2 + cp.D_s * cp.D_s;
  return checked_mul(checked_mul(checked_mul(cp.F, per_pixel), cp.H), cp.W);
}

CandidateAudit audit_candidates(const SearchConfig& cfg, int width, int height) {
  cfg.validate_for(width, height);
  // Content does not affect the count; a textured pair keeps the run realistic.
  const RgbImage scene = synthetic_scene(width + width % 2, height + height % 2, 7);
  Plane frame(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) frame.at(y, x) = scene.at(y, x, 1);
  }
  const std::vector<Plane> burst{frame, frame};

  CandidateAudit audit;
  const OffsetGrid grid = make_grid(width, height, cfg.patch_k);
  audit.patches = grid.offsets.size();
  audit.closed_form = audit.patches * candidates_per_patch(cfg);
  align_burst_coarse(burst, 0, cfg, &audit.measured);
  return audit;
}

}  // namespace burstalign
