#pragma once

#include <vector>

#include "burstalign/refine.hpp"
#include "burstalign/types.hpp"

namespace burstalign {

inline constexpr double kReferenceWeightFloor = 0.1;

// Per-pixel weighted mean of frames already aligned to the reference. Frame t
// weighs confidence_t(p) / m_t(p); after normalisation the reference keeps
// at least `ref_floor` of the total weight. `flows` holds one field per frame
// (the reference's is usually FlowField::identity).
BayerFrame robust_merge(const Burst& aligned, const std::vector<FlowField>& flows,
                        double ref_floor = kReferenceWeightFloor);

// Bilinear demosaic of the merged mosaic, clipped to [0, 1].
RgbImage reconstruct(const BayerFrame& merged);

}  // namespace burstalign
