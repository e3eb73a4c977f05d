#pragma once

#include <cstdint>
#include <vector>

#include "burstalign/dpbm.hpp"
#include "burstalign/image_core.hpp"
#include "burstalign/refine.hpp"
#include "burstalign/types.hpp"

namespace burstalign {

// Clean frames, their noisy mosaics and the injected motion.
struct SyntheticBurst {
  Burst burst;
  std::vector<RgbImage> clean_frames;
  // Content displacement of each frame; the offset the aligner should
  // recover for frame t is shifts[t] - shifts[ref].
  std::vector<Offset> shifts;
  NoiseParams noise;

  const RgbImage& ground_truth() const { return clean_frames.at(burst.ref_index); }
};

// Mosaics and corrupts each clean frame; frame t draws noise from stream
// mix_seed(seed, t).
SyntheticBurst synthesize_burst(std::vector<RgbImage> clean_frames, std::size_t ref_index,
                                const NoiseParams& noise, std::uint64_t seed, BayerPattern pattern);

// Builds clean frames by translating `scene` by shifts[t] (reflect-101
// padding), then synthesizes as above.
SyntheticBurst synthesize_burst(const RgbImage& scene, const std::vector<Offset>& shifts, std::size_t ref_index,
                                const NoiseParams& noise, std::uint64_t seed, BayerPattern pattern);

// shifts[t] = (t - ref) * velocity.
std::vector<Offset> constant_velocity_shifts(std::size_t frames, std::size_t ref_index, Offset velocity);

struct PipelineConfig {
  SearchConfig search;
  RefineConfig refine;
  bool coarse = true;  // false: refine-only ablation
};

struct AlignmentResult {
  std::vector<OffsetGrid> coarse_lr;    // quarter-scale offsets
  std::vector<OffsetGrid> coarse_full;  // rescaled to full resolution
  std::vector<FlowField> flows;         // identity for the reference
  Burst aligned;                        // coarse + refined, variance maps warped alike
  std::size_t candidates_evaluated = 0;
};

AlignmentResult align_burst(const Burst& burst, const PipelineConfig& cfg);

struct PipelineResult {
  AlignmentResult alignment;
  BayerFrame merged;
  RgbImage restored;
};

PipelineResult run_pipeline(const Burst& burst, const PipelineConfig& cfg);

// Demosaic of the noisy reference alone, the single-frame baseline.
RgbImage single_frame_baseline(const Burst& burst);

}  // namespace burstalign
