#include "burstalign/pipeline.hpp"

#include "burstalign/errors.hpp"
#include "burstalign/fusion.hpp"

namespace burstalign {

SyntheticBurst synthesize_burst(std::vector<RgbImage> clean_frames, std::size_t ref_index,
                                const NoiseParams& noise, std::uint64_t seed, BayerPattern pattern) {
  noise.validate();
  if (clean_frames.size() < 2) throw DimensionError("synthesize_burst: need at least two frames");
  if (ref_index >= clean_frames.size()) throw ParameterError("synthesize_burst: reference index out of range");
  SyntheticBurst out;
  out.noise = noise;
  out.burst.ref_index = ref_index;
  for (std::size_t t = 0; t < clean_frames.size(); ++t) {
    if (!clean_frames[t].same_dims(clean_frames.front())) throw DimensionError("synthesize_burst: frame sizes differ");
    const BayerFrame noisy = add_noise(mosaic(clean_frames[t], pattern), noise, mix_seed(seed, t));
    out.burst.variance_maps.push_back(variance_map(noisy, noise));
    out.burst.frames.push_back(noisy);
  }
  out.shifts.assign(clean_frames.size(), Offset{});
  out.clean_frames = std::move(clean_frames);
  return out;
}

SyntheticBurst synthesize_burst(const RgbImage& scene, const std::vector<Offset>& shifts, std::size_t ref_index,
                                const NoiseParams& noise, std::uint64_t seed, BayerPattern pattern) {
  std::vector<RgbImage> frames;
  frames.reserve(shifts.size());
  for (const auto& s : shifts) frames.push_back(translate(scene, s));
  SyntheticBurst out = synthesize_burst(std::move(frames), ref_index, noise, seed, pattern);
  out.shifts = shifts;
  return out;
}

std::vector<Offset> constant_velocity_shifts(std::size_t frames, std::size_t ref_index, Offset velocity) {
  std::vector<Offset> shifts(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    const int n = static_cast<int>(t) - static_cast<int>(ref_index);
    shifts[t] = {n * velocity.dy, n * velocity.dx};
  }
  return shifts;
}

AlignmentResult align_burst(const Burst& burst, const PipelineConfig& cfg) {
  burst.validate();
  const int width = burst.reference().width();
  const int height = burst.reference().height();
  AlignmentResult out;

  Burst coarse_aligned = burst;
  if (cfg.coarse) {
    std::vector<Plane> lr;
    lr.reserve(burst.size());
    for (const auto& f : burst.frames) lr.push_back(quarter_scale_luma(f));
    out.coarse_lr = align_burst_coarse(lr, burst.ref_index, cfg.search, &out.candidates_evaluated);
    for (const auto& g : out.coarse_lr) out.coarse_full.push_back(rescale_offsets(g));
    coarse_aligned = apply_offsets(burst, out.coarse_full);
  } else {
    const OffsetGrid zero = make_grid(width, height, 4 * cfg.search.patch_k);
    out.coarse_full.assign(burst.size(), zero);
  }

  out.aligned = coarse_aligned;
  out.flows.assign(burst.size(), FlowField::identity(width, height));
  const BayerFrame& ref = burst.reference();
  const Plane& var_ref = burst.variance_maps[burst.ref_index];
  for (std::size_t t = 0; t < burst.size(); ++t) {
    if (t == burst.ref_index) continue;
    out.flows[t] = dense_refine(coarse_aligned.frames[t], ref, var_ref, cfg.refine);
    out.aligned.frames[t] = warp(coarse_aligned.frames[t], out.flows[t]);
    out.aligned.variance_maps[t] = warp_plane(coarse_aligned.variance_maps[t], out.flows[t]);
  }
  return out;
}

PipelineResult run_pipeline(const Burst& burst, const PipelineConfig& cfg) {
  PipelineResult out;
  out.alignment = align_burst(burst, cfg);
  out.merged = robust_merge(out.alignment.aligned, out.alignment.flows);
  out.restored = reconstruct(out.merged);
  return out;
}

RgbImage single_frame_baseline(const Burst& burst) { return reconstruct(burst.reference()); }

}  // namespace burstalign
