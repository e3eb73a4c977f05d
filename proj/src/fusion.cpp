#include "burstalign/fusion.hpp"

#include <algorithm>

#include "burstalign/errors.hpp"
#include "burstalign/image_core.hpp"
#include "burstalign/parallel.hpp"

namespace burstalign {

namespace {
constexpr double kMinVariance = 1e-12;
}

BayerFrame robust_merge(const Burst& aligned, const std::vector<FlowField>& flows, double ref_floor) {
  aligned.validate();
  if (flows.size() != aligned.size()) throw DimensionError("robust_merge: one flow field per frame required");
  for (const auto& f : flows) {
    if (!f.confidence.same_dims(aligned.reference().samples)) throw DimensionError("robust_merge: flow size mismatch");
  }
  if (!(ref_floor >= 0.0 && ref_floor <= 1.0)) throw ParameterError("robust_merge: reference floor outside [0, 1]");

  const int w = aligned.reference().width();
  const int h = aligned.reference().height();
  const std::size_t n = aligned.size();
  const std::size_t r = aligned.ref_index;
  BayerFrame out(Plane(w, h), aligned.reference().pattern);

  parallel_for(0, h, [&](int y) {
    std::vector<double> weight(n);
    for (int x = 0; x < w; ++x) {
      double total = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        const double c = std::clamp(flows[t].confidence.at(y, x), 0.0, 1.0);
        weight[t] = c / std::max(aligned.variance_maps[t].at(y, x), kMinVariance);
        total += weight[t];
      }
      if (!(total > 0.0)) {
        out.samples.at(y, x) = aligned.frames[r].samples.at(y, x);
        continue;
      }
      for (auto& v : weight) v /= total;
      if (weight[r] < ref_floor) {
        const double others = 1.0 - weight[r];
        const double scale = others > 0.0 ? (1.0 - ref_floor) / others : 0.0;
        for (std::size_t t = 0; t < n; ++t) weight[t] = (t == r) ? ref_floor : weight[t] * scale;
      }
      // Accumulated as deviations from the reference so equal inputs merge exactly.
      const double base = aligned.frames[r].samples.at(y, x);
      double acc = 0.0;
      for (std::size_t t = 0; t < n; ++t) acc += weight[t] * (aligned.frames[t].samples.at(y, x) - base);
      out.samples.at(y, x) = base + acc;
    }
  });
  return out;
}

RgbImage reconstruct(const BayerFrame& merged) { return clip_unit(demosaic_bilinear(merged)); }

}  // namespace burstalign
