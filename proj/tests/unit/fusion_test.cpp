#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "burstalign/errors.hpp"
#include "burstalign/fusion.hpp"
#include "burstalign/image_core.hpp"
#include "oracles.hpp"

using namespace burstalign;

namespace {

Burst noisy_copies(const BayerFrame& clean, std::size_t n, const NoiseParams& np, std::uint64_t seed) {
  Burst b;
  b.ref_index = 0;
  for (std::size_t t = 0; t < n; ++t) {
    b.frames.push_back(add_noise(clean, np, seed + t));
    b.variance_maps.push_back(variance_map(clean, np));
  }
  return b;
}

std::vector<FlowField> identity_flows(std::size_t n, int w, int h) {
  return std::vector<FlowField>(n, FlowField::identity(w, h));
}

}  // namespace

TEST(RobustMerge, IdenticalFramesMergeToThatFrame) {
  std::mt19937_64 rng(1);
  const BayerFrame f = mosaic(oracle::random_rgb(16, 16, rng), BayerPattern::RGGB);
  Burst b;
  b.ref_index = 2;
  for (int t = 0; t < 5; ++t) {
    b.frames.push_back(f);
    Plane var(16, 16);
    for (double& v : var.data()) v = 1e-4 + 1e-3 * std::uniform_real_distribution<double>()(rng);
    b.variance_maps.push_back(var);
  }
  EXPECT_EQ(robust_merge(b, identity_flows(5, 16, 16)), f);
}

TEST(RobustMerge, AveragingReducesVarianceByN) {
  const BayerFrame clean(Plane(1000, 1000, 0.3), BayerPattern::RGGB);
  const NoiseParams np = NoiseParams::high();
  const Burst b = noisy_copies(clean, 8, np, 100);
  const BayerFrame merged = robust_merge(b, identity_flows(8, 1000, 1000));
  const std::vector<double> single(b.frames[0].samples.data().begin(), b.frames[0].samples.data().end());
  const std::vector<double> fused(merged.samples.data().begin(), merged.samples.data().end());
  const double ratio = oracle::variance(fused) / oracle::variance(single);
  EXPECT_NEAR(ratio * 8.0, 1.0, 0.1);
}

TEST(RobustMerge, ZeroConfidenceFrameIsExcluded) {
  const BayerFrame clean(Plane(32, 32, 0.5), BayerPattern::RGGB);
  const Burst full = noisy_copies(clean, 4, NoiseParams::low(), 7);
  auto flows = identity_flows(4, 32, 32);
  for (double& c : flows[2].confidence.data()) c = 0.0;
  Burst reduced = full;
  reduced.frames.erase(reduced.frames.begin() + 2);
  reduced.variance_maps.erase(reduced.variance_maps.begin() + 2);
  const BayerFrame a = robust_merge(full, flows);
  const BayerFrame b = robust_merge(reduced, identity_flows(3, 32, 32));
  for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_DOUBLE_EQ(a.samples.data()[i], b.samples.data()[i]);
}

TEST(RobustMerge, OutputIsConvexCombination) {
  std::mt19937_64 rng(3);
  Burst b;
  b.ref_index = 1;
  std::vector<FlowField> flows;
  for (int t = 0; t < 4; ++t) {
    b.frames.push_back(mosaic(oracle::random_rgb(12, 12, rng), BayerPattern::RGGB));
    b.variance_maps.push_back(variance_map(b.frames.back(), NoiseParams::low()));
    FlowField f = FlowField::identity(12, 12);
    for (double& c : f.confidence.data()) c = std::uniform_real_distribution<double>()(rng);
    flows.push_back(f);
  }
  const BayerFrame m = robust_merge(b, flows);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 12; ++x) {
      double lo = 1e9, hi = -1e9;
      for (const auto& f : b.frames) {
        lo = std::min(lo, f.samples.at(y, x));
        hi = std::max(hi, f.samples.at(y, x));
      }
      EXPECT_GE(m.samples.at(y, x), lo - 1e-15);
      EXPECT_LE(m.samples.at(y, x), hi + 1e-15);
    }
}

TEST(RobustMerge, ReferenceKeepsItsFloorWhenConfidenceCollapses) {
  Burst b;
  b.ref_index = 0;
  b.frames = {BayerFrame(Plane(4, 4, 0.0), BayerPattern::RGGB), BayerFrame(Plane(4, 4, 1.0), BayerPattern::RGGB)};
  b.variance_maps = {Plane(4, 4, 1e-4), Plane(4, 4, 1e-4)};
  auto flows = identity_flows(2, 4, 4);
  for (double& c : flows[0].confidence.data()) c = 1e-9;
  const BayerFrame m = robust_merge(b, flows);
  for (double v : m.samples.data()) EXPECT_NEAR(v, 0.9, 1e-12);
}

TEST(RobustMerge, RejectsMismatchedInputs) {
  const BayerFrame clean(Plane(8, 8, 0.5), BayerPattern::RGGB);
  const Burst b = noisy_copies(clean, 3, NoiseParams::low(), 1);
  EXPECT_THROW(robust_merge(b, identity_flows(2, 8, 8)), DimensionError);
  EXPECT_THROW(robust_merge(b, identity_flows(3, 8, 6)), DimensionError);
}

TEST(Reconstruct, DemosaicsAndClips) {
  std::mt19937_64 rng(4);
  const BayerFrame f = mosaic(oracle::random_rgb(8, 8, rng), BayerPattern::RGGB);
  const RgbImage out = reconstruct(f);
  const RgbImage want = oracle::demosaic(f);
  for (std::size_t i = 0; i < out.data().size(); ++i) EXPECT_NEAR(out.data()[i], want.data()[i], 1e-15);
  BayerFrame hot(Plane(4, 4, 1.3), BayerPattern::RGGB);
  hot.samples.at(0, 0) = -0.2;
  EXPECT_TRUE(reconstruct(hot).in_unit_range());
  EXPECT_EQ(reconstruct(BayerFrame(Plane(6, 6, 0.25), BayerPattern::BGGR)), RgbImage(6, 6, 0.25));
}
