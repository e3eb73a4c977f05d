// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "burstalign/cost_model.hpp"
#include "burstalign/dpbm.hpp"
#include "burstalign/image_core.hpp"
#include "burstalign/io.hpp"
#include "burstalign/losses.hpp"
#include "burstalign/matching.hpp"
#include "burstalign/metrics.hpp"
#include "burstalign/pipeline.hpp"
#include "oracles.hpp"

using namespace burstalign;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Mean absolute difference between the k x k reference patch at p and the
// target patch at p + o, mirrored outside the frame.
double patch_mad(const Plane& ref, const Plane& tgt, Offset p, Offset o, int k) {
  double acc = 0.0;
  for (int y = 0; y < k; ++y)
    for (int x = 0; x < k; ++x) {
      const int ty = oracle::mirror(p.dy + o.dy + y, tgt.height());
      const int tx = oracle::mirror(p.dx + o.dx + x, tgt.width());
      acc += std::abs(ref.at(p.dy + y, p.dx + x) - tgt.at(ty, tx));
    }
  return acc / (k * k);
}

bool inside(Offset p, Offset shift, int k, int w, int h) {
  return p.dy + shift.dy >= 0 && p.dx + shift.dx >= 0 && p.dy + shift.dy + k <= h && p.dx + shift.dx + k <= w;
}

double patch_variance(const Plane& p, Offset at, int k) {
  std::vector<double> v;
  for (int y = 0; y < k; ++y)
    for (int x = 0; x < k; ++x) v.push_back(p.at(at.dy + y, at.dx + x));
  return oracle::variance(v);
}

// 1. Progressive search against the brute-force oracle.
Verdict progressive_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<int> shift(-8, 8);
  struct Tally {
    int total = 0, agree = 0, ties = 0, misses = 0;
  };
  std::map<int, Tally> tally;
  for (int pair = 0; pair < 200; ++pair) {
    const Plane ref = oracle::multiscale_plane(64, 64, rng);
    const Offset truth{shift(rng), shift(rng)};
    const Plane tgt = oracle::shifted(ref, truth);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        const Offset p{16 * r, 16 * c};
        // The injected shift is only the true answer where the displaced
        // patch stays inside the frame.
        if (!inside(p, truth, 16, 64, 64) || patch_variance(ref, p, 16) <= 1e-4) continue;
        const Offset full = exhaustive_search(ref, tgt, p, 8);
        for (int s : {2, 4}) {
          SearchConfig cfg;
          cfg.dp_cmax = 8;
          cfg.stride_s = s;
          const Offset got = progressive_search(ref, tgt, p, {}, cfg).offset;
          Tally& t = tally[s];
          ++t.total;
          if (got == full) {
            ++t.agree;
          } else if (patch_mad(ref, tgt, p, got, 16) == patch_mad(ref, tgt, p, full, 16)) {
            ++t.ties;
          } else {
            ++t.misses;
          }
        }
      }
  }
  const double secs = seconds_since(t0);
  Verdict v;
  for (const auto& [s, t] : tally) {
    const double rate = 100.0 * t.agree / t.total;
    v.pass = v.pass && rate >= 99.0 && t.misses == 0;
    v.detail += fmt("s=%d agree %d/%d (%.2f%%) ties %d non-tie %d; ", s, t.agree, t.total, rate, t.ties, t.misses);
  }
  v.pass = v.pass && secs < 10.0;
  v.detail += fmt("%.2fs", secs);
  return v;
}

// 2. Constant velocity of dp_cmax - 1 per frame, tracked through propagation.
Verdict propagation_reach() {
  const auto t0 = Clock::now();
  SearchConfig cfg;
  cfg.dp_cmax = 8;
  cfg.stride_s = 4;
  const int v = cfg.dp_cmax - 1;
  const RgbImage scene = synthetic_scene(512, 512, 21);
  std::vector<Plane> lr;
  for (int t = 0; t < 5; ++t)
    lr.push_back(quarter_scale_luma(mosaic(translate(scene, {4 * v * t, 0}), BayerPattern::RGGB)));
  const std::vector<OffsetGrid> grids = align_burst_coarse(lr, 0, cfg);
  int checked = 0, wrong = 0;
  for (int t = 1; t < 5; ++t) {
    const OffsetGrid& g = grids[t];
    for (int r = 0; r < g.rows; ++r)
      for (int c = 0; c < g.cols; ++c) {
        const Offset truth{v * t, 0};
        if (!inside({16 * r, 16 * c}, truth, 16, 128, 128)) continue;
        ++checked;
        wrong += g.at(r, c) != truth;
      }
  }
  const double secs = seconds_since(t0);
  return {wrong == 0 && checked > 0 && secs < 5.0,
          fmt("cumulative shift %d LR px, %d/%d in-frame patches exact, %.2fs", 4 * v, checked - wrong, checked, secs)};
}

// 3. Jacobian of the soft weights and agreement with the hard decision.
Verdict differentiability() {
  std::mt19937_64 rng(3003);
  std::uniform_int_distribution<int> msize(2, 16);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int unique = 0, agree = 0;
  for (double T : {1e-2, 1e-3}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const int m = msize(rng);
      const double base = u(rng);
      std::vector<double> d(m);
      for (double& x : d) x = base + 8.0 * T * u(rng);
      const auto j = soft_weights_jacobian(d, T);
      const auto fd = oracle::fd_jacobian(d, T, 1e-4 * T);
      double err = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < j.size(); ++i) {
        err = std::max(err, std::abs(j[i] - fd[i]));
        scale = std::max(scale, std::abs(j[i]));
      }
      worst = std::max(worst, err / scale);
    }
  }
  for (double T : {1e-1, 1e-2, 1e-3, 1e-4}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const int m = msize(rng);
      std::vector<double> d(m);
      std::vector<Offset> pos(m);
      for (int i = 0; i < m; ++i) {
        d[i] = u(rng);
        pos[i] = {i / 4, i % 4};
      }
      if (std::count(d.begin(), d.end(), *std::min_element(d.begin(), d.end())) != 1) continue;
      const auto w = soft_weights(d, T);
      ++unique;
      agree += static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin()) == hard_argmin(d, pos);
    }
  }
  return {worst < 1e-5 && agree == unique,
          fmt("max rel Jacobian error %.2e over 2000 vectors; argmax = argmin %d/%d", worst, agree, unique)};
}

// 4. Annealing with a fixed distance gap of 0.1.
Verdict annealing() {
  // Eight candidates with MAD 1 and one with MAD m0 chosen so that the
  // normalized distances differ by exactly 0.1: (1 - m0)^2 = 0.01 (m0^2 + 8).
  const double m0 = (2.0 - std::sqrt(4.0 - 4.0 * 0.99 * 0.92)) / (2.0 * 0.99);
  CandidateSet cs;
  cs.ref_patch = Plane(4, 4, 0.0);
  const Offset hard{1, -1};
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) {
      const Offset o{dy, dx};
      cs.positions.push_back(o);
      cs.candidates.push_back(Plane(4, 4, o == hard ? m0 : 1.0));
    }
  const SoftMatch hi = soft_match(cs, 1e-2);
  const SoftMatch lo = soft_match(cs, 1e-3);
  const auto [dmin, dmax] = std::minmax_element(hi.distances.begin(), hi.distances.end());
  const double gap = *dmax - *dmin;
  const double wmax_hi = *std::max_element(hi.weights.begin(), hi.weights.end());
  const double wmax_lo = *std::max_element(lo.weights.begin(), lo.weights.end());
  const double off_err = std::max(std::abs(lo.expected_offset[0] - hard.dy), std::abs(lo.expected_offset[1] - hard.dx));
  // The max weight never drops along the schedule.
  bool monotone = true;
  double prev = 0.0;
  for (long it = 0; it <= 100; ++it) {
    const auto w = soft_weights(hi.distances, temperature_at(it, 100));
    const double top = *std::max_element(w.begin(), w.end());
    monotone = monotone && top >= prev;
    prev = top;
  }
  const bool pass = std::abs(gap - 0.1) < 1e-12 && wmax_lo > wmax_hi && wmax_lo > 1.0 - 1e-12 && off_err < 0.01 && monotone;
  return {pass, fmt("gap %.15f, max w %.12f -> %.15f, |E[offset] - hard| %.2e, monotone schedule %s", gap, wmax_hi,
                    wmax_lo, off_err, monotone ? "yes" : "no")};
}

double rel_error(const std::vector<double>& g, const std::vector<double>& fd) {
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    err = std::max(err, std::abs(g[i] - fd[i]));
    scale = std::max(scale, std::abs(g[i]));
  }
  return scale > 0.0 ? err / scale : err;
}

std::vector<double> central_diff(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                                 double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    x[i] = x0 + h;
    const double fp = f(x);
    x[i] = x0 - h;
    const double fm = f(x);
    x[i] = x0;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// 5. Loss terms, their gradients and the weighted total.
Verdict losses() {
  bool one_hot_zero = true;
  for (int m = 1; m <= 16; ++m)
    for (int i = 0; i < m; ++i) {
      std::vector<double> w(m, 0.0);
      w[i] = 1.0;
      one_hot_zero = one_hot_zero && l_one_hot(w) == 0.0;
    }
  std::mt19937_64 rng(5005);
  std::uniform_int_distribution<int> msize(2, 16);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int positive = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> d(msize(rng));
    for (double& x : d) x = u(rng);
    // Alternate between normalized weights and raw vectors.
    const std::vector<double> w = trial % 2 ? soft_weights(d, 0.1) : d;
    positive += l_one_hot(w) > 0.0;
  }
  double worst_ch = 0.0, worst_bm = 0.0, worst_oh = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = msize(rng) * 4;
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
    }
    worst_ch = std::max(worst_ch, rel_error(charbonnier_grad(a, b),
                                            central_diff([&](const auto& x) { return charbonnier(x, b); }, a, 1e-7)));
    worst_bm = std::max(worst_bm,
                        rel_error(l_bm_grad(a, b), central_diff([&](const auto& x) { return l_bm(x, b); }, a, 1e-6)));
    std::vector<double> w(msize(rng));
    for (double& x : w) x = u(rng);
    worst_oh = std::max(worst_oh,
                        rel_error(l_one_hot_grad(w), central_diff([](const auto& x) { return l_one_hot(x); }, w, 1e-7)));
  }
  const double total = total_loss({1.0, 1.0, 1.0, 1.0});
  const bool pass = one_hot_zero && positive == 10000 && worst_ch < 1e-6 && worst_bm < 1e-6 && worst_oh < 1e-6 &&
                    total == 101002.0;
  return {pass, fmt("one-hot zero %s, positive %d/10000, grad rel err charbonnier %.1e l_bm %.1e one-hot %.1e, "
                    "total %.17g",
                    one_hot_zero ? "yes" : "no", positive, worst_ch, worst_bm, worst_oh, total)};
}

// 6. Empirical noise variance at several signal levels.
Verdict noise_model() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::uint64_t seed = 6006;
  for (const NoiseParams& np : {NoiseParams::low(), NoiseParams::high()})
    for (double x : {0.05, 0.3, 0.8}) {
      const BayerFrame clean(Plane(1000, 1000, x), BayerPattern::RGGB);
      const BayerFrame noisy = add_noise(clean, np, seed++);
      std::vector<double> res(noisy.samples.data().begin(), noisy.samples.data().end());
      for (double& r : res) r -= x;
      const double expected = np.sigma_s * x + np.sigma_r * np.sigma_r;
      worst = std::max(worst, std::abs(oracle::variance(res) / expected - 1.0));
    }
  const double secs = seconds_since(t0);
  return {worst < 0.02 && secs < 5.0,
          fmt("worst relative variance error %.3f%% (2 presets x 3 levels, 1e6 samples each), %.2fs", 100 * worst, secs)};
}

// 7. Closed-form cost ratio and measured candidate counts.
Verdict cost_model() {
  const CostParams cp{1, 28, 2, 16, 256, 256};
  const std::uint64_t one = one_stage_cost(cp);
  const std::uint64_t two = two_stage_cost(cp);
  const bool exact = one % two == 0 && one / two == 112;
  int configs = 0, matched = 0;
  for (int k : {4, 8, 16})
    for (int s = 2; s <= 4; ++s)
      for (int d = s; d <= 16; d += 2) {
        SearchConfig cfg;
        cfg.patch_k = k;
        cfg.stride_s = s;
        cfg.dp_cmax = d;
        const CandidateAudit a = audit_candidates(cfg, std::max(2 * d, 40), std::max(2 * d, 36));
        const std::size_t lattice = 2 * d / s + 1;
        const std::size_t fine = 2 * s - 1;
        ++configs;
        matched += a.measured == a.closed_form && a.measured == a.patches * (lattice * lattice + fine * fine);
      }
  return {exact && matched == configs,
          fmt("%llu / %llu = %llu remainder %llu; audit %d/%d configs exact", static_cast<unsigned long long>(one),
              static_cast<unsigned long long>(two), static_cast<unsigned long long>(one / two),
              static_cast<unsigned long long>(one % two), matched, configs)};
}

// 8. Static burst: merging eight frames against the single-frame baseline.
Verdict static_restoration() {
  const auto t0 = Clock::now();
  const RgbImage scene = synthetic_scene(256, 256, 11);
  const SyntheticBurst sb =
      synthesize_burst(scene, std::vector<Offset>(8), 4, NoiseParams::high(), 8008, BayerPattern::RGGB);
  const PipelineResult res = run_pipeline(sb.burst, {});
  const double base = psnr_gamma(single_frame_baseline(sb.burst), sb.ground_truth());
  const double fused = psnr_gamma(res.restored, sb.ground_truth());
  const double secs = seconds_since(t0);
  return {fused - base >= 6.0 && secs < 60.0,
          fmt("baseline %.2f dB, fused %.2f dB, gain %.2f dB, %.2fs", base, fused, fused - base, secs)};
}

// 9. Large motion: two-stage alignment against refinement alone.
Verdict moving_superiority() {
  const RgbImage scene = synthetic_scene(256, 256, 12);
  const std::vector<Offset> shifts = constant_velocity_shifts(8, 4, {12, -8});
  int largest = 0;
  for (const Offset& s : shifts) largest = std::max({largest, std::abs(s.dy), std::abs(s.dx)});
  const SyntheticBurst mb = synthesize_burst(scene, shifts, 4, NoiseParams::high(), 9009, BayerPattern::RGGB);
  PipelineConfig two_stage;
  PipelineConfig refine_only;
  refine_only.coarse = false;
  const double p2 = psnr_gamma(run_pipeline(mb.burst, two_stage).restored, mb.ground_truth());
  const double p1 = psnr_gamma(run_pipeline(mb.burst, refine_only).restored, mb.ground_truth());
  return {largest == 48 && p2 - p1 >= 3.0,
          fmt("max shift %d px, two-stage %.2f dB, refine-only %.2f dB, margin %.2f dB", largest, p2, p1, p2 - p1)};
}

int shell(const std::string& cmd) { return std::system(cmd.c_str()); }

std::map<std::string, std::vector<unsigned char>> snapshot(const fs::path& root) {
  std::map<std::string, std::vector<unsigned char>> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = io::read_bytes(e.path());
  return files;
}

// 10. Every command run with one and with eight worker threads.
Verdict determinism() {
  const fs::path base = fs::temp_directory_path() / "burstalign_acceptance";
  fs::remove_all(base);
  const std::string exe = BURSTALIGN_EXE;
  int failures = 0;
  for (const char* threads : {"1", "8"}) {
    const fs::path dir = base / threads;
    fs::create_directories(dir);
    // Paths are relative to each run directory so that printed paths match.
    const std::string t = std::string(" --threads ") + threads;
    const std::vector<std::string> cmds = {
        "synth --synthetic 192x128 --frames 5 --shift 6,-10 --preset high --seed 4 --out burst",
        "align --burst burst --out aligned --dump-offsets",
        "align --burst burst --out aligned_soft --mode soft",
        "align --burst burst --out aligned_ro --no-coarse",
        "fuse --aligned aligned --out restored.png",
        "fuse --aligned aligned_soft --out restored_soft.png",
        "eval --restored restored.png restored_soft.png --gt burst/gt.png",
        "bench --cost",
        "grad-check --cases 40",
    };
    for (std::size_t i = 0; i < cmds.size(); ++i) {
      const std::string line = "cd '" + dir.string() + "' && '" + exe + "' " + cmds[i] + t + " > stdout_" +
                               std::to_string(i) + ".txt";
      failures += shell(line) != 0;
    }
  }
  const auto a = snapshot(base / "1");
  const auto b = snapshot(base / "8");
  std::size_t differing = 0;
  for (const auto& [name, bytes] : a) {
    const auto it = b.find(name);
    differing += it == b.end() || it->second != bytes;
  }
  differing += b.size() > a.size() ? b.size() - a.size() : 0;
  return {failures == 0 && differing == 0 && a.size() > 20,
          fmt("%zu files compared, %zu differ, %d command failures", a.size(), differing, failures)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Verdict (*run)();
  };
  const Criterion criteria[] = {
      {"progressive-vs-exhaustive", progressive_equivalence},
      {"propagation-reach", propagation_reach},
      {"soft-weights-differentiability", differentiability},
      {"temperature-annealing", annealing},
      {"loss-correctness", losses},
      {"noise-model", noise_model},
      {"cost-model", cost_model},
      {"static-restoration", static_restoration},
      {"moving-burst-superiority", moving_superiority},
      {"thread-determinism", determinism},
  };
  int failed = 0;
  int id = 1;
  for (const Criterion& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %2d %-31s %s\n", v.pass ? "PASS" : "FAIL", id++, c.name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
