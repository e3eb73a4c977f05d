#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "burstalign/cli.hpp"
#include "burstalign/cost_model.hpp"
#include "burstalign/errors.hpp"
#include "burstalign/fusion.hpp"
#include "burstalign/grad_check.hpp"
#include "burstalign/io.hpp"
#include "burstalign/metrics.hpp"
#include "burstalign/parallel.hpp"
#include "burstalign/pipeline.hpp"

namespace burstalign::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifest = "burst.cfg";

std::string frame_name(const char* stem, std::size_t t, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%02zu%s", stem, t, ext);
  return buf;
}

std::string format_number(double v, int precision = 6) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

Offset parse_offset(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError("expected 'dy,dx', got '" + text + "'");
  try {
    return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ConfigError("expected integer 'dy,dx', got '" + text + "'");
  }
}

std::vector<Offset> parse_offsets(const std::string& text) {
  std::vector<Offset> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (!item.empty()) out.push_back(parse_offset(item));
  }
  return out;
}

std::pair<int, int> parse_size(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw ConfigError("expected WIDTHxHEIGHT, got '" + text + "'");
  try {
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw ConfigError("expected WIDTHxHEIGHT, got '" + text + "'");
  }
}

// Manifest describing a burst directory.
struct BurstInfo {
  std::size_t frames = 0;
  std::size_t ref = 0;
  BayerPattern pattern = BayerPattern::RGGB;
  NoiseParams noise;
};

void write_manifest(const fs::path& dir, const BurstInfo& info, const std::string& extra = {}) {
  std::ofstream os(dir / kManifest);
  if (!os) throw IoError("cannot write manifest in '" + dir.string() + "'");
  os << "frames = " << info.frames << "\n"
     << "ref = " << info.ref << "\n"
     << "pattern = " << to_string(info.pattern) << "\n"
     << "sigma_s = " << std::setprecision(17) << info.noise.sigma_s << "\n"
     << "sigma_r = " << std::setprecision(17) << info.noise.sigma_r << "\n"
     << extra;
}

BurstInfo read_manifest(const fs::path& dir) {
  const auto kv = read_key_values(dir / kManifest);
  auto get = [&](const std::string& k) -> const std::string& {
    const auto it = kv.find(k);
    if (it == kv.end()) throw IoError("manifest in '" + dir.string() + "' lacks '" + k + "'");
    return it->second;
  };
  BurstInfo info;
  try {
    info.frames = std::stoul(get("frames"));
    info.ref = std::stoul(get("ref"));
    info.noise = {std::stod(get("sigma_s")), std::stod(get("sigma_r"))};
  } catch (const std::invalid_argument&) {
    throw IoError("malformed manifest in '" + dir.string() + "'");
  }
  info.pattern = parse_pattern(get("pattern"));
  return info;
}

// Frames prefer the lossless RAWF copy and fall back to 16-bit PNG / PGM.
Plane read_frame(const fs::path& dir, const char* stem, std::size_t t) {
  const fs::path raw = dir / frame_name(stem, t, ".raw");
  if (fs::exists(raw)) return io::read_float_grid(raw, "RAWF");
  const fs::path png = dir / frame_name(stem, t, ".png");
  if (fs::exists(png)) return io::read_gray(png);
  return io::read_gray(dir / frame_name(stem, t, ".pgm"));
}

Burst read_burst(const fs::path& dir, const char* stem, BurstInfo& info) {
  info = read_manifest(dir);
  Burst burst;
  burst.ref_index = info.ref;
  for (std::size_t t = 0; t < info.frames; ++t) {
    BayerFrame frame(read_frame(dir, stem, t), info.pattern);
    const fs::path vmap = dir / frame_name(stem, t, ".vmap");
    burst.variance_maps.push_back(fs::exists(vmap) ? io::read_vmap(vmap) : variance_map(frame, info.noise));
    burst.frames.push_back(std::move(frame));
  }
  burst.validate();
  return burst;
}

void write_burst_frames(const fs::path& dir, const char* stem, const Burst& burst) {
  for (std::size_t t = 0; t < burst.size(); ++t) {
    io::write_gray16_png(dir / frame_name(stem, t, ".png"), burst.frames[t].samples);
    io::write_float_grid(dir / frame_name(stem, t, ".raw"), burst.frames[t].samples, "RAWF");
    io::write_vmap(dir / frame_name(stem, t, ".vmap"), burst.variance_maps[t]);
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::vector<std::string> inputs;
  std::string synthetic;
  std::uint64_t scene_seed = 1;
  int frames = 8;
  int ref = -1;
  std::string preset = "low";
  double sigma_s = -1.0;
  double sigma_r = -1.0;
  std::uint64_t seed = 0;
  std::string pattern = "RGGB";
  std::string shift;
  std::string shifts;
  std::string out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  if (a.inputs.empty() == a.synthetic.empty()) throw ConfigError("synth: give exactly one of --input or --synthetic");
  NoiseParams noise = NoiseParams::preset(a.preset);
  if (a.sigma_s >= 0.0) noise.sigma_s = a.sigma_s;
  if (a.sigma_r >= 0.0) noise.sigma_r = a.sigma_r;
  const BayerPattern pattern = parse_pattern(a.pattern);

  SyntheticBurst sb;
  if (a.inputs.size() > 1) {
    if (!a.shift.empty() || !a.shifts.empty()) throw ConfigError("synth: shifts only apply to a single input frame");
    std::vector<RgbImage> frames;
    for (const auto& p : a.inputs) frames.push_back(io::read_rgb_png(p));
    const std::size_t ref = a.ref >= 0 ? static_cast<std::size_t>(a.ref) : frames.size() / 2;
    sb = synthesize_burst(std::move(frames), ref, noise, a.seed, pattern);
  } else {
    RgbImage scene;
    if (!a.synthetic.empty()) {
      const auto [w, h] = parse_size(a.synthetic);
      scene = synthetic_scene(w, h, a.scene_seed);
    } else {
      scene = io::read_rgb_png(a.inputs.front());
    }
    std::vector<Offset> shifts;
    std::size_t ref = 0;
    if (!a.shifts.empty()) {
      if (!a.shift.empty()) throw ConfigError("synth: --shift and --shifts are exclusive");
      shifts = parse_offsets(a.shifts);
      ref = a.ref >= 0 ? static_cast<std::size_t>(a.ref) : shifts.size() / 2;
    } else {
      if (a.frames < 2) throw ConfigError("synth: --frames must be >= 2");
      ref = a.ref >= 0 ? static_cast<std::size_t>(a.ref) : static_cast<std::size_t>(a.frames) / 2;
      const Offset velocity = a.shift.empty() ? Offset{} : parse_offset(a.shift);
      shifts = constant_velocity_shifts(static_cast<std::size_t>(a.frames), ref, velocity);
    }
    sb = synthesize_burst(scene, shifts, ref, noise, a.seed, pattern);
  }

  const fs::path dir(a.out);
  ensure_dir(dir);
  write_burst_frames(dir, "frame", sb.burst);
  io::write_rgb16_png(dir / "gt.png", sb.ground_truth());
  {
    std::ofstream os(dir / "shifts.csv");
    if (!os) throw IoError("cannot write shifts.csv");
    os << "frame,dy,dx\n";
    for (std::size_t t = 0; t < sb.shifts.size(); ++t) {
      const Offset rel = sb.shifts[t] - sb.shifts[sb.burst.ref_index];
      os << t << ',' << rel.dy << ',' << rel.dx << '\n';
    }
  }
  write_manifest(dir, {sb.burst.size(), sb.burst.ref_index, pattern, noise});
  out << "wrote " << sb.burst.size() << " frames (" << sb.burst.reference().width() << "x"
      << sb.burst.reference().height() << ", ref " << sb.burst.ref_index << ", sigma_s " << noise.sigma_s
      << ", sigma_r " << noise.sigma_r << ") to " << dir.string() << "\n";
  return kSuccess;
}

// ---------------------------------------------------------------- align

struct AlignArgs {
  std::string burst;
  std::string out;
  PipelineConfig pipeline;
  std::string mode = "hard";
  bool no_coarse = false;
  bool dump_offsets = false;
};

void add_search_flags(CLI::App* app, PipelineConfig& cfg, std::string& mode) {
  app->add_option("--patch-k", cfg.search.patch_k, "patch side at quarter scale");
  app->add_option("--dp-cmax", cfg.search.dp_cmax, "max search range at quarter scale");
  app->add_option("--stride-s", cfg.search.stride_s, "coarse lattice stride");
  app->add_option("--temp", cfg.search.temperature, "relaxation temperature (soft mode)");
  app->add_option("--mode", mode, "hard or soft")->check(CLI::IsMember({"hard", "soft"}));
  app->add_option("--ds", cfg.refine.radius, "refinement radius D_s (full-res pixels)");
  app->add_option("--window", cfg.refine.window_radius, "refinement window radius");
}

int cmd_align(AlignArgs a, std::ostream& out) {
  a.pipeline.search.mode = parse_match_mode(a.mode);
  a.pipeline.coarse = !a.no_coarse;
  a.pipeline.search.validate();
  a.pipeline.refine.validate();

  BurstInfo info;
  const Burst burst = read_burst(a.burst, "frame", info);
  const AlignmentResult res = align_burst(burst, a.pipeline);

  const fs::path dir(a.out);
  ensure_dir(dir);
  write_burst_frames(dir, "aligned", res.aligned);
  for (std::size_t t = 0; t < burst.size(); ++t) {
    io::write_offsets_csv(dir / frame_name("offsets", t, ".csv"), res.coarse_full[t]);
    io::write_ogrd(dir / frame_name("offsets", t, ".ogrd"), res.coarse_full[t]);
    io::write_flow(dir / frame_name("flow", t, ".flow"), res.flows[t]);
    io::write_flow_png(dir / frame_name("flow", t, ".png"), res.flows[t], a.pipeline.refine.radius);
  }
  write_manifest(dir, info);

  if (a.dump_offsets) {
    out << "frame,patch_row,patch_col,dy,dx\n";
    for (std::size_t t = 0; t < burst.size(); ++t) {
      const auto& g = res.coarse_full[t];
      for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) out << t << ',' << r << ',' << c << ',' << g.at(r, c).dy << ',' << g.at(r, c).dx << '\n';
      }
    }
  }
  out << "aligned " << burst.size() << " frames, " << res.candidates_evaluated << " coarse candidate evaluations\n";
  return kSuccess;
}

// ---------------------------------------------------------------- fuse

int cmd_fuse(const std::string& aligned_dir, const std::string& out_path, std::ostream& out) {
  BurstInfo info;
  const Burst aligned = read_burst(aligned_dir, "aligned", info);
  std::vector<FlowField> flows;
  for (std::size_t t = 0; t < aligned.size(); ++t) {
    const fs::path p = fs::path(aligned_dir) / frame_name("flow", t, ".flow");
    flows.push_back(fs::exists(p) ? io::read_flow(p)
                                  : FlowField::identity(aligned.reference().width(), aligned.reference().height()));
  }
  const BayerFrame merged = robust_merge(aligned, flows);
  const RgbImage restored = reconstruct(merged);
  const fs::path target(out_path);
  if (target.has_parent_path()) ensure_dir(target.parent_path());
  io::write_rgb16_png(target, restored);
  out << "merged " << aligned.size() << " frames into " << target.string() << "\n";
  return kSuccess;
}

// ---------------------------------------------------------------- eval

int cmd_eval(const std::vector<std::string>& restored, const std::string& gt_path, double min_psnr, double min_ssim,
             std::ostream& out) {
  const RgbImage gt = io::read_rgb_png(gt_path);
  out << "image,psnr_gamma_db,ssim_gamma\n";
  double psnr_sum = 0.0;
  double ssim_sum = 0.0;
  bool ok = true;
  for (const auto& path : restored) {
    const RgbImage img = io::read_rgb_png(path);
    const double p = psnr_gamma(img, gt);
    const double s = ssim_gamma(img, gt);
    psnr_sum += p;
    ssim_sum += s;
    ok = ok && p >= min_psnr && s >= min_ssim;
    out << path << ',' << format_number(p) << ',' << format_number(s) << '\n';
  }
  const double n = static_cast<double>(restored.size());
  out << "mean," << format_number(psnr_sum / n) << ',' << format_number(ssim_sum / n) << '\n';
  return ok ? kSuccess : kVerificationFailure;
}

// ---------------------------------------------------------------- bench

void print_cost_table(std::ostream& out, const SearchConfig& search, const std::vector<int>& sizes) {
  out << "# multiply-add model (F = 1)\n";
  out << "H,W,D,k,D_s,one_stage,two_stage,speedup\n";
  for (int size : sizes) {
    for (std::uint64_t d : {28ULL, 64ULL, 128ULL}) {
      CostParams cp;
      cp.D = d;
      cp.k = 16;
      cp.D_s = 2;
      cp.H = cp.W = static_cast<std::uint64_t>(size);
      const auto one = one_stage_cost(cp);
      const auto two = two_stage_cost(cp);
      out << cp.H << ',' << cp.W << ',' << cp.D << ',' << cp.k << ',' << cp.D_s << ',' << one << ',' << two << ','
          << format_number(static_cast<double>(one) / static_cast<double>(two), 8) << '\n';
    }
  }
  out << "# coarse-search candidate audit (quarter-scale frames)\n";
  out << "lr_width,lr_height,patch_k,dp_cmax,stride_s,patches,measured,closed_form,exhaustive,match\n";
  for (int size : sizes) {
    const int lr = (size + 3) / 4;
    SearchConfig cfg = search;
    const auto audit = audit_candidates(cfg, lr, lr);
    const std::size_t full = static_cast<std::size_t>(2 * cfg.dp_cmax + 1) * (2 * cfg.dp_cmax + 1) * audit.patches;
    out << lr << ',' << lr << ',' << cfg.patch_k << ',' << cfg.dp_cmax << ',' << cfg.stride_s << ',' << audit.patches
        << ',' << audit.measured << ',' << audit.closed_form << ',' << full << ','
        << (audit.measured == audit.closed_form ? "yes" : "NO") << '\n';
  }
}

int cmd_bench(bool cost_only, const std::vector<int>& sizes, int frames, PipelineConfig cfg, const std::string& mode,
              std::ostream& out) {
  cfg.search.mode = parse_match_mode(mode);
  print_cost_table(out, cfg.search, sizes);
  if (cost_only) return kSuccess;
  out << "# wall-clock (synthetic static burst, " << frames << " frames, high preset, " << thread_count()
      << " threads)\n";
  out << "size,align_seconds,merge_seconds\n";
  for (int size : sizes) {
    const RgbImage scene = synthetic_scene(size, size, 1);
    const auto sb = synthesize_burst(scene, std::vector<Offset>(static_cast<std::size_t>(frames)),
                                     static_cast<std::size_t>(frames) / 2, NoiseParams::high(), 0, BayerPattern::RGGB);
    const auto t0 = std::chrono::steady_clock::now();
    const AlignmentResult res = align_burst(sb.burst, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    reconstruct(robust_merge(res.aligned, res.flows));
    const auto t2 = std::chrono::steady_clock::now();
    out << size << ',' << format_number(std::chrono::duration<double>(t1 - t0).count(), 4) << ','
        << format_number(std::chrono::duration<double>(t2 - t1).count(), 4) << '\n';
  }
  return kSuccess;
}

// ---------------------------------------------------------------- grad-check

int cmd_grad_check(std::uint64_t seed, std::size_t cases, std::ostream& out) {
  const auto rows = run_grad_checks(seed, cases);
  bool ok = true;
  out << "suite,cases,max_rel_error,tolerance,status\n";
  for (const auto& r : rows) {
    out << r.suite << ',' << r.cases << ',' << format_number(r.max_rel_error, 3) << ','
        << format_number(r.tolerance, 3) << ',' << (r.pass ? "PASS" : "FAIL") << '\n';
    ok = ok && r.pass;
  }
  return ok ? kSuccess : kVerificationFailure;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stage burst alignment and fusion for noisy Bayer bursts", "burstalign"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  int threads = 1;

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "synthesize a noisy Bayer burst");
  synth_cmd->add_option("--input", synth.inputs, "linear RGB PNG(s); one image plus shifts, or one per frame")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  synth_cmd->add_option("--synthetic", synth.synthetic, "procedural scene WIDTHxHEIGHT");
  synth_cmd->add_option("--scene-seed", synth.scene_seed, "seed of the procedural scene");
  synth_cmd->add_option("--frames", synth.frames, "burst length when shifting one image");
  synth_cmd->add_option("--ref", synth.ref, "reference frame index (default: center)");
  synth_cmd->add_option("--preset", synth.preset, "noise preset")->check(CLI::IsMember({"low", "high"}));
  synth_cmd->add_option("--sigma-s", synth.sigma_s, "shot-noise scale (overrides preset)");
  synth_cmd->add_option("--sigma-r", synth.sigma_r, "read-noise std (overrides preset)");
  synth_cmd->add_option("--seed", synth.seed, "noise seed");
  synth_cmd->add_option("--pattern", synth.pattern, "Bayer pattern")->check(CLI::IsMember({"RGGB", "BGGR", "GRBG", "GBRG"}));
  synth_cmd->add_option("--shift", synth.shift, "per-frame velocity dy,dx in full-res pixels");
  synth_cmd->add_option("--shifts", synth.shifts, "explicit per-frame shifts 'dy,dx;dy,dx;...'");
  synth_cmd->add_option("--out", synth.out, "output burst directory")->required();
  synth_cmd->add_option("--threads", threads, "worker threads");

  AlignArgs align;
  auto* align_cmd = app.add_subcommand("align", "coarse block matching plus dense refinement");
  align_cmd->add_option("--burst", align.burst, "burst directory written by synth")->required();
  align_cmd->add_option("--out", align.out, "output directory")->required();
  add_search_flags(align_cmd, align.pipeline, align.mode);
  align_cmd->add_flag("--no-coarse", align.no_coarse, "skip the coarse stage (refine-only ablation)");
  align_cmd->add_flag("--dump-offsets", align.dump_offsets, "print full-resolution patch offsets as CSV");
  align_cmd->add_option("--threads", threads, "worker threads");

  std::string fuse_in;
  std::string fuse_out;
  auto* fuse_cmd = app.add_subcommand("fuse", "merge an aligned burst into an RGB image");
  fuse_cmd->add_option("--aligned", fuse_in, "directory written by align")->required();
  fuse_cmd->add_option("--out", fuse_out, "restored 16-bit RGB PNG")->required();
  fuse_cmd->add_option("--threads", threads, "worker threads");

  std::vector<std::string> eval_inputs;
  std::string eval_gt;
  double min_psnr = -std::numeric_limits<double>::infinity();
  double min_ssim = -std::numeric_limits<double>::infinity();
  auto* eval_cmd = app.add_subcommand("eval", "gamma-corrected PSNR / SSIM against ground truth");
  eval_cmd->add_option("--restored", eval_inputs, "restored RGB PNG(s)")
      ->required()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  eval_cmd->add_option("--gt", eval_gt, "ground-truth RGB PNG")->required();
  eval_cmd->add_option("--min-psnr", min_psnr, "fail (exit 4) below this PSNR");
  eval_cmd->add_option("--min-ssim", min_ssim, "fail (exit 4) below this SSIM");
  eval_cmd->add_option("--threads", threads, "worker threads");

  bool cost_only = false;
  std::vector<int> sizes{256};
  int bench_frames = 8;
  PipelineConfig bench_cfg;
  std::string bench_mode = "hard";
  auto* bench_cmd = app.add_subcommand("bench", "cost model table, candidate audit and timings");
  bench_cmd->add_flag("--cost", cost_only, "only print the cost model and the candidate audit");
  bench_cmd->add_option("--sizes", sizes, "square full-resolution sizes")->delimiter(',');
  bench_cmd->add_option("--frames", bench_frames, "burst length for timings");
  add_search_flags(bench_cmd, bench_cfg, bench_mode);
  bench_cmd->add_option("--threads", threads, "worker threads");

  std::uint64_t gc_seed = 0;
  std::size_t gc_cases = 1000;
  auto* gc_cmd = app.add_subcommand("grad-check", "analytic vs finite-difference gradient suites");
  gc_cmd->add_option("--seed", gc_seed, "random seed");
  gc_cmd->add_option("--cases", gc_cases, "random cases per suite");
  gc_cmd->add_option("--threads", threads, "worker threads");

  try {
    const auto args = expand_config(raw_args);
    std::vector<const char*> argv{"burstalign"};
    for (const auto& s : args) argv.push_back(s.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  set_thread_count(threads);
  try {
    if (synth_cmd->parsed()) return cmd_synth(synth, out);
    if (align_cmd->parsed()) return cmd_align(align, out);
    if (fuse_cmd->parsed()) return cmd_fuse(fuse_in, fuse_out, out);
    if (eval_cmd->parsed()) return cmd_eval(eval_inputs, eval_gt, min_psnr, min_ssim, out);
    if (bench_cmd->parsed()) return cmd_bench(cost_only, sizes, bench_frames, bench_cfg, bench_mode, out);
    if (gc_cmd->parsed()) return cmd_grad_check(gc_seed, gc_cases, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kConfigError;
}

}  // namespace burstalign::cli
