#include "burstalign/dpbm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "burstalign/errors.hpp"
#include "burstalign/parallel.hpp"

namespace burstalign {

namespace {

Plane extract_patch(const Plane& src, Offset top_left, int k) {
  Plane patch(k, k);
  const bool inside = top_left.dy >= 0 && top_left.dx >= 0 && top_left.dy + k <= src.height() &&
                      top_left.dx + k <= src.width();
  for (int y = 0; y < k; ++y) {
    for (int x = 0; x < k; ++x) {
      patch.at(y, x) = inside ? src.at(top_left.dy + y, top_left.dx + x)
                              : src.at_reflect(top_left.dy + y, top_left.dx + x);
    }
  }
  return patch;
}

// MAD between a pre-extracted reference patch and the target patch at
// top_left, without materialising the target patch.
double patch_mad(const Plane& ref_patch, const Plane& tgt, Offset top_left) {
  const int k = ref_patch.width();
  const bool inside = top_left.dy >= 0 && top_left.dx >= 0 && top_left.dy + k <= tgt.height() &&
                      top_left.dx + k <= tgt.width();
  double sum = 0.0;
  if (inside) {
    for (int y = 0; y < k; ++y) {
      const auto r = ref_patch.row(y);
      const double* t = tgt.row(top_left.dy + y).data() + top_left.dx;
      for (int x = 0; x < k; ++x) sum += std::abs(t[x] - r[x]);
    }
  } else {
    for (int y = 0; y < k; ++y) {
      for (int x = 0; x < k; ++x) {
        sum += std::abs(tgt.at_reflect(top_left.dy + y, top_left.dx + x) - ref_patch.at(y, x));
      }
    }
  }
  return sum / static_cast<double>(k * k);
}

// Lattice coordinates along one axis: -D, -D + s, ..., up to D.
std::vector<int> lattice_axis(int dp_cmax, int stride) {
  std::vector<int> axis;
  for (int v = -dp_cmax; v <= dp_cmax; v += stride) axis.push_back(v);
  return axis;
}

// [lo, hi] of length 2s - 1 around b, slid to stay inside [-D, D].
std::pair<int, int> refine_window(int b, int stride, int dp_cmax) {
  int lo = b - (stride - 1);
  int hi = b + (stride - 1);
  if (hi > dp_cmax) {
    lo -= hi - dp_cmax;
    hi = dp_cmax;
  }
  if (lo < -dp_cmax) {
    hi += -dp_cmax - lo;
    lo = -dp_cmax;
  }
  return {lo, hi};
}

}  // namespace

MatchMode parse_match_mode(std::string_view name) {
  if (name == "hard") return MatchMode::Hard;
  if (name == "soft") return MatchMode::Soft;
  throw ConfigError("unknown match mode '" + std::string(name) + "' (expected hard or soft)");
}

void SearchConfig::validate() const {
  if (stride_s < 2) throw ConfigError("stride_s must be >= 2");
  if (dp_cmax < stride_s) throw ConfigError("dp_cmax must be >= stride_s");
  if (patch_k < 4) throw ConfigError("patch_k must be >= 4");
  if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
}

void SearchConfig::validate_for(int width, int height) const {
  validate();
  if (2 * dp_cmax > std::min(width, height)) {
    throw ConfigError("dp_cmax " + std::to_string(dp_cmax) + " exceeds half the frame size " +
                      std::to_string(width) + "x" + std::to_string(height));
  }
}

std::size_t candidates_per_patch(const SearchConfig& cfg) {
  const std::size_t coarse = static_cast<std::size_t>(2 * cfg.dp_cmax / cfg.stride_s + 1);
  const std::size_t fine = static_cast<std::size_t>(2 * cfg.stride_s - 1);
  return coarse * coarse + fine * fine;
}

SearchResult progressive_search(const Plane& ref_lr, const Plane& tgt_lr, Offset p, Offset center_shift,
                                const SearchConfig& cfg) {
  cfg.validate_for(tgt_lr.width(), tgt_lr.height());
  if (!ref_lr.same_dims(tgt_lr)) throw DimensionError("progressive_search: frame size mismatch");

  // Propagated centers that leave the frame are pulled back inside.
  const Offset center{std::clamp(p.dy + center_shift.dy, 0, tgt_lr.height() - 1),
                      std::clamp(p.dx + center_shift.dx, 0, tgt_lr.width() - 1)};
  const Plane ref_patch = extract_patch(ref_lr, p, cfg.patch_k);

  SearchResult result;

  // Phase 1: strided lattice.
  const auto axis = lattice_axis(cfg.dp_cmax, cfg.stride_s);
  std::vector<Offset> positions;
  std::vector<double> mads;
  positions.reserve(axis.size() * axis.size());
  for (int dy : axis) {
    for (int dx : axis) {
      positions.push_back({dy, dx});
      mads.push_back(patch_mad(ref_patch, tgt_lr, center + Offset{dy, dx}));
    }
  }
  result.candidates_evaluated += positions.size();
  const Offset coarse_best = positions[hard_argmin(normalize_mads(mads), positions)];

  // Phase 2: stride-1 neighbourhood of the lattice winner.
  const auto [ylo, yhi] = refine_window(coarse_best.dy, cfg.stride_s, cfg.dp_cmax);
  const auto [xlo, xhi] = refine_window(coarse_best.dx, cfg.stride_s, cfg.dp_cmax);
  positions.clear();
  mads.clear();
  for (int dy = ylo; dy <= yhi; ++dy) {
    for (int dx = xlo; dx <= xhi; ++dx) {
      positions.push_back({dy, dx});
      mads.push_back(patch_mad(ref_patch, tgt_lr, center + Offset{dy, dx}));
    }
  }
  result.candidates_evaluated += positions.size();
  const auto distances = normalize_mads(mads);
  const Offset best = positions[hard_argmin(distances, positions)];

  result.offset = center + best - p;
  result.at_boundary = std::abs(best.dy) == cfg.dp_cmax || std::abs(best.dx) == cfg.dp_cmax;

  if (cfg.mode == MatchMode::Soft) {
    CandidateSet cs;
    cs.ref_patch = ref_patch;
    cs.positions = positions;
    cs.candidates.reserve(positions.size());
    for (const auto& o : positions) cs.candidates.push_back(extract_patch(tgt_lr, center + o, cfg.patch_k));
    SoftMatch soft = soft_match(cs, cfg.temperature);
    soft.expected_offset[0] += center.dy - p.dy;
    soft.expected_offset[1] += center.dx - p.dx;
    result.soft = std::move(soft);
  }
  return result;
}

Offset exhaustive_search(const Plane& ref_lr, const Plane& tgt_lr, Offset p, int range, int patch_k) {
  if (!ref_lr.same_dims(tgt_lr)) throw DimensionError("exhaustive_search: frame size mismatch");
  const Plane ref_patch = extract_patch(ref_lr, p, patch_k);
  std::vector<Offset> positions;
  std::vector<double> mads;
  for (int dy = -range; dy <= range; ++dy) {
    for (int dx = -range; dx <= range; ++dx) {
      positions.push_back({dy, dx});
      mads.push_back(patch_mad(ref_patch, tgt_lr, p + Offset{dy, dx}));
    }
  }
  return positions[hard_argmin(normalize_mads(mads), positions)];
}

OffsetGrid::OffsetGrid(int rows_, int cols_, int patch_side_)
    : rows(rows_), cols(cols_), patch_side(patch_side_) {
  offsets.assign(static_cast<std::size_t>(rows) * cols, Offset{});
  at_boundary.assign(offsets.size(), 0);
}

bool OffsetGrid::all_zero() const {
  return std::all_of(offsets.begin(), offsets.end(), [](const Offset& o) { return o == Offset{}; });
}

OffsetGrid make_grid(int width, int height, int patch_k) {
  return OffsetGrid((height + patch_k - 1) / patch_k, (width + patch_k - 1) / patch_k, patch_k);
}

std::vector<OffsetGrid> align_burst_coarse(const std::vector<Plane>& burst_lr, std::size_t ref_index,
                                           const SearchConfig& cfg, std::size_t* evaluations) {
  if (burst_lr.empty() || ref_index >= burst_lr.size()) throw ParameterError("align_burst_coarse: bad reference");
  const Plane& ref = burst_lr[ref_index];
  for (const auto& f : burst_lr) {
    if (!f.same_dims(ref)) throw DimensionError("align_burst_coarse: frames differ in size");
  }
  cfg.validate_for(ref.width(), ref.height());

  std::vector<OffsetGrid> grids(burst_lr.size(), make_grid(ref.width(), ref.height(), cfg.patch_k));
  std::size_t total = 0;

  auto align_frame = [&](std::size_t t, const OffsetGrid* previous) {
    OffsetGrid& grid = grids[t];
    if (cfg.mode == MatchMode::Soft) grid.expected.assign(grid.offsets.size(), {0.0, 0.0});
    std::vector<std::size_t> counts(grid.offsets.size(), 0);
    parallel_for(0, grid.rows * grid.cols, [&](int idx) {
      const int r = idx / grid.cols;
      const int c = idx % grid.cols;
      const Offset p{r * cfg.patch_k, c * cfg.patch_k};
      const Offset shift = previous ? previous->at(r, c) : Offset{};
      const SearchResult res = progressive_search(ref, burst_lr[t], p, shift, cfg);
      grid.at(r, c) = res.offset;
      grid.at_boundary[idx] = res.at_boundary ? 1 : 0;
      if (res.soft) grid.expected[idx] = res.soft->expected_offset;
      counts[idx] = res.candidates_evaluated;
    });
    for (auto n : counts) total += n;
  };

  for (std::size_t t = ref_index + 1; t < burst_lr.size(); ++t) {
    align_frame(t, t == ref_index + 1 ? nullptr : &grids[t - 1]);
  }
  for (std::size_t t = ref_index; t-- > 0;) {
    align_frame(t, t + 1 == ref_index ? nullptr : &grids[t + 1]);
  }
  if (evaluations) *evaluations = total;
  return grids;
}

OffsetGrid rescale_offsets(const OffsetGrid& grid, int factor) {
  OffsetGrid out = grid;
  out.patch_side = grid.patch_side * factor;
  for (auto& o : out.offsets) o = {o.dy * factor, o.dx * factor};
  for (auto& e : out.expected) e = {e[0] * factor, e[1] * factor};
  return out;
}

int snap_even(int v) {
  if (v % 2 == 0) return v;
  return v > 0 ? v - 1 : v + 1;
}

Burst apply_offsets(const Burst& burst, const std::vector<OffsetGrid>& full_res) {
  burst.validate();
  if (full_res.size() != burst.size()) throw DimensionError("apply_offsets: one offset grid per frame");
  const int width = burst.reference().width();
  const int height = burst.reference().height();
  Burst out = burst;
  for (std::size_t t = 0; t < burst.size(); ++t) {
    if (t == burst.ref_index) continue;
    const OffsetGrid& grid = full_res[t];
    if (grid.rows * grid.patch_side < height || grid.cols * grid.patch_side < width) {
      throw DimensionError("apply_offsets: offset grid does not cover the frame");
    }
    const Plane& src = burst.frames[t].samples;
    const Plane& src_var = burst.variance_maps[t];
    Plane& dst = out.frames[t].samples;
    Plane& dst_var = out.variance_maps[t];
    parallel_for(0, height, [&](int y) {
      const int r = y / grid.patch_side;
      for (int x = 0; x < width; ++x) {
        const Offset o = grid.at(r, x / grid.patch_side);
        const int sy = reflect_index(y + snap_even(o.dy), height);
        const int sx = reflect_index(x + snap_even(o.dx), width);
        dst.at(y, x) = src.at(sy, sx);
        dst_var.at(y, x) = src_var.at(sy, sx);
      }
    });
  }
  return out;
}

}  // namespace burstalign
