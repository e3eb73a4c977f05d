#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "burstalign/matching.hpp"
#include "burstalign/types.hpp"

namespace burstalign {

enum class MatchMode { Hard, Soft };

MatchMode parse_match_mode(std::string_view name);

// Progressive block matching parameters, all in quarter-scale pixels.
struct SearchConfig {
  int patch_k = 16;
  int dp_cmax = 16;
  int stride_s = 4;
  double temperature = 1e-2;
  MatchMode mode = MatchMode::Hard;

  // dp_cmax >= stride_s >= 2, patch_k >= 4, T > 0. Throws ConfigError.
  void validate() const;
  // Adds dp_cmax <= min(width, height) / 2.
  void validate_for(int width, int height) const;
};

struct SearchResult {
  // Matched position minus the patch position; includes the center shift.
  Offset offset;
  // The match sits on the edge of the +-dp_cmax search region.
  bool at_boundary = false;
  std::size_t candidates_evaluated = 0;
  // Soft mode only: relaxation over the stride-1 phase. Its expected_offset
  // is expressed relative to the patch position like `offset`.
  std::optional<SoftMatch> soft;
};

// Two-phase search for the patch whose top-left corner is `p` in `ref_lr`:
// a stride-s lattice over [-dp_cmax, dp_cmax]^2 around p + center_shift,
// then every stride-1 position within s - 1 of the lattice winner (window
// kept inside the search region). Out-of-frame samples are reflect-padded.
SearchResult progressive_search(const Plane& ref_lr, const Plane& tgt_lr, Offset p, Offset center_shift,
                                const SearchConfig& cfg);

// Brute-force stride-1 search over all (2 * range + 1)^2 offsets around p.
Offset exhaustive_search(const Plane& ref_lr, const Plane& tgt_lr, Offset p, int range, int patch_k = 16);

// Number of distance evaluations one progressive_search performs.
std::size_t candidates_per_patch(const SearchConfig& cfg);

// Per-patch displacement field for one target frame. Patches tile the frame
// without overlap starting at (0, 0); patch (r, c) covers rows
// [r * patch_side, (r + 1) * patch_side).
struct OffsetGrid {
  int rows = 0;
  int cols = 0;
  int patch_side = 0;
  std::vector<Offset> offsets;
  std::vector<std::uint8_t> at_boundary;
  // Soft-mode expected offsets (dy, dx); empty in hard mode.
  std::vector<std::array<double, 2>> expected;

  OffsetGrid() = default;
  OffsetGrid(int rows, int cols, int patch_side);

  Offset& at(int r, int c) { return offsets[static_cast<std::size_t>(r) * cols + c]; }
  const Offset& at(int r, int c) const { return offsets[static_cast<std::size_t>(r) * cols + c]; }
  bool all_zero() const;
  friend bool operator==(const OffsetGrid&, const OffsetGrid&) = default;
};

// Patch grid dimensions for a plane of the given size.
OffsetGrid make_grid(int width, int height, int patch_k);

// Aligns every frame to `ref_index`, walking outwards in both temporal
// directions. The first neighbour searches around zero; each later frame
// searches around the offset found for its predecessor at the same patch.
// `evaluations`, when given, receives the total candidate count.
std::vector<OffsetGrid> align_burst_coarse(const std::vector<Plane>& burst_lr, std::size_t ref_index,
                                           const SearchConfig& cfg, std::size_t* evaluations = nullptr);

// Scales offsets and the patch tiling by `factor` (quarter scale -> full).
OffsetGrid rescale_offsets(const OffsetGrid& grid, int factor = 4);

// Nearest even integer, ties toward zero (3 -> 2, -3 -> -2, 1 -> 0).
int snap_even(int v);

// Replaces each full-resolution patch of every non-reference frame by the
// source patch displaced by its (even-snapped) offset. Variance maps follow.
Burst apply_offsets(const Burst& burst, const std::vector<OffsetGrid>& full_res);

}  // namespace burstalign
