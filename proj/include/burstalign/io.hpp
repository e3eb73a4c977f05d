#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "burstalign/dpbm.hpp"
#include "burstalign/refine.hpp"
#include "burstalign/types.hpp"

namespace burstalign::io {

namespace fs = std::filesystem;

// 16-bit grayscale PNG; samples clipped to [0, 1] and scaled by 65535.
void write_gray16_png(const fs::path& path, const Plane& p);
// 16-bit binary PGM (P5, maxval 65535), same scaling.
void write_gray16_pgm(const fs::path& path, const Plane& p);
// Reads an 8/16-bit grayscale PNG or a binary PGM into [0, 1].
Plane read_gray(const fs::path& path);

// 16-bit RGB PNG, clipped to [0, 1].
void write_rgb16_png(const fs::path& path, const RgbImage& img);
// Reads 8/16-bit RGB(A) or grayscale PNGs; alpha is dropped.
RgbImage read_rgb_png(const fs::path& path);
// 8-bit RGB PNG of already display-ready values in [0, 1].
void write_rgb8_png(const fs::path& path, const RgbImage& img);

// Float grid with a 12-byte header: 4-byte magic, width and
// height as uint32 little-endian, then width * height float32 little-endian
// samples in row-major order. "VMAP" holds variance maps; "RAWF" holds
// unclipped frame samples.
void write_float_grid(const fs::path& path, const Plane& p, const char magic[4]);
Plane read_float_grid(const fs::path& path, const char magic[4]);
inline void write_vmap(const fs::path& path, const Plane& p) { write_float_grid(path, p, "VMAP"); }
inline Plane read_vmap(const fs::path& path) { return read_float_grid(path, "VMAP"); }

// "OGRD", cols, rows, patch_side (uint32 LE), then rows * cols pairs of
// int32 LE (dy, dx) in row-major patch order.
void write_ogrd(const fs::path& path, const OffsetGrid& grid);
OffsetGrid read_ogrd(const fs::path& path);
// CSV with header patch_row,patch_col,dy,dx.
void write_offsets_csv(const fs::path& path, const OffsetGrid& grid);
std::string offsets_csv(const OffsetGrid& grid);

// "FLOW", width, height (uint32 LE), then per pixel float32 LE triplets
// (dy, dx, confidence) in row-major order.
void write_flow(const fs::path& path, const FlowField& flow);
FlowField read_flow(const fs::path& path);
// Colour-coded 8-bit PNG: hue = direction, saturation = magnitude / max_radius,
// value = confidence.
void write_flow_png(const fs::path& path, const FlowField& flow, double max_radius);

std::vector<unsigned char> read_bytes(const fs::path& path);

}  // namespace burstalign::io
