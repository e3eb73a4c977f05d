#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "burstalign/errors.hpp"
#include "burstalign/io.hpp"
#include "oracles.hpp"

using namespace burstalign;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "burstalign_io_test";
  fs::create_directories(dir);
  return dir / name;
}

std::uint32_t u32_at(const std::vector<unsigned char>& b, std::size_t off) {
  return b[off] | (b[off + 1] << 8) | (b[off + 2] << 16) | (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

Plane quantized_plane(int w, int h, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(0, 65535);
  Plane p(w, h);
  for (double& v : p.data()) v = u(rng) / 65535.0;
  return p;
}

}  // namespace

TEST(Gray16, PngAndPgmRoundTripExactly) {
  std::mt19937_64 rng(1);
  const Plane p = quantized_plane(17, 9, rng);
  io::write_gray16_png(scratch("g.png"), p);
  io::write_gray16_pgm(scratch("g.pgm"), p);
  EXPECT_EQ(io::read_gray(scratch("g.png")), p);
  EXPECT_EQ(io::read_gray(scratch("g.pgm")), p);
}

TEST(Gray16, ClipsOutOfRangeSamples) {
  Plane p(2, 2);
  p.at(0, 0) = -0.3;
  p.at(1, 1) = 1.7;
  io::write_gray16_png(scratch("clip.png"), p);
  const Plane q = io::read_gray(scratch("clip.png"));
  EXPECT_EQ(q.at(0, 0), 0.0);
  EXPECT_EQ(q.at(1, 1), 1.0);
}

TEST(Rgb16, RoundTrip) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> u(0, 65535);
  RgbImage img(6, 4);
  for (double& v : img.data()) v = u(rng) / 65535.0;
  io::write_rgb16_png(scratch("rgb.png"), img);
  EXPECT_EQ(io::read_rgb_png(scratch("rgb.png")), img);
}

TEST(Vmap, HeaderLayoutAndLossyFloatRoundTrip) {
  std::mt19937_64 rng(3);
  Plane p(5, 3);
  for (double& v : p.data()) v = std::uniform_real_distribution<double>(0, 1e-3)(rng);
  io::write_vmap(scratch("v.vmap"), p);
  const auto bytes = io::read_bytes(scratch("v.vmap"));
  ASSERT_EQ(bytes.size(), 12u + 15u * 4u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "VMAP");
  EXPECT_EQ(u32_at(bytes, 4), 5u);
  EXPECT_EQ(u32_at(bytes, 8), 3u);
  const Plane q = io::read_vmap(scratch("v.vmap"));
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(q.data()[i], static_cast<double>(static_cast<float>(p.data()[i])));
  EXPECT_THROW(io::read_float_grid(scratch("v.vmap"), "RAWF"), IoError);
}

TEST(Ogrd, RoundTripAndLayout) {
  OffsetGrid g(2, 3, 64);
  for (std::size_t i = 0; i < g.offsets.size(); ++i) g.offsets[i] = {static_cast<int>(i) - 3, -2 * static_cast<int>(i)};
  io::write_ogrd(scratch("g.ogrd"), g);
  const auto bytes = io::read_bytes(scratch("g.ogrd"));
  ASSERT_EQ(bytes.size(), 16u + 6u * 8u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "OGRD");
  EXPECT_EQ(u32_at(bytes, 4), 3u);
  EXPECT_EQ(u32_at(bytes, 8), 2u);
  EXPECT_EQ(u32_at(bytes, 12), 64u);
  EXPECT_EQ(static_cast<std::int32_t>(u32_at(bytes, 16)), -3);
  const OffsetGrid back = io::read_ogrd(scratch("g.ogrd"));
  EXPECT_EQ(back.offsets, g.offsets);
  EXPECT_EQ(back.patch_side, 64);
}

TEST(Ogrd, CsvListing) {
  OffsetGrid g(1, 2, 16);
  g.at(0, 1) = {4, -8};
  EXPECT_EQ(io::offsets_csv(g), "patch_row,patch_col,dy,dx\n0,0,0,0\n0,1,4,-8\n");
}

TEST(Flow, RoundTrip) {
  FlowField f = FlowField::identity(4, 2);
  f.dy.at(1, 3) = 2;
  f.dx.at(0, 0) = -2;
  f.confidence.at(1, 1) = 0.25;
  io::write_flow(scratch("f.flow"), f);
  const FlowField g = io::read_flow(scratch("f.flow"));
  EXPECT_EQ(g.dy, f.dy);
  EXPECT_EQ(g.dx, f.dx);
  EXPECT_EQ(g.confidence, f.confidence);
  io::write_flow_png(scratch("f.png"), f, 2.0);
  EXPECT_EQ(io::read_rgb_png(scratch("f.png")).width(), 4);
}

TEST(Errors, MissingAndTruncatedFiles) {
  EXPECT_THROW(io::read_gray(scratch("does_not_exist.png")), IoError);
  {
    std::ofstream os(scratch("short.vmap"), std::ios::binary);
    os << "VMAP\x04";
  }
  EXPECT_THROW(io::read_vmap(scratch("short.vmap")), IoError);
  {
    std::ofstream os(scratch("junk.png"), std::ios::binary);
    os << "not an image";
  }
  EXPECT_THROW(io::read_gray(scratch("junk.png")), IoError);
}
