#include "burstalign/io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "burstalign/errors.hpp"

namespace burstalign::io {

namespace {

std::uint16_t to_u16(double v) {
  return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
}

std::uint8_t to_u8(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  return f;
}

[[noreturn]] void png_fail(png_structp png, png_const_charp msg) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  if (text) *text = msg;
  png_longjmp(png, 1);
}

void png_warn(png_structp, png_const_charp) {}

// Rows are big-endian 16-bit samples with `channels` interleaved.
void write_png16(const fs::path& path, int width, int height, int channels,
                 const std::vector<std::uint16_t>& samples) {
  FilePtr f = open_file(path, "wb");
  std::string err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_fail, png_warn);
  if (!png) throw IoError("libpng: cannot create write struct");
  png_infop info = png_create_info_struct(png);
  std::vector<png_byte> row(static_cast<std::size_t>(width) * channels * 2);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng write failed for '" + path.string() + "': " + err);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, width, height, 16, channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(width) * channels; ++i) {
      const std::uint16_t v = samples[static_cast<std::size_t>(y) * width * channels + i];
      row[2 * i] = static_cast<png_byte>(v >> 8);
      row[2 * i + 1] = static_cast<png_byte>(v & 0xFF);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 or 3 after transforms
  std::vector<double> samples;
};

DecodedPng read_png(const fs::path& path) {
  FilePtr f = open_file(path, "rb");
  std::array<png_byte, 8> sig{};
  if (std::fread(sig.data(), 1, sig.size(), f.get()) != sig.size() || png_sig_cmp(sig.data(), 0, 8) != 0) {
    throw IoError("'" + path.string() + "' is not a PNG file");
  }
  std::string err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_fail, png_warn);
  if (!png) throw IoError("libpng: cannot create read struct");
  png_infop info = png_create_info_struct(png);
  DecodedPng out;
  std::vector<png_byte> row;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng read failed for '" + path.string() + "': " + err);
  }
  png_init_io(png, f.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  const int bits = png_get_bit_depth(png, info);
  row.resize(png_get_rowbytes(png, info));
  out.samples.resize(static_cast<std::size_t>(out.width) * out.height * out.channels);
  const double scale = bits == 16 ? 65535.0 : 255.0;
  for (int y = 0; y < out.height; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (std::size_t i = 0; i < static_cast<std::size_t>(out.width) * out.channels; ++i) {
      const unsigned v = bits == 16 ? (static_cast<unsigned>(row[2 * i]) << 8) | row[2 * i + 1] : row[i];
      out.samples[static_cast<std::size_t>(y) * out.width * out.channels + i] = v / scale;
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                     static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  os.write(b, 4);
}

std::uint32_t get_u32(const std::vector<unsigned char>& buf, std::size_t pos) {
  return static_cast<std::uint32_t>(buf[pos]) | (static_cast<std::uint32_t>(buf[pos + 1]) << 8) |
         (static_cast<std::uint32_t>(buf[pos + 2]) << 16) | (static_cast<std::uint32_t>(buf[pos + 3]) << 24);
}

void put_f32(std::ostream& os, double v) {
  const float f = static_cast<float>(v);
  std::uint32_t bits = 0;
  std::memcpy(&bits, &f, 4);
  put_u32(os, bits);
}

float get_f32(const std::vector<unsigned char>& buf, std::size_t pos) {
  const std::uint32_t bits = get_u32(buf, pos);
  float f = 0.0f;
  std::memcpy(&f, &bits, 4);
  return f;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  return os;
}

void check_header(const std::vector<unsigned char>& buf, const char magic[4], std::size_t min_size,
                  const fs::path& path) {
  if (buf.size() < min_size || std::memcmp(buf.data(), magic, 4) != 0) {
    throw IoError("'" + path.string() + "' is not a " + std::string(magic, 4) + " file");
  }
}

}  // namespace

std::vector<unsigned char> read_bytes(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void write_gray16_png(const fs::path& path, const Plane& p) {
  std::vector<std::uint16_t> s(p.size());
  std::transform(p.data().begin(), p.data().end(), s.begin(), to_u16);
  write_png16(path, p.width(), p.height(), 1, s);
}

void write_gray16_pgm(const fs::path& path, const Plane& p) {
  auto os = open_out(path);
  os << "P5\n" << p.width() << " " << p.height() << "\n65535\n";
  for (double v : p.data()) {
    const std::uint16_t u = to_u16(v);
    const char b[2] = {static_cast<char>(u >> 8), static_cast<char>(u & 0xFF)};
    os.write(b, 2);
  }
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

namespace {

Plane read_pgm(const fs::path& path) {
  const auto buf = read_bytes(path);
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < buf.size()) {
      if (buf[pos] == '#') {
        while (pos < buf.size() && buf[pos] != '\n') ++pos;
      } else if (std::isspace(buf[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    std::string t;
    while (pos < buf.size() && !std::isspace(buf[pos])) t.push_back(static_cast<char>(buf[pos++]));
    return t;
  };
  if (token() != "P5") throw IoError("'" + path.string() + "' is not a binary PGM");
  int w = 0;
  int h = 0;
  int maxval = 0;
  try {
    w = std::stoi(token());
    h = std::stoi(token());
    maxval = std::stoi(token());
  } catch (const std::exception&) {
    throw IoError("malformed PGM header in '" + path.string() + "'");
  }
  ++pos;
  const int bytes = maxval > 255 ? 2 : 1;
  if (w <= 0 || h <= 0 || maxval <= 0 || buf.size() < pos + static_cast<std::size_t>(w) * h * bytes) {
    throw IoError("truncated PGM '" + path.string() + "'");
  }
  Plane p(w, h);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const unsigned v = bytes == 2 ? (static_cast<unsigned>(buf[pos + 2 * i]) << 8) | buf[pos + 2 * i + 1]
                                  : buf[pos + i];
    p.data()[i] = static_cast<double>(v) / maxval;
  }
  return p;
}

}  // namespace

Plane read_gray(const fs::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".pgm" || ext == ".PGM") return read_pgm(path);
  const DecodedPng d = read_png(path);
  if (d.channels != 1) throw IoError("'" + path.string() + "' is not a grayscale PNG");
  Plane p(d.width, d.height);
  std::copy(d.samples.begin(), d.samples.end(), p.data().begin());
  return p;
}

void write_rgb16_png(const fs::path& path, const RgbImage& img) {
  std::vector<std::uint16_t> s(img.data().size());
  std::transform(img.data().begin(), img.data().end(), s.begin(), to_u16);
  write_png16(path, img.width(), img.height(), 3, s);
}

RgbImage read_rgb_png(const fs::path& path) {
  const DecodedPng d = read_png(path);
  RgbImage img(d.width, d.height);
  for (int y = 0; y < d.height; ++y) {
    for (int x = 0; x < d.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const int src = d.channels == 1 ? 0 : c;
        img.at(y, x, c) = d.samples[(static_cast<std::size_t>(y) * d.width + x) * d.channels + src];
      }
    }
  }
  return img;
}

void write_rgb8_png(const fs::path& path, const RgbImage& img) {
  FilePtr f = open_file(path, "wb");
  std::string err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_fail, png_warn);
  if (!png) throw IoError("libpng: cannot create write struct");
  png_infop info = png_create_info_struct(png);
  std::vector<png_byte> row(static_cast<std::size_t>(img.width()) * 3);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng write failed for '" + path.string() + "': " + err);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) row[3 * x + c] = to_u8(img.at(y, x, c));
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void write_float_grid(const fs::path& path, const Plane& p, const char magic[4]) {
  auto os = open_out(path);
  os.write(magic, 4);
  put_u32(os, static_cast<std::uint32_t>(p.width()));
  put_u32(os, static_cast<std::uint32_t>(p.height()));
  for (double v : p.data()) put_f32(os, v);
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

Plane read_float_grid(const fs::path& path, const char magic[4]) {
  const auto buf = read_bytes(path);
  check_header(buf, magic, 12, path);
  const auto w = get_u32(buf, 4);
  const auto h = get_u32(buf, 8);
  if (buf.size() != 12 + static_cast<std::size_t>(w) * h * 4) throw IoError("size mismatch in '" + path.string() + "'");
  Plane p(static_cast<int>(w), static_cast<int>(h));
  for (std::size_t i = 0; i < p.size(); ++i) p.data()[i] = get_f32(buf, 12 + 4 * i);
  return p;
}

void write_ogrd(const fs::path& path, const OffsetGrid& grid) {
  auto os = open_out(path);
  os.write("OGRD", 4);
  put_u32(os, static_cast<std::uint32_t>(grid.cols));
  put_u32(os, static_cast<std::uint32_t>(grid.rows));
  put_u32(os, static_cast<std::uint32_t>(grid.patch_side));
  for (const auto& o : grid.offsets) {
    put_u32(os, static_cast<std::uint32_t>(o.dy));
    put_u32(os, static_cast<std::uint32_t>(o.dx));
  }
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

OffsetGrid read_ogrd(const fs::path& path) {
  const auto buf = read_bytes(path);
  check_header(buf, "OGRD", 16, path);
  const auto cols = get_u32(buf, 4);
  const auto rows = get_u32(buf, 8);
  const auto side = get_u32(buf, 12);
  if (buf.size() != 16 + static_cast<std::size_t>(rows) * cols * 8) throw IoError("size mismatch in '" + path.string() + "'");
  OffsetGrid grid(static_cast<int>(rows), static_cast<int>(cols), static_cast<int>(side));
  for (std::size_t i = 0; i < grid.offsets.size(); ++i) {
    grid.offsets[i].dy = static_cast<std::int32_t>(get_u32(buf, 16 + 8 * i));
    grid.offsets[i].dx = static_cast<std::int32_t>(get_u32(buf, 20 + 8 * i));
  }
  return grid;
}

std::string offsets_csv(const OffsetGrid& grid) {
  std::ostringstream os;
  os << "patch_row,patch_col,dy,dx\n";
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) os << r << ',' << c << ',' << grid.at(r, c).dy << ',' << grid.at(r, c).dx << '\n';
  }
  return os.str();
}

void write_offsets_csv(const fs::path& path, const OffsetGrid& grid) {
  auto os = open_out(path);
  os << offsets_csv(grid);
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

void write_flow(const fs::path& path, const FlowField& flow) {
  auto os = open_out(path);
  os.write("FLOW", 4);
  put_u32(os, static_cast<std::uint32_t>(flow.width()));
  put_u32(os, static_cast<std::uint32_t>(flow.height()));
  for (std::size_t i = 0; i < flow.dy.size(); ++i) {
    put_f32(os, flow.dy.data()[i]);
    put_f32(os, flow.dx.data()[i]);
    put_f32(os, flow.confidence.data()[i]);
  }
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

FlowField read_flow(const fs::path& path) {
  const auto buf = read_bytes(path);
  check_header(buf, "FLOW", 12, path);
  const auto w = get_u32(buf, 4);
  const auto h = get_u32(buf, 8);
  if (buf.size() != 12 + static_cast<std::size_t>(w) * h * 12) throw IoError("size mismatch in '" + path.string() + "'");
  FlowField flow(static_cast<int>(w), static_cast<int>(h));
  for (std::size_t i = 0; i < flow.dy.size(); ++i) {
    flow.dy.data()[i] = get_f32(buf, 12 + 12 * i);
    flow.dx.data()[i] = get_f32(buf, 16 + 12 * i);
    flow.confidence.data()[i] = get_f32(buf, 20 + 12 * i);
  }
  return flow;
}

void write_flow_png(const fs::path& path, const FlowField& flow, double max_radius) {
  RgbImage img(flow.width() + flow.width() % 2, flow.height() + flow.height() % 2);
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      const double dy = flow.dy.at(y, x);
      const double dx = flow.dx.at(y, x);
      const double hue = (std::atan2(dy, dx) + M_PI) / (2.0 * M_PI) * 6.0;
      const double sat = max_radius > 0.0 ? std::min(1.0, std::hypot(dy, dx) / max_radius) : 0.0;
      const double val = std::clamp(flow.confidence.at(y, x), 0.0, 1.0);
      const int sector = static_cast<int>(hue) % 6;
      const double frac = hue - std::floor(hue);
      const double p = val * (1.0 - sat);
      const double q = val * (1.0 - sat * frac);
      const double t = val * (1.0 - sat * (1.0 - frac));
      const std::array<std::array<double, 3>, 6> rgb{{{val, t, p}, {q, val, p}, {p, val, t},
                                                      {p, q, val}, {t, p, val}, {val, p, q}}};
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = rgb[sector][c];
    }
  }
  write_rgb8_png(path, img);
}

}  // namespace burstalign::io
