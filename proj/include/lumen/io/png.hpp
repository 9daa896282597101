#pragma once

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lumen/core/image.hpp"

namespace lumen {

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb8&) const = default;
};

/// Decoded PNG payload: gray (1 channel) or rgb (3), 8- or 16-bit samples.
/// 16-bit samples are already in host order.
struct PngData {
  int width = 0;
  int height = 0;
  int channels = 1;
  int bit_depth = 8;
  std::vector<std::uint16_t> samples;  // row-major, channel-interleaved
};

namespace detail {

inline void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
                      const std::vector<std::uint8_t>& data) {
  put_be32(out, static_cast<std::uint32_t>(data.size()));
  std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  std::uint32_t crc = static_cast<std::uint32_t>(
      ::crc32(0, out.data() + start, static_cast<uInt>(out.size() - start)));
  put_be32(out, crc);
}

inline std::vector<std::uint8_t> zlib_pack(const std::vector<std::uint8_t>& raw) {
  uLongf bound = ::compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> packed(bound);
  if (::compress2(packed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw std::runtime_error("png: zlib compression failed");
  packed.resize(bound);
  return packed;
}

inline void write_png_bytes(const std::string& path, int w, int h, int channels, int bit_depth,
                            const std::vector<std::uint8_t>& pixel_bytes) {
  if (w < 1 || h < 1) throw std::invalid_argument("png: empty image: " + path);
  const std::size_t row_bytes = static_cast<std::size_t>(w) * channels * (bit_depth / 8);
  std::vector<std::uint8_t> raw;
  raw.reserve((row_bytes + 1) * h);
  for (int y = 0; y < h; ++y) {
    raw.push_back(0);  // filter: none
    const std::uint8_t* src = pixel_bytes.data() + row_bytes * y;
    raw.insert(raw.end(), src, src + row_bytes);
  }

  std::vector<std::uint8_t> file{137, 80, 78, 71, 13, 10, 26, 10};
  std::vector<std::uint8_t> ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(w));
  put_be32(ihdr, static_cast<std::uint32_t>(h));
  ihdr.push_back(static_cast<std::uint8_t>(bit_depth));
  ihdr.push_back(channels == 3 ? 2 : 0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  put_chunk(file, "IHDR", ihdr);
  put_chunk(file, "IDAT", zlib_pack(raw));
  put_chunk(file, "IEND", {});

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("png: cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(file.data()), static_cast<std::streamsize>(file.size()));
  if (!f) throw std::runtime_error("png: write failed: " + path);
}

inline int paeth(int a, int b, int c) {
  int p = a + b - c;
  int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

}  // namespace detail

inline void write_png(const std::string& path, const Image2D<std::uint8_t>& img) {
  std::vector<std::uint8_t> bytes(img.data(), img.data() + img.size());
  detail::write_png_bytes(path, img.width(), img.height(), 1, 8, bytes);
}

inline void write_png(const std::string& path, const Image2D<std::uint16_t>& img) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(img.size() * 2);
  for (std::size_t i = 0; i < img.size(); ++i) {
    bytes.push_back(static_cast<std::uint8_t>(img.data()[i] >> 8));
    bytes.push_back(static_cast<std::uint8_t>(img.data()[i]));
  }
  detail::write_png_bytes(path, img.width(), img.height(), 1, 16, bytes);
}

inline void write_png(const std::string& path, const Image2D<Rgb8>& img) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(img.size() * 3);
  for (std::size_t i = 0; i < img.size(); ++i) {
    bytes.push_back(img.data()[i].r);
    bytes.push_back(img.data()[i].g);
    bytes.push_back(img.data()[i].b);
  }
  detail::write_png_bytes(path, img.width(), img.height(), 3, 8, bytes);
}

inline PngData read_png(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("png: cannot open: " + path);
  std::vector<std::uint8_t> file((std::istreambuf_iterator<char>(f)),
                                 std::istreambuf_iterator<char>());
  static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  if (file.size() < 8 || std::memcmp(file.data(), sig, 8) != 0)
    throw std::runtime_error("png: bad signature: " + path);

  auto be32 = [&](std::size_t off) {
    return (std::uint32_t(file[off]) << 24) | (std::uint32_t(file[off + 1]) << 16) |
           (std::uint32_t(file[off + 2]) << 8) | std::uint32_t(file[off + 3]);
  };

  PngData out;
  int color_type = -1;
  std::vector<std::uint8_t> idat;
  std::size_t pos = 8;
  while (pos + 8 <= file.size()) {
    std::uint32_t len = be32(pos);
    std::string type(file.begin() + pos + 4, file.begin() + pos + 8);
    std::size_t data = pos + 8;
    if (data + len + 4 > file.size()) throw std::runtime_error("png: truncated chunk: " + path);
    if (type == "IHDR") {
      if (len != 13) throw std::runtime_error("png: bad IHDR: " + path);
      out.width = static_cast<int>(be32(data));
      out.height = static_cast<int>(be32(data + 4));
      out.bit_depth = file[data + 8];
      color_type = file[data + 9];
      if (file[data + 12] != 0) throw std::runtime_error("png: interlaced input unsupported: " + path);
    } else if (type == "IDAT") {
      idat.insert(idat.end(), file.begin() + data, file.begin() + data + len);
    } else if (type == "IEND") {
      break;
    }
    pos = data + len + 4;
  }
  if (color_type != 0 && color_type != 2)
    throw std::runtime_error("png: unsupported color type: " + path);
  if (out.bit_depth != 8 && out.bit_depth != 16)
    throw std::runtime_error("png: unsupported bit depth: " + path);
  out.channels = color_type == 2 ? 3 : 1;
  if (out.width < 1 || out.height < 1) throw std::runtime_error("png: bad dimensions: " + path);

  const std::size_t row_bytes =
      static_cast<std::size_t>(out.width) * out.channels * (out.bit_depth / 8);
  const std::size_t raw_size = (row_bytes + 1) * out.height;
  std::vector<std::uint8_t> raw(raw_size);
  uLongf dest = static_cast<uLongf>(raw_size);
  if (::uncompress(raw.data(), &dest, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
      dest != raw_size)
    throw std::runtime_error("png: inflate failed: " + path);

  // undo scanline filters in place
  const int bpp = out.channels * (out.bit_depth / 8);
  std::vector<std::uint8_t> pixels(row_bytes * out.height);
  for (int y = 0; y < out.height; ++y) {
    const std::uint8_t filter = raw[(row_bytes + 1) * y];
    const std::uint8_t* src = raw.data() + (row_bytes + 1) * y + 1;
    std::uint8_t* dst = pixels.data() + row_bytes * y;
    const std::uint8_t* up = y > 0 ? pixels.data() + row_bytes * (y - 1) : nullptr;
    for (std::size_t i = 0; i < row_bytes; ++i) {
      int a = i >= static_cast<std::size_t>(bpp) ? dst[i - bpp] : 0;
      int b = up ? up[i] : 0;
      int c = (up && i >= static_cast<std::size_t>(bpp)) ? up[i - bpp] : 0;
      int v = src[i];
      switch (filter) {
        case 0: break;
        case 1: v += a; break;
        case 2: v += b; break;
        case 3: v += (a + b) / 2; break;
        case 4: v += detail::paeth(a, b, c); break;
        default: throw std::runtime_error("png: unknown filter type: " + path);
      }
      dst[i] = static_cast<std::uint8_t>(v);
    }
  }

  const std::size_t n = static_cast<std::size_t>(out.width) * out.height * out.channels;
  out.samples.resize(n);
  if (out.bit_depth == 8) {
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = pixels[i];
  } else {
    for (std::size_t i = 0; i < n; ++i)
      out.samples[i] = static_cast<std::uint16_t>((pixels[2 * i] << 8) | pixels[2 * i + 1]);
  }
  return out;
}

inline Image2D<std::uint8_t> read_png_gray8(const std::string& path) {
  PngData d = read_png(path);
  if (d.channels != 1 || d.bit_depth != 8)
    throw std::runtime_error("png: expected 8-bit grayscale: " + path);
  Image2D<std::uint8_t> img(d.width, d.height);
  for (std::size_t i = 0; i < d.samples.size(); ++i)
    img.data()[i] = static_cast<std::uint8_t>(d.samples[i]);
  return img;
}

inline Image2D<std::uint16_t> read_png_gray16(const std::string& path) {
  PngData d = read_png(path);
  if (d.channels != 1 || d.bit_depth != 16)
    throw std::runtime_error("png: expected 16-bit grayscale: " + path);
  Image2D<std::uint16_t> img(d.width, d.height);
  std::copy(d.samples.begin(), d.samples.end(), img.data());
  return img;
}

inline Image2D<Rgb8> read_png_rgb8(const std::string& path) {
  PngData d = read_png(path);
  if (d.channels != 3 || d.bit_depth != 8)
    throw std::runtime_error("png: expected 8-bit rgb: " + path);
  Image2D<Rgb8> img(d.width, d.height);
  for (std::size_t i = 0; i < img.size(); ++i)
    img.data()[i] = {static_cast<std::uint8_t>(d.samples[3 * i]),
                     static_cast<std::uint8_t>(d.samples[3 * i + 1]),
                     static_cast<std::uint8_t>(d.samples[3 * i + 2])};
  return img;
}

}  // namespace lumen
