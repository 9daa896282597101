#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lumen/core/types.hpp"

namespace lumen {

/// Grayscale PFM: "Pf\n{w} {h}\n-1.0\n" then float32 rows bottom-to-top,
/// little-endian (negative scale). Invalid pixels are stored as +inf.
inline void write_pfm(const std::string& path, const DisparityMap& map) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("pfm: cannot open for writing: " + path);
  f << "Pf\n" << map.width() << " " << map.height() << "\n-1.0\n";
  const float inf = std::numeric_limits<float>::infinity();
  std::vector<float> row(static_cast<std::size_t>(map.width()));
  for (int y = map.height() - 1; y >= 0; --y) {
    for (int x = 0; x < map.width(); ++x)
      row[static_cast<std::size_t>(x)] = map.valid.at(x, y) ? map.value.at(x, y) : inf;
    if constexpr (std::endian::native == std::endian::big)
      for (auto& v : row) {
        std::uint32_t u;
        std::memcpy(&u, &v, 4);
        u = __builtin_bswap32(u);
        std::memcpy(&v, &u, 4);
      }
    f.write(reinterpret_cast<const char*>(row.data()),
            static_cast<std::streamsize>(row.size() * 4));
  }
  if (!f) throw std::runtime_error("pfm: write failed: " + path);
}

inline DisparityMap read_pfm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("pfm: cannot open: " + path);

  auto next_token = [&]() -> std::string {
    std::string tok;
    char c;
    while (f.get(c)) {
      if (c == ' ' || c == '\n' || c == '\r' || c == '\t') {
        if (!tok.empty()) return tok;
        continue;
      }
      tok.push_back(c);
    }
    return tok;
  };

  std::string magic = next_token();
  if (magic != "Pf")
    throw std::runtime_error("pfm: malformed header (expected Pf): " + path);
  int w = 0, h = 0;
  double scale = 0.0;
  try {
    w = std::stoi(next_token());
    h = std::stoi(next_token());
    scale = std::stod(next_token());
  } catch (const std::exception&) {
    throw std::runtime_error("pfm: malformed header: " + path);
  }
  if (w < 1 || h < 1 || scale == 0.0)
    throw std::runtime_error("pfm: malformed header: " + path);

  const bool file_big_endian = scale > 0;
  std::vector<float> data(static_cast<std::size_t>(w) * h);
  f.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * 4));
  if (f.gcount() != static_cast<std::streamsize>(data.size() * 4))
    throw std::runtime_error("pfm: truncated payload: " + path);

  const bool host_big = std::endian::native == std::endian::big;
  if (file_big_endian != host_big)
    for (auto& v : data) {
      std::uint32_t u;
      std::memcpy(&u, &v, 4);
      u = __builtin_bswap32(u);
      std::memcpy(&v, &u, 4);
    }

  DisparityMap out(w, h);
  for (int y = 0; y < h; ++y) {
    const float* src = data.data() + static_cast<std::size_t>(h - 1 - y) * w;
    for (int x = 0; x < w; ++x) {
      float v = src[x];
      if (std::isfinite(v)) {
        out.value.at(x, y) = v;
        out.valid.at(x, y) = 1;
      }
    }
  }
  return out;
}

}  // namespace lumen
