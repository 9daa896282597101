#pragma once

#include <cstdint>
#include <optional>

#include "lumen/core/image.hpp"

namespace lumen {

/// Per-pixel pattern values or probabilities in [0,1], one layer per pattern.
using PatternStack = Stack3D<float>;
using BitStack = Stack3D<std::uint8_t>;

/// Decoded projector-column codes. codes < 2^t wherever valid.
struct CodeMap {
  Image2D<std::int32_t> code;
  Mask valid;

  CodeMap() = default;
  CodeMap(int w, int h) : code(w, h, 0), valid(w, h, 0) {}
  int width() const { return code.width(); }
  int height() const { return code.height(); }
};

/// Disparity in pixels with a validity mask; scores kept only on request.
struct DisparityMap {
  Image2D<float> value;
  Mask valid;
  std::optional<Stack3D<float>> scores;  // h x w x (u+1), layer s = score at shift s

  DisparityMap() = default;
  DisparityMap(int w, int h) : value(w, h, 0.f), valid(w, h, 0) {}
  int width() const { return value.width(); }
  int height() const { return value.height(); }
};

}  // namespace lumen
