#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "lumen/core/types.hpp"

namespace lumen {

enum class PatternKind { Binary, Gray };

inline const char* to_string(PatternKind k) {
  return k == PatternKind::Binary ? "binary" : "gray";
}

inline PatternKind pattern_kind_from_string(const std::string& s) {
  if (s == "binary") return PatternKind::Binary;
  if (s == "gray") return PatternKind::Gray;
  throw std::invalid_argument("unknown pattern kind: " + s);
}

/// Stripe pattern family: t patterns over a code width of W projector columns.
/// Pattern n (1-based) of the binary family has 2^n alternating runs; the gray
/// family emits bit n of the Gray code of the column index, MSB first.
struct PatternSpec {
  PatternKind kind = PatternKind::Gray;
  int t = 8;
  int code_width = 256;

  void validate() const {
    if (t < 1) throw std::invalid_argument("PatternSpec: t must be >= 1");
    if (code_width < 2) throw std::invalid_argument("PatternSpec: code_width must be >= 2");
  }
};

inline std::uint32_t gray_encode(std::uint32_t v) { return v ^ (v >> 1); }

/// Column -> dense code index at the decode resolution (2^t codes over W columns).
inline std::int32_t column_code_index(const PatternSpec& spec, int col) {
  return static_cast<std::int32_t>((static_cast<std::int64_t>(col) << spec.t) / spec.code_width);
}

/// Value of pattern n in [1..t] at projector column col in [0, W).
inline int stripe(const PatternSpec& spec, int n, int col) {
  if (n < 1 || n > spec.t)
    throw std::invalid_argument("stripe: pattern index out of range");
  if (col < 0 || col >= spec.code_width)
    throw std::out_of_range("stripe: column " + std::to_string(col) + " out of [0, " +
                            std::to_string(spec.code_width) + ")");
  if (spec.kind == PatternKind::Binary) {
    std::int64_t q = (static_cast<std::int64_t>(col) << n) / spec.code_width;
    return static_cast<int>(q & 1);
  }
  std::uint32_t g = gray_encode(static_cast<std::uint32_t>(column_code_index(spec, col)));
  return static_cast<int>((g >> (spec.t - n)) & 1u);
}

/// Vectorized stripe over a per-pixel projector-column map; invalid pixels -> 0.
inline PatternStack generate_stack(const PatternSpec& spec, const Image2D<std::int32_t>& columns,
                                   const Mask& valid) {
  if (columns.width() != valid.width() || columns.height() != valid.height())
    throw std::invalid_argument("generate_stack: column map and mask size mismatch");
  PatternStack out(columns.width(), columns.height(), spec.t, 0.f);
  for (int n = 1; n <= spec.t; ++n) {
    for (int y = 0; y < columns.height(); ++y)
      for (int x = 0; x < columns.width(); ++x)
        if (valid.at(x, y))
          out.at(x, y, n - 1) = static_cast<float>(stripe(spec, n, columns.at(x, y)));
  }
  return out;
}

/// Threshold a predicted stack to bits; values >= threshold become 1 (white).
inline BitStack binarize(const PatternStack& stack, float threshold = 0.5f) {
  BitStack bits(stack.width(), stack.height(), stack.layers(), 0);
  for (int n = 0; n < stack.layers(); ++n) {
    const float* src = stack.layer_data(n);
    std::uint8_t* dst = bits.layer_data(n);
    std::size_t plane = static_cast<std::size_t>(stack.width()) * stack.height();
    for (std::size_t i = 0; i < plane; ++i) dst[i] = src[i] >= threshold ? 1 : 0;
  }
  return bits;
}

/// Per-pixel projector-column codes from a bit stack. Binary: plain base-2 with
/// pattern 1 as the MSB. Gray: prefix-XOR, MSB first.
inline CodeMap decode(const PatternSpec& spec, const BitStack& bits) {
  if (bits.layers() != spec.t)
    throw std::invalid_argument("decode: bit stack has wrong layer count");
  CodeMap out(bits.width(), bits.height());
  for (int y = 0; y < bits.height(); ++y) {
    for (int x = 0; x < bits.width(); ++x) {
      std::int32_t code = 0;
      if (spec.kind == PatternKind::Binary) {
        for (int n = 0; n < spec.t; ++n)
          code = (code << 1) | bits.at(x, y, n);
      } else {
        int acc = 0;
        for (int n = 0; n < spec.t; ++n) {
          acc ^= bits.at(x, y, n);
          code = (code << 1) | acc;
        }
      }
      out.code.at(x, y) = code;
      out.valid.at(x, y) = 1;
    }
  }
  return out;
}

/// Exact code-match disparity: per valid left pixel, the smallest shift
/// s in [0..max_disp] whose right pixel carries the same valid code.
/// Serves as the brute-force oracle for the cross-correlation matcher.
inline DisparityMap code_match_disparity(const CodeMap& left, const CodeMap& right, int max_disp) {
  if (max_disp <= 0) throw std::invalid_argument("code_match_disparity: max_disp must be positive");
  if (left.width() != right.width() || left.height() != right.height())
    throw std::invalid_argument("code_match_disparity: code maps must have identical dimensions");
  DisparityMap out(left.width(), left.height());
  for (int y = 0; y < left.height(); ++y) {
    for (int x = 0; x < left.width(); ++x) {
      if (!left.valid.at(x, y)) continue;
      std::int32_t c = left.code.at(x, y);
      int limit = std::min(max_disp, x);
      for (int s = 0; s <= limit; ++s) {
        if (right.valid.at(x - s, y) && right.code.at(x - s, y) == c) {
          out.value.at(x, y) = static_cast<float>(s);
          out.valid.at(x, y) = 1;
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace lumen
