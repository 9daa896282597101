#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace lumen {

/// Row-major 2D array indexed as (x, y) with x = column, y = row.
template <typename T>
class Image2D {
 public:
  Image2D() = default;
  Image2D(int width, int height, T fill = T{})
      : w_(width), h_(height), data_(static_cast<std::size_t>(width) * height, fill) {
    if (width <= 0 || height <= 0)
      throw std::invalid_argument("Image2D: dimensions must be positive");
  }

  int width() const { return w_; }
  int height() const { return h_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(int x, int y) { return data_[static_cast<std::size_t>(y) * w_ + x]; }
  const T& at(int x, int y) const { return data_[static_cast<std::size_t>(y) * w_ + x]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  T* row(int y) { return data_.data() + static_cast<std::size_t>(y) * w_; }
  const T* row(int y) const { return data_.data() + static_cast<std::size_t>(y) * w_; }

  bool same_size(const Image2D& o) const { return w_ == o.w_ && h_ == o.h_; }

  friend bool operator==(const Image2D& a, const Image2D& b) {
    return a.w_ == b.w_ && a.h_ == b.h_ && a.data_ == b.data_;
  }

 private:
  int w_ = 0, h_ = 0;
  std::vector<T> data_;
};

/// h x w x t array, layer-major: layer n is a contiguous w*h plane.
/// Layer indices are 0-based here; pattern numbers n in [1..t] map to layer n-1.
template <typename T>
class Stack3D {
 public:
  Stack3D() = default;
  Stack3D(int width, int height, int layers, T fill = T{})
      : w_(width), h_(height), t_(layers), plane_(static_cast<std::size_t>(width) * height),
        data_(static_cast<std::size_t>(width) * height * layers, fill) {
    if (width <= 0 || height <= 0 || layers <= 0)
      throw std::invalid_argument("Stack3D: dimensions must be positive");
  }

  int width() const { return w_; }
  int height() const { return h_; }
  int layers() const { return t_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(int x, int y, int layer) {
    return data_[plane_ * layer + static_cast<std::size_t>(y) * w_ + x];
  }
  const T& at(int x, int y, int layer) const {
    return data_[plane_ * layer + static_cast<std::size_t>(y) * w_ + x];
  }

  T* layer_data(int layer) { return data_.data() + plane_ * layer; }
  const T* layer_data(int layer) const { return data_.data() + plane_ * layer; }

  /// Copy of one layer as an Image2D.
  Image2D<T> layer(int n) const {
    Image2D<T> out(w_, h_);
    const T* src = layer_data(n);
    std::copy(src, src + plane_, out.data());
    return out;
  }

  void set_layer(int n, const Image2D<T>& img) {
    std::copy(img.data(), img.data() + plane_, layer_data(n));
  }

  bool same_shape(const Stack3D& o) const { return w_ == o.w_ && h_ == o.h_ && t_ == o.t_; }

  friend bool operator==(const Stack3D& a, const Stack3D& b) {
    return a.w_ == b.w_ && a.h_ == b.h_ && a.t_ == b.t_ && a.data_ == b.data_;
  }

 private:
  int w_ = 0, h_ = 0, t_ = 0;
  std::size_t plane_ = 0;
  std::vector<T> data_;
};

using Mask = Image2D<std::uint8_t>;

inline Mask full_mask(int w, int h) { return Mask(w, h, 1); }

inline std::size_t count_set(const Mask& m) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < m.size(); ++i) n += m.data()[i] ? 1 : 0;
  return n;
}

}  // namespace lumen
