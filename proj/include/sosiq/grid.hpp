#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "sosiq/error.hpp"

namespace sosiq {

// Dense row-major 2-D grid. (r, c) indexing: r is the row (vertical axis),
// c the column (horizontal axis).
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<size_t>(width) * static_cast<size_t>(height), fill) {
    if (width <= 0 || height <= 0)
      throw DimensionError("grid dimensions must be positive");
  }
  Grid(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width <= 0 || height <= 0)
      throw DimensionError("grid dimensions must be positive");
    if (data_.size() != static_cast<size_t>(width) * static_cast<size_t>(height))
      throw DimensionError("grid data length does not match width*height");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  size_t size() const { return data_.size(); }

  T& at(int r, int c) { return data_[static_cast<size_t>(r) * width_ + c]; }
  const T& at(int r, int c) const {
    return data_[static_cast<size_t>(r) * width_ + c];
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool same_shape(const Grid& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

// Symmetric (mirror-with-edge-repeat) index extension: -1 -> 0, -2 -> 1,
// n -> n-1, n+1 -> n-2, ... Valid for any offset, however far outside.
inline int mirror_index(int i, int n) {
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

}  // namespace sosiq
