#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "sosiq/error.hpp"
#include "sosiq/grid.hpp"

namespace sosiq {

// The local windows of the similarity stage need at least this much support.
inline constexpr int kMinPipelineSide = 16;

// 2-D luminance grid. Values are kept as reals in [0, 255] through the whole
// pipeline; nothing is requantized to 8 bits after decoding.
class GrayImage {
 public:
  GrayImage() = default;

  static GrayImage from_grid(Grid<double> g) {
    for (double v : g.data()) {
      if (!std::isfinite(v) || v < 0.0 || v > 255.0)
        throw RangeError("gray image values must be finite and in [0, 255]");
    }
    return GrayImage(std::move(g));
  }

  // Same as from_grid but snaps float-epsilon overshoot back into range.
  // Filtering a valid image with a unit-sum kernel can land 1e-13 outside.
  static GrayImage from_grid_clamped(Grid<double> g) {
    for (double& v : g.data()) {
      if (!std::isfinite(v))
        throw RangeError("gray image values must be finite");
      if (v < 0.0) v = 0.0;
      if (v > 255.0) v = 255.0;
    }
    return GrayImage(std::move(g));
  }

  int width() const { return pixels_.width(); }
  int height() const { return pixels_.height(); }
  double at(int r, int c) const { return pixels_.at(r, c); }
  const Grid<double>& grid() const { return pixels_; }

  bool meets_pipeline_minimum() const {
    return width() >= kMinPipelineSide && height() >= kMinPipelineSide;
  }

 private:
  explicit GrayImage(Grid<double> g) : pixels_(std::move(g)) {}
  Grid<double> pixels_;
};

inline void require_pipeline_size(const GrayImage& img, const std::string& op) {
  if (!img.meets_pipeline_minimum())
    throw DimensionError(op + " requires images of at least 16x16 pixels");
}

inline void require_same_shape(const GrayImage& a, const GrayImage& b,
                               const std::string& op) {
  if (a.width() != b.width() || a.height() != b.height())
    throw DimensionError(op + ": image dimensions differ");
}

}  // namespace sosiq
