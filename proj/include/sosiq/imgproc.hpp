#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "sosiq/error.hpp"
#include "sosiq/grid.hpp"
#include "sosiq/image.hpp"

namespace sosiq {

// Integer translation by dm rows and dn columns.
struct Translation {
  int dm = 0;
  int dn = 0;

  Translation() = default;
  Translation(int dm_, int dn_) : dm(dm_), dn(dn_) {
    if (std::abs(dm) > 2 || std::abs(dn) > 2)
      throw ParamError("translation offsets are limited to magnitude 2");
  }
};

// Truncated, renormalized 2-D Gaussian. taps = outer product of the
// normalized 1-D profile, so taps_1d is an exact separable factorization.
struct GaussianKernel {
  double scale = 0.0;
  int radius = 0;
  Grid<double> taps;           // (2*radius+1)^2, sums to 1
  std::vector<double> taps_1d; // length 2*radius+1, sums to 1
};

inline GaussianKernel gaussian_kernel(double s) {
  if (!std::isfinite(s) || s <= 0.0)
    throw ParamError("gaussian scale must be positive and finite");
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * s)));
  const int side = 2 * radius + 1;

  std::vector<double> raw(side);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * s * s));
    raw[i + radius] = v;
    sum += v;
  }
  for (double& v : raw) v /= sum;

  Grid<double> taps(side, side);
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) taps.at(r, c) = raw[r] * raw[c];

  return GaussianKernel{s, radius, std::move(taps), std::move(raw)};
}

// Truncated Laplacian-of-Gaussian with the mean subtracted, so the taps sum
// to zero and a constant image yields an identically zero response.
struct LogKernel {
  double scale = 0.0;
  int radius = 0;
  Grid<double> taps;
};

inline LogKernel log_kernel(double s) {
  if (!std::isfinite(s) || s <= 0.0)
    throw ParamError("LOG scale must be positive and finite");
  const int radius = std::max(2, static_cast<int>(std::ceil(4.0 * s)));
  const int side = 2 * radius + 1;

  Grid<double> taps(side, side);
  double sum = 0.0;
  const double s2 = s * s;
  for (int r = -radius; r <= radius; ++r) {
    for (int c = -radius; c <= radius; ++c) {
      double q = (static_cast<double>(r) * r + static_cast<double>(c) * c) /
                 (2.0 * s2);
      double v = -(1.0 / (std::numbers::pi * s2 * s2)) * (1.0 - q) *
                 std::exp(-q);
      taps.at(r + radius, c + radius) = v;
      sum += v;
    }
  }
  const double mean = sum / (static_cast<double>(side) * side);
  for (double& v : taps.data()) v -= mean;

  return LogKernel{s, radius, std::move(taps)};
}

// 1-D correlation along rows (axis=0) or columns (axis=1) with mirror
// boundary. taps length must be odd.
inline Grid<double> correlate_1d(const Grid<double>& in,
                                 const std::vector<double>& taps, int axis) {
  const int radius = static_cast<int>(taps.size() / 2);
  const int w = in.width(), h = in.height();
  Grid<double> out(w, h);
  if (axis == 0) {  // along columns: offset moves over rows
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k)
          acc += taps[k + radius] * in.at(mirror_index(r + k, h), c);
        out.at(r, c) = acc;
      }
    }
  } else {
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k)
          acc += taps[k + radius] * in.at(r, mirror_index(c + k, w));
        out.at(r, c) = acc;
      }
    }
  }
  return out;
}

// Full 2-D correlation with mirror boundary.
inline Grid<double> correlate_2d(const Grid<double>& in,
                                 const Grid<double>& taps) {
  const int radius = taps.width() / 2;
  const int w = in.width(), h = in.height();
  Grid<double> out(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int kr = -radius; kr <= radius; ++kr) {
        const int rr = mirror_index(r + kr, h);
        for (int kc = -radius; kc <= radius; ++kc)
          acc += taps.at(kr + radius, kc + radius) *
                 in.at(rr, mirror_index(c + kc, w));
      }
      out.at(r, c) = acc;
    }
  }
  return out;
}

// Gaussian smoothing on a raw grid; the separable pass equals the 2-D
// correlation with the outer-product taps.
inline Grid<double> smooth_grid(const Grid<double>& g,
                                const GaussianKernel& kernel) {
  Grid<double> tmp = correlate_1d(g, kernel.taps_1d, 0);
  return correlate_1d(tmp, kernel.taps_1d, 1);
}

inline GrayImage smooth(const GrayImage& img, const GaussianKernel& kernel) {
  return GrayImage::from_grid_clamped(smooth_grid(img.grid(), kernel));
}

// Output pixel (r, c) reads input (r - dm, c - dn); out-of-range reads use
// the same mirror extension as the filters.
inline GrayImage translate(const GrayImage& img, const Translation& t) {
  const int w = img.width(), h = img.height();
  Grid<double> out(w, h);
  for (int r = 0; r < h; ++r) {
    const int sr = mirror_index(r - t.dm, h);
    for (int c = 0; c < w; ++c)
      out.at(r, c) = img.at(sr, mirror_index(c - t.dn, w));
  }
  return GrayImage::from_grid_clamped(std::move(out));
}

inline Grid<double> log_response(const GrayImage& img, double s) {
  LogKernel k = log_kernel(s);
  return correlate_2d(img.grid(), k.taps);
}

// Boolean edge mask from sign changes of a LOG response.
struct EdgeMap {
  Grid<uint8_t> bits;
  int width() const { return bits.width(); }
  int height() const { return bits.height(); }
  bool at(int r, int c) const { return bits.at(r, c) != 0; }
};

// A pixel is an edge iff its response and its right or bottom neighbour have
// strictly opposite signs. Zeros never produce edges.
inline EdgeMap zero_crossings(const Grid<double>& resp) {
  const int w = resp.width(), h = resp.height();
  if (w < 2 || h < 2)
    throw DimensionError("zero_crossings needs at least a 2x2 response");
  Grid<uint8_t> bits(w, h, 0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double v = resp.at(r, c);
      bool edge = false;
      if (c + 1 < w && v * resp.at(r, c + 1) < 0.0) edge = true;
      if (!edge && r + 1 < h && v * resp.at(r + 1, c) < 0.0) edge = true;
      bits.at(r, c) = edge ? 1 : 0;
    }
  }
  return EdgeMap{std::move(bits)};
}

}  // namespace sosiq
