#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sosiq/error.hpp"
#include "sosiq/grid.hpp"
#include "sosiq/image.hpp"
#include "sosiq/imgproc.hpp"

namespace sosiq {

enum class SimilarityFn { kSsim, kRnse, kMse };

inline std::string to_string(SimilarityFn fn) {
  switch (fn) {
    case SimilarityFn::kSsim: return "ssim";
    case SimilarityFn::kRnse: return "rnse";
    case SimilarityFn::kMse: return "mse";
  }
  return "?";
}

inline SimilarityFn similarity_fn_from_string(const std::string& s) {
  if (s == "ssim") return SimilarityFn::kSsim;
  if (s == "rnse") return SimilarityFn::kRnse;
  if (s == "mse") return SimilarityFn::kMse;
  throw ParamError("unknown similarity function '" + s +
                   "' (expected ssim, rnse or mse)");
}

// The fixed self-similarity reference set: four translations, then four
// Gaussian smoothings in ascending scale.
inline constexpr std::array<std::pair<int, int>, 4> kIntraOffsets = {
    {{0, 1}, {1, 0}, {1, 1}, {-1, 1}}};
inline constexpr std::array<double, 4> kInterScales = {0.5, 1.0, 2.0, 4.0};

enum class RefKind { kIntra, kInter };

struct ReferenceEntry {
  GrayImage image;
  RefKind kind;
  Translation shift;  // valid for kIntra
  double scale = 0.0; // valid for kInter
};

struct ReferenceSet {
  std::array<ReferenceEntry, 8> entries;
};

inline ReferenceSet build_reference_set(const GrayImage& img) {
  ReferenceSet set;
  for (size_t i = 0; i < kIntraOffsets.size(); ++i) {
    Translation t(kIntraOffsets[i].first, kIntraOffsets[i].second);
    set.entries[i] = ReferenceEntry{translate(img, t), RefKind::kIntra, t, 0.0};
  }
  for (size_t i = 0; i < kInterScales.size(); ++i) {
    const double s = kInterScales[i];
    set.entries[4 + i] = ReferenceEntry{smooth(img, gaussian_kernel(s)),
                                        RefKind::kInter, Translation(), s};
  }
  return set;
}

struct SsimParams {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  double c2 = (0.03 * 255.0) * (0.03 * 255.0);
  double c3 = (0.03 * 255.0) * (0.03 * 255.0) / 2.0;
  double window_scale = 0.5;
};

struct RnseParams {
  double log_scale = 0.5;
  int window = 15;  // odd side of the local counting square
};

struct LocalSimilarityMap {
  Grid<double> values;
  double lo = 0.0;
  double hi = 1.0;

  int width() const { return values.width(); }
  int height() const { return values.height(); }
};

namespace detail {

inline double apply_exponent(double v, double e) {
  if (e == 1.0) return v;
  return std::pow(std::max(v, 0.0), e);
}

}  // namespace detail

// Per-pixel luminance * contrast * structure similarity under a Gaussian
// window of scale p.window_scale (mirror boundary), clamped into [0, 1].
inline LocalSimilarityMap ssim_lsm(const GrayImage& I, const GrayImage& R,
                                   const SsimParams& p) {
  require_same_shape(I, R, "ssim_lsm");
  if (p.window_scale <= 0.0 || !std::isfinite(p.window_scale))
    throw ParamError("SSIM window scale must be positive");

  const GaussianKernel win = gaussian_kernel(p.window_scale);
  const int w = I.width(), h = I.height();

  Grid<double> ii(w, h), rr(w, h), ir(w, h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const double a = I.at(r, c), b = R.at(r, c);
      ii.at(r, c) = a * a;
      rr.at(r, c) = b * b;
      ir.at(r, c) = a * b;
    }

  const Grid<double> mu_i = smooth_grid(I.grid(), win);
  const Grid<double> mu_r = smooth_grid(R.grid(), win);
  const Grid<double> e_ii = smooth_grid(ii, win);
  const Grid<double> e_rr = smooth_grid(rr, win);
  const Grid<double> e_ir = smooth_grid(ir, win);

  Grid<double> out(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double mi = mu_i.at(r, c), mr = mu_r.at(r, c);
      const double var_i = std::max(0.0, e_ii.at(r, c) - mi * mi);
      const double var_r = std::max(0.0, e_rr.at(r, c) - mr * mr);
      const double cov = e_ir.at(r, c) - mi * mr;
      const double si = std::sqrt(var_i), sr = std::sqrt(var_r);

      const double lum = (2.0 * mi * mr + p.c1) / (mi * mi + mr * mr + p.c1);
      const double con = (2.0 * si * sr + p.c2) / (var_i + var_r + p.c2);
      const double str = (cov + p.c3) / (si * sr + p.c3);

      double v = detail::apply_exponent(lum, p.alpha) *
                 detail::apply_exponent(con, p.beta) *
                 detail::apply_exponent(str, p.gamma);
      out.at(r, c) = std::clamp(v, 0.0, 1.0);
    }
  }
  return LocalSimilarityMap{std::move(out), 0.0, 1.0};
}

// Windowed edge-agreement counting core, shared so callers can reuse
// precomputed edge maps.
inline LocalSimilarityMap rnse_lsm_from_edges(const EdgeMap& ei,
                                              const EdgeMap& er, int window) {
  const int w = ei.width(), h = ei.height();
  if (er.width() != w || er.height() != h)
    throw DimensionError("rnse_lsm: edge map dimensions differ");

  // Summed-area tables, (h+1) x (w+1) with a zero first row/column.
  auto build_sat = [&](auto&& pred) {
    Grid<int32_t> sat(w + 1, h + 1, 0);
    for (int r = 0; r < h; ++r) {
      int32_t rowsum = 0;
      for (int c = 0; c < w; ++c) {
        rowsum += pred(r, c) ? 1 : 0;
        sat.at(r + 1, c + 1) = sat.at(r, c + 1) + rowsum;
      }
    }
    return sat;
  };
  const Grid<int32_t> si = build_sat([&](int r, int c) { return ei.at(r, c); });
  const Grid<int32_t> sr = build_sat([&](int r, int c) { return er.at(r, c); });
  const Grid<int32_t> sb = build_sat(
      [&](int r, int c) { return ei.at(r, c) && er.at(r, c); });

  auto window_sum = [&](const Grid<int32_t>& sat, int r0, int r1, int c0,
                        int c1) {
    return sat.at(r1 + 1, c1 + 1) - sat.at(r0, c1 + 1) - sat.at(r1 + 1, c0) +
           sat.at(r0, c0);
  };

  const int radius = window / 2;
  Grid<double> out(w, h);
  for (int r = 0; r < h; ++r) {
    const int r0 = std::max(0, r - radius), r1 = std::min(h - 1, r + radius);
    for (int c = 0; c < w; ++c) {
      const int c0 = std::max(0, c - radius), c1 = std::min(w - 1, c + radius);
      const int32_t n_i = window_sum(si, r0, r1, c0, c1);
      const int32_t n_r = window_sum(sr, r0, r1, c0, c1);
      if (n_i + n_r == 0) {
        out.at(r, c) = 1.0;
      } else {
        const int32_t n_both = window_sum(sb, r0, r1, c0, c1);
        out.at(r, c) = 2.0 * n_both / (n_i + n_r);
      }
    }
  }
  return LocalSimilarityMap{std::move(out), 0.0, 1.0};
}

// Windowed edge-agreement ratio 2|E_I n E_R| / (|E_I| + |E_R|), counted in a
// square window clipped at the image borders. Windows with no edges on
// either side count as perfectly similar.
inline LocalSimilarityMap rnse_lsm(const GrayImage& I, const GrayImage& R,
                                   const RnseParams& p) {
  require_same_shape(I, R, "rnse_lsm");
  if (p.window < 5 || p.window % 2 == 0)
    throw ParamError("rNSE window must be odd and at least 5");
  if (p.log_scale <= 0.0 || !std::isfinite(p.log_scale))
    throw ParamError("rNSE LOG scale must be positive");

  const EdgeMap ei = zero_crossings(log_response(I, p.log_scale));
  const EdgeMap er = zero_crossings(log_response(R, p.log_scale));
  return rnse_lsm_from_edges(ei, er, p.window);
}

// Log-compressed squared difference, log10(1 + (I-R)^2) / 10. The maximum
// attainable value log10(1 + 255^2)/10 ~= 0.4813 keeps the map inside the
// shared [0, 1] histogram domain.
inline LocalSimilarityMap mse_lsm(const GrayImage& I, const GrayImage& R) {
  require_same_shape(I, R, "mse_lsm");
  const int w = I.width(), h = I.height();
  Grid<double> out(w, h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const double d = I.at(r, c) - R.at(r, c);
      out.at(r, c) = std::log10(1.0 + d * d) / 10.0;
    }
  return LocalSimilarityMap{std::move(out), 0.0, 1.0};
}

struct LsmConfig {
  SsimParams ssim;
  RnseParams rnse;
};

// The 8 LSMs of an image against its reference set, in canonical order.
// Intra-scale entries use scale 0.5 for the SSIM window / rNSE LOG filter;
// the inter-scale entry smoothed at s uses that same s.
inline std::vector<LocalSimilarityMap> compute_all_lsms(
    const GrayImage& img, SimilarityFn fn, const LsmConfig& cfg = {}) {
  require_pipeline_size(img, "compute_all_lsms");
  const ReferenceSet refs = build_reference_set(img);

  std::vector<LocalSimilarityMap> maps;
  maps.reserve(refs.entries.size());
  for (const ReferenceEntry& e : refs.entries) {
    const double entry_scale = e.kind == RefKind::kIntra ? 0.5 : e.scale;
    switch (fn) {
      case SimilarityFn::kSsim: {
        SsimParams p = cfg.ssim;
        p.window_scale = entry_scale;
        maps.push_back(ssim_lsm(img, e.image, p));
        break;
      }
      case SimilarityFn::kRnse: {
        RnseParams p = cfg.rnse;
        p.log_scale = entry_scale;
        maps.push_back(rnse_lsm(img, e.image, p));
        break;
      }
      case SimilarityFn::kMse:
        maps.push_back(mse_lsm(img, e.image));
        break;
    }
  }
  return maps;
}

}  // namespace sosiq
