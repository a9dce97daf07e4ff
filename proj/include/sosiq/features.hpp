#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "sosiq/csv.hpp"
#include "sosiq/error.hpp"
#include "sosiq/similarity.hpp"

namespace sosiq {

enum class FeatureKind { kMd, kH };

inline std::string to_string(FeatureKind k) {
  return k == FeatureKind::kMd ? "md" : "h";
}

inline FeatureKind feature_kind_from_string(const std::string& s) {
  if (s == "md") return FeatureKind::kMd;
  if (s == "h") return FeatureKind::kH;
  throw ParamError("unknown feature kind '" + s + "' (expected md or h)");
}

inline size_t feature_dim(FeatureKind k) {
  return k == FeatureKind::kMd ? 16 : 80;
}

inline double lsm_mean(const LocalSimilarityMap& m) {
  if (m.values.size() == 0) throw DimensionError("lsm_mean: empty map");
  double sum = 0.0;
  for (double v : m.values.data()) sum += v;
  return sum / static_cast<double>(m.values.size());
}

// Population (1/N) standard deviation.
inline double lsm_std(const LocalSimilarityMap& m) {
  if (m.values.size() == 0) throw DimensionError("lsm_std: empty map");
  const double mu = lsm_mean(m);
  double acc = 0.0;
  for (double v : m.values.data()) {
    const double d = v - mu;
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(m.values.size()));
}

struct Histogram10 {
  std::array<double, 10> bins{};
};

// Normalized 10-bin histogram with step 0.1; the last bin is closed at 1.0
// so the ubiquitous value 1 is counted.
inline Histogram10 lsm_histogram(const LocalSimilarityMap& m) {
  if (m.values.size() == 0) throw DimensionError("lsm_histogram: empty map");
  Histogram10 h;
  for (double v : m.values.data()) {
    if (!(v >= 0.0 && v <= 1.0))
      throw RangeError("lsm_histogram: value outside [0, 1], upstream map "
                       "was not clamped");
    int idx = static_cast<int>(v * 10.0);
    if (idx > 9) idx = 9;
    h.bins[idx] += 1.0;
  }
  const double n = static_cast<double>(m.values.size());
  for (double& b : h.bins) b /= n;
  return h;
}

struct SosFeatureVector {
  FeatureKind kind;
  SimilarityFn similarity_fn;
  std::vector<double> values;  // 16 for MD, 80 for H
};

// SOS feature extraction: the 8 LSMs reduced to either mean/std pairs
// (MD, 16-dim) or concatenated 10-bin histograms (H, 80-dim), in canonical
// LSM order.
inline SosFeatureVector extract_features(const GrayImage& img,
                                         FeatureKind kind, SimilarityFn fn,
                                         const LsmConfig& cfg = {}) {
  const std::vector<LocalSimilarityMap> maps = compute_all_lsms(img, fn, cfg);
  SosFeatureVector out{kind, fn, {}};
  out.values.reserve(feature_dim(kind));
  for (const LocalSimilarityMap& m : maps) {
    if (kind == FeatureKind::kMd) {
      out.values.push_back(lsm_mean(m));
      out.values.push_back(lsm_std(m));
    } else {
      const Histogram10 h = lsm_histogram(m);
      out.values.insert(out.values.end(), h.bins.begin(), h.bins.end());
    }
  }
  return out;
}

// Feature matrix CSV: header image_id,f0,...,f{d-1}; one row per image with
// values at 17 significant digits.
struct FeatureRow {
  std::string image_id;
  std::vector<double> values;
};

inline void write_feature_csv(const std::string& path,
                              const std::vector<FeatureRow>& rows,
                              size_t dim) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create feature CSV: " + path);
  out << "image_id";
  for (size_t i = 0; i < dim; ++i) out << ",f" << i;
  out << "\n";
  for (const FeatureRow& r : rows) {
    if (r.values.size() != dim)
      throw DimensionError("feature row width mismatch for " + r.image_id);
    out << r.image_id;
    for (double v : r.values) out << "," << format_double(v);
    out << "\n";
  }
  if (!out) throw IoError("failed writing feature CSV: " + path);
}

inline std::vector<FeatureRow> read_feature_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  if (t.header.empty() || t.header[0] != "image_id")
    throw ParseError("feature CSV " + path + " must start with image_id");
  const size_t dim = t.header.size() - 1;
  std::vector<FeatureRow> rows;
  rows.reserve(t.rows.size());
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const auto& cells = t.rows[i];
    if (cells.size() != dim + 1)
      throw ParseError("feature CSV " + path + " row " + std::to_string(i + 2) +
                       ": expected " + std::to_string(dim + 1) + " fields");
    FeatureRow r;
    r.image_id = cells[0];
    r.values.reserve(dim);
    for (size_t j = 1; j < cells.size(); ++j)
      r.values.push_back(
          parse_double(cells[j], path + " row " + std::to_string(i + 2)));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace sosiq
