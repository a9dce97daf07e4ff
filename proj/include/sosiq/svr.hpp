#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sosiq/csv.hpp"
#include "sosiq/error.hpp"
#include "sosiq/rng.hpp"

namespace sosiq {

using FeatureMatrix = std::vector<std::vector<double>>;

// Per-dimension affine map onto [0, 1] fitted on training data. Dimensions
// that are constant on the training set map to 0. Empty min/max means the
// identity (already-scaled inputs).
struct Scaler {
  std::vector<double> min;
  std::vector<double> max;

  bool identity() const { return min.empty(); }
};

inline Scaler fit_scaler(const FeatureMatrix& X) {
  if (X.empty()) throw DimensionError("fit_scaler: empty feature matrix");
  const size_t d = X[0].size();
  Scaler s;
  s.min.assign(d, std::numeric_limits<double>::infinity());
  s.max.assign(d, -std::numeric_limits<double>::infinity());
  for (const auto& row : X) {
    if (row.size() != d)
      throw DimensionError("fit_scaler: ragged feature matrix");
    for (size_t j = 0; j < d; ++j) {
      if (!std::isfinite(row[j]))
        throw RangeError("fit_scaler: non-finite feature value");
      s.min[j] = std::min(s.min[j], row[j]);
      s.max[j] = std::max(s.max[j], row[j]);
    }
  }
  return s;
}

inline std::vector<double> apply_scaler(const Scaler& s,
                                        const std::vector<double>& x) {
  if (s.identity()) return x;
  if (x.size() != s.min.size())
    throw DimensionError("apply_scaler: dimension mismatch");
  std::vector<double> out(x.size());
  for (size_t j = 0; j < x.size(); ++j) {
    const double span = s.max[j] - s.min[j];
    out[j] = span > 0.0 ? (x[j] - s.min[j]) / span : 0.0;
  }
  return out;
}

inline double squared_distance(const std::vector<double>& x,
                               const std::vector<double>& y) {
  if (x.size() != y.size())
    throw DimensionError("rbf: vector dimensions differ");
  double acc = 0.0;
  for (size_t j = 0; j < x.size(); ++j) {
    const double d = x[j] - y[j];
    acc += d * d;
  }
  return acc;
}

inline double rbf(const std::vector<double>& x, const std::vector<double>& y,
                  double gamma) {
  return std::exp(-gamma * squared_distance(x, y));
}

struct SvrConfig {
  double C = 1.0;
  double gamma = 1.0;
  double epsilon = 0.1;   // tube width in (scaled) target units
  double tol = 1e-3;      // KKT violation tolerance
  int max_iter = 100000;  // SMO pair updates

  // When set, the solver appends the dual objective (maximization form)
  // after every update; used by the monotonicity property test.
  std::vector<double>* objective_trace = nullptr;
};

struct SvrModel {
  FeatureMatrix support_vectors;   // scaled feature space
  std::vector<double> dual_coefs;  // alpha - alpha* per support vector
  double bias = 0.0;
  double gamma = 0.0;
  Scaler scaler;
  bool converged = true;
  double dual_objective = 0.0;  // maximization form, for diagnostics
};

namespace detail {

// epsilon-SVR dual in the signed 2n-variable form: variables t < n are
// alpha_i (sign +1), t >= n are alpha*_i (sign -1);
//   minimize 1/2 a^T Q a + p^T a,  Q_ts = z_t z_s K_ij,
//   p_t = eps - y_i (t < n), eps + y_i (t >= n),
//   s.t. z^T a = 0, 0 <= a <= C.
// Pair updates on the maximal violating pair, gradient kept incrementally.
struct SmoSolution {
  std::vector<double> beta;  // alpha - alpha*
  double bias = 0.0;
  bool converged = false;
  double objective = 0.0;  // maximization form
  int iterations = 0;
};

inline SmoSolution solve_svr_smo(const std::vector<double>& K, size_t n,
                                 const std::vector<double>& y,
                                 const SvrConfig& cfg) {
  const double C = cfg.C, eps = cfg.epsilon;
  const size_t m = 2 * n;
  std::vector<double> a(m, 0.0), G(m), p(m);
  for (size_t i = 0; i < n; ++i) {
    p[i] = eps - y[i];
    p[n + i] = eps + y[i];
  }
  G = p;
  auto sign_of = [n](size_t t) { return t < n ? 1.0 : -1.0; };
  auto row_of = [n](size_t t) { return t < n ? t : t - n; };

  auto dual_objective = [&] {
    // 1/2 a^T Q a + p^T a == 1/2 sum_t a_t (G_t + p_t)
    double obj = 0.0;
    for (size_t t = 0; t < m; ++t) obj += a[t] * (G[t] + p[t]);
    return -0.5 * obj;  // maximization form
  };

  SmoSolution sol;
  int iter = 0;
  double gap_m = 0.0, gap_M = 0.0;
  for (; iter < cfg.max_iter; ++iter) {
    // Maximal violating pair over -z_t G_t.
    double best_up = -std::numeric_limits<double>::infinity();
    double best_low = std::numeric_limits<double>::infinity();
    size_t iu = m, il = m;
    for (size_t t = 0; t < m; ++t) {
      const double z = sign_of(t);
      const double v = -z * G[t];
      const bool in_up = (z > 0.0) ? (a[t] < C) : (a[t] > 0.0);
      const bool in_low = (z > 0.0) ? (a[t] > 0.0) : (a[t] < C);
      if (in_up && v > best_up) {
        best_up = v;
        iu = t;
      }
      if (in_low && v < best_low) {
        best_low = v;
        il = t;
      }
    }
    gap_m = best_up;
    gap_M = best_low;
    if (iu == m || il == m || best_up - best_low < cfg.tol) {
      sol.converged = true;
      break;
    }

    const size_t i = iu, j = il;
    const double zi = sign_of(i), zj = sign_of(j);
    const double zz = zi * zj;
    const size_t ri = row_of(i), rj = row_of(j);
    double eta = K[ri * n + ri] + K[rj * n + rj] - 2.0 * K[ri * n + rj];
    if (eta <= 0.0) eta = 1e-12;

    // Feasible range of the step on a_i; a_j moves by -zz * delta.
    double delta = -(G[i] - zz * G[j]) / eta;
    double lo = -a[i], hi = C - a[i];
    if (zz > 0.0) {
      lo = std::max(lo, a[j] - C);
      hi = std::min(hi, a[j]);
    } else {
      lo = std::max(lo, -a[j]);
      hi = std::min(hi, C - a[j]);
    }
    delta = std::clamp(delta, lo, hi);
    if (delta == 0.0) {
      sol.converged = true;  // numerically stuck at the boundary
      break;
    }

    a[i] += delta;
    a[j] -= zz * delta;
    // Snap to exact bounds so later set membership tests stay crisp.
    if (a[i] < 1e-14) a[i] = 0.0;
    if (a[i] > C - 1e-14 * C) a[i] = std::min(a[i], C);
    if (a[j] < 1e-14) a[j] = 0.0;

    const double dj = -zz * delta;
    for (size_t t = 0; t < m; ++t) {
      const double zt = sign_of(t);
      const size_t rt = row_of(t);
      G[t] += zt * (zi * K[rt * n + ri] * delta + zj * K[rt * n + rj] * dj);
    }
    if (cfg.objective_trace) cfg.objective_trace->push_back(dual_objective());
  }

  sol.iterations = iter;
  sol.objective = dual_objective();
  sol.beta.resize(n);
  for (size_t i = 0; i < n; ++i) sol.beta[i] = a[i] - a[n + i];

  // Bias from the KKT conditions: -z_t G_t equals the bias for every free
  // variable; otherwise it is bracketed by the I_up / I_low extremes.
  double sum_free = 0.0;
  int n_free = 0;
  for (size_t t = 0; t < m; ++t) {
    if (a[t] > 0.0 && a[t] < C) {
      sum_free += -sign_of(t) * G[t];
      ++n_free;
    }
  }
  sol.bias = n_free > 0 ? sum_free / n_free : 0.5 * (gap_m + gap_M);
  return sol;
}

}  // namespace detail

// Trains an epsilon-SVR with RBF kernel on already-scaled features. The
// scaler argument is embedded in the model so predict() can take raw
// feature vectors; pass {} when inputs are in final space already.
inline SvrModel train(const FeatureMatrix& X, const std::vector<double>& y,
                      const SvrConfig& cfg, Scaler scaler = {}) {
  if (X.size() < 2) throw DimensionError("train: need at least 2 rows");
  if (X.size() != y.size())
    throw DimensionError("train: X row count and y length differ");
  if (cfg.C <= 0.0 || cfg.gamma <= 0.0 || cfg.epsilon < 0.0)
    throw ParamError("train: C and gamma must be positive, epsilon >= 0");
  const size_t n = X.size(), d = X[0].size();
  for (const auto& row : X) {
    if (row.size() != d) throw DimensionError("train: ragged feature matrix");
    for (double v : row)
      if (!std::isfinite(v)) throw RangeError("train: non-finite feature");
  }
  for (double v : y)
    if (!std::isfinite(v)) throw RangeError("train: non-finite target");

  std::vector<double> K(n * n);
  for (size_t i = 0; i < n; ++i) {
    K[i * n + i] = 1.0;
    for (size_t j = i + 1; j < n; ++j) {
      const double k = rbf(X[i], X[j], cfg.gamma);
      K[i * n + j] = k;
      K[j * n + i] = k;
    }
  }

  const detail::SmoSolution sol = detail::solve_svr_smo(K, n, y, cfg);

  SvrModel model;
  model.gamma = cfg.gamma;
  model.bias = sol.bias;
  model.scaler = std::move(scaler);
  model.converged = sol.converged;
  model.dual_objective = sol.objective;
  for (size_t i = 0; i < n; ++i) {
    if (std::abs(sol.beta[i]) > 1e-12) {
      model.support_vectors.push_back(X[i]);
      model.dual_coefs.push_back(sol.beta[i]);
    }
  }
  return model;
}

inline double predict(const SvrModel& model, const std::vector<double>& x) {
  const std::vector<double> xs = apply_scaler(model.scaler, x);
  if (!model.support_vectors.empty() &&
      xs.size() != model.support_vectors[0].size())
    throw DimensionError("predict: feature dimension mismatch");
  double acc = model.bias;
  for (size_t i = 0; i < model.support_vectors.size(); ++i)
    acc += model.dual_coefs[i] * rbf(model.support_vectors[i], xs, model.gamma);
  return acc;
}

// 2-D log-space grid for (C, gamma) with k-fold cross-validation.
struct GridSpec {
  double log2c_min = -1.0, log2c_max = 9.0, log2c_step = 2.0;
  double log2g_min = -11.0, log2g_max = 1.0, log2g_step = 2.0;
  int folds = 5;
  uint64_t seed = 0;
};

struct GridCell {
  double log2c = 0.0, log2gamma = 0.0;
  double C = 0.0, gamma = 0.0;
  double cv_rmse = 0.0;
};

struct GridSearchResult {
  double best_c = 0.0;
  double best_gamma = 0.0;
  double best_rmse = 0.0;
  std::vector<GridCell> table;
};

// Exhaustive search over the grid; candidates are visited in ascending
// (C, gamma) order and only strict improvements are kept, which makes ties
// resolve toward the smaller C, then the smaller gamma.
inline GridSearchResult grid_search(const FeatureMatrix& X,
                                    const std::vector<double>& y,
                                    const GridSpec& spec,
                                    const SvrConfig& base_cfg = {}) {
  const size_t n = X.size();
  if (spec.folds < 2) throw ParamError("grid_search: folds must be >= 2");
  if (n < static_cast<size_t>(spec.folds))
    throw DimensionError("grid_search: fewer rows than folds");
  if (spec.log2c_step <= 0.0 || spec.log2g_step <= 0.0 ||
      spec.log2c_max < spec.log2c_min || spec.log2g_max < spec.log2g_min)
    throw ParamError("grid_search: malformed grid ranges");

  // Deterministic fold assignment: seeded shuffle, then striping.
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(spec.seed);
  seeded_shuffle(order, rng);
  std::vector<int> fold_of(n);
  for (size_t i = 0; i < n; ++i)
    fold_of[order[i]] = static_cast<int>(i % spec.folds);

  // gamma only rescales the shared squared-distance matrix, so compute the
  // distances once for the whole search.
  std::vector<double> D(n * n, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      const double d2 = squared_distance(X[i], X[j]);
      D[i * n + j] = d2;
      D[j * n + i] = d2;
    }

  GridSearchResult result;
  result.best_rmse = std::numeric_limits<double>::infinity();

  const double tiny = 1e-9;
  for (double lc = spec.log2c_min; lc <= spec.log2c_max + tiny;
       lc += spec.log2c_step) {
    for (double lg = spec.log2g_min; lg <= spec.log2g_max + tiny;
         lg += spec.log2g_step) {
      const double C = std::exp2(lc), gamma = std::exp2(lg);

      double sq_sum = 0.0;
      for (int f = 0; f < spec.folds; ++f) {
        std::vector<size_t> tr, va;
        for (size_t i = 0; i < n; ++i)
          (fold_of[i] == f ? va : tr).push_back(i);
        if (tr.size() < 2 || va.empty()) continue;

        const size_t nt = tr.size();
        std::vector<double> K(nt * nt);
        std::vector<double> yt(nt);
        for (size_t i = 0; i < nt; ++i) {
          yt[i] = y[tr[i]];
          K[i * nt + i] = 1.0;
          for (size_t j = i + 1; j < nt; ++j) {
            const double k = std::exp(-gamma * D[tr[i] * n + tr[j]]);
            K[i * nt + j] = k;
            K[j * nt + i] = k;
          }
        }
        SvrConfig cfg = base_cfg;
        cfg.C = C;
        cfg.gamma = gamma;
        cfg.objective_trace = nullptr;
        const detail::SmoSolution sol = detail::solve_svr_smo(K, nt, yt, cfg);

        for (size_t v : va) {
          double pred = sol.bias;
          for (size_t i = 0; i < nt; ++i) {
            if (sol.beta[i] == 0.0) continue;
            pred += sol.beta[i] * std::exp(-gamma * D[tr[i] * n + v]);
          }
          const double r = pred - y[v];
          sq_sum += r * r;
        }
      }
      const double rmse = std::sqrt(sq_sum / static_cast<double>(n));
      result.table.push_back(GridCell{lc, lg, C, gamma, rmse});
      if (rmse < result.best_rmse) {
        result.best_rmse = rmse;
        result.best_c = C;
        result.best_gamma = gamma;
      }
    }
  }
  if (result.table.empty()) throw ParamError("grid_search: empty grid");
  return result;
}

}  // namespace sosiq
