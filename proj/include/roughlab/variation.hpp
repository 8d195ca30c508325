#ifndef ROUGHLAB_VARIATION_HPP
#define ROUGHLAB_VARIATION_HPP

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "roughlab/path.hpp"

namespace roughlab {

/// Exponent pair of the p-variation setup: 2 < p < 3 and kappa > p - 1.
struct VarParams {
  double p;
  double kappa;

  VarParams(double p_, double kappa_) : p(p_), kappa(kappa_) {
    if (!(p > 2.0 && p < 3.0)) {
      throw std::invalid_argument("VarParams: requires 2 < p < 3");
    }
    if (!(kappa > p - 1.0)) {
      throw std::invalid_argument("VarParams: requires kappa > p - 1");
    }
  }
};

/// x^q for x >= 0. Quarter-integer exponents reduce to sqrt chains, which are
/// correctly rounded and several times cheaper than std::pow; the DP below
/// spends nearly all its time here.
inline double qpow(double x, double q) {
  if (q == 2.5) return x * x * std::sqrt(x);
  if (q == 1.25) return x * std::sqrt(std::sqrt(x));
  if (q == 1.5) return x * std::sqrt(x);
  if (q == 2.0) return x * x;
  if (q == 1.0) return x;
  return std::pow(x, q);
}

/// Scalar function on grid pairs (i, j), i <= j, with eta(i, i) = 0.
/// `at` must be O(1); builders below back it with prefix sums.
template <class F>
struct TwoParamTable {
  Index last;  // grid points are 0..last
  F at;        // (Index i, Index j) -> double
};

template <class F>
TwoParamTable<std::decay_t<F>> make_table(Index last, F&& at) {
  return {last, std::forward<F>(at)};
}

namespace detail {

// V(j) = max_{i<j} V(i) + |eta(i,j)|^q over the index set 0..last.
// For tables built from piecewise-linear paths this equals the q-th power of
// the supremum over all partitions of [0,1], not just grid ones: on a linear
// segment each summand is convex in an interior partition point, so optima
// sit at grid points.
template <class F>
double qvar_dp_pow(const F& eta, Index last, double q) {
  std::vector<double> best(static_cast<std::size_t>(last) + 1);
  best[0] = 0.0;
  for (Index j = 1; j <= last; ++j) {
    double v = 0.0;
    for (Index i = 0; i < j; ++i) {
      const double c = best[static_cast<std::size_t>(i)] + qpow(std::abs(eta(i, j)), q);
      if (c > v) v = c;
    }
    best[static_cast<std::size_t>(j)] = v;
  }
  return best[static_cast<std::size_t>(last)];
}

// Same recurrence restricted to a candidate subset of grid indices.
template <class F>
double qvar_dp_pow_subset(const F& eta, const std::vector<Index>& idx, double q) {
  const std::size_t n = idx.size();
  std::vector<double> best(n);
  best[0] = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    double v = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
      const double c = best[i] + qpow(std::abs(eta(idx[i], idx[j])), q);
      if (c > v) v = c;
    }
    best[j] = v;
  }
  return best[n - 1];
}

}  // namespace detail

/// Supremum over grid partitions of (sum_i |eta(t_i, t_{i+1})|^q)^(1/q).
template <class F>
double qvar(const TwoParamTable<F>& table, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("qvar: requires q >= 1");
  return std::pow(detail::qvar_dp_pow(table.at, table.last, q), 1.0 / q);
}

/// q-variation (to the q-th power) of the increment table f(j) - f(i) of a
/// scalar sequence. Exact shortcut: for q >= 1 an optimal partition only
/// needs indices where the increment changes sign (plus the endpoints), since
/// (a+b)^q >= a^q + b^q for a, b >= 0 lets monotone interior points merge.
inline double increments_qvar_pow(const double* f, Index last, double q) {
  if (last <= 0) return 0.0;
  std::vector<Index> idx;
  idx.reserve(static_cast<std::size_t>(last) + 1);
  idx.push_back(0);
  for (Index i = 1; i < last; ++i) {
    if ((f[i] - f[i - 1]) * (f[i + 1] - f[i]) <= 0.0) idx.push_back(i);
  }
  idx.push_back(last);
  return detail::qvar_dp_pow_subset([f](Index i, Index j) { return f[j] - f[i]; },
                                    idx, q);
}

/// Level-1 p-variation norm of a path: max over coordinates of the
/// q-variation of that coordinate's increments, q = p.
inline double level1_norm(const DiscretePath& w, double p) {
  double worst = 0.0;
  for (int k = 0; k < w.dimension(); ++k) {
    worst = std::max(worst, increments_qvar_pow(w.coord_data(k), w.segments(), p));
  }
  return std::pow(worst, 1.0 / p);
}

/// max over coordinate pairs (k, l) of the (p/2)-variation of the product
/// table dx_k(s,t) * dz_l(s,t).
inline double tensor_level1_norm(const DiscretePath& x, const DiscretePath& z, double p) {
  if (x.level() != z.level()) {
    throw std::invalid_argument("tensor_level1_norm: paths live on different levels");
  }
  const Index last = x.segments();
  double worst = 0.0;
  for (int k = 0; k < x.dimension(); ++k) {
    const double* a = x.coord_data(k);
    for (int l = 0; l < z.dimension(); ++l) {
      const double* b = z.coord_data(l);
      worst = std::max(worst,
                       detail::qvar_dp_pow(
                           [a, b](Index i, Index j) { return (a[j] - a[i]) * (b[j] - b[i]); },
                           last, p / 2.0));
    }
  }
  return std::pow(worst, 2.0 / p);
}

/// Dyadic (p, kappa)-norm
///   [ sum_{n=1}^{N} n^kappa sum_{k=1}^{2^n} |z(t_k^n) - z(t_{k-1}^n)|^p ]^(1/p),
/// truncated at the path's own level N. Increments use the Euclidean norm.
inline double dyadic_norm(const DiscretePath& z, const VarParams& params) {
  double total = 0.0;
  for (int n = 1; n <= z.level(); ++n) {
    const Index stride = Index(1) << (z.level() - n);
    double level_sum = 0.0;
    for (Index k = stride; k <= z.segments(); k += stride) {
      const double sq = (z.point(k) - z.point(k - stride)).squaredNorm();
      level_sum += qpow(sq, params.p / 2.0);
    }
    total += std::pow(double(n), params.kappa) * level_sum;
  }
  return std::pow(total, 1.0 / params.p);
}

/// The domination constant C(p, kappa) = (sum_{n>=1} n^kappa 2^(-n p / 2))^(1/p)
/// with ||h||_{p,kappa} <= C(p, kappa) cm_norm(h); series summed to full
/// double precision.
inline double dyadic_domination_constant(const VarParams& params) {
  const double x = std::pow(2.0, -params.p / 2.0);
  double sum = 0.0;
  double term;
  int n = 0;
  do {
    ++n;
    term = std::pow(double(n), params.kappa) * std::pow(x, n);
    sum += term;
  } while (term > sum * 1e-18 && n < 10000);
  return std::pow(sum, 1.0 / params.p);
}

}  // namespace roughlab

#endif  // ROUGHLAB_VARIATION_HPP
