#ifndef ROUGHLAB_LIFT_HPP
#define ROUGHLAB_LIFT_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>

#include "roughlab/path.hpp"
#include "roughlab/variation.hpp"

namespace roughlab {

/// First- and second-level increments of a piecewise-linear path, in prefix
/// form: prefix2(j) = int_0^{t_j} (w(u) - w(0)) (x) dw(u), integrated segment
/// by segment in closed form. Pair values come out of Chen recombination in
/// O(1); nothing of size (points x points) is ever stored.
///
/// Storage: row j of the (points x d^2) prefix matrix is the flattened
/// prefix2(j), entry (k, l) in column k*d + l.
class RoughLift {
 public:
  explicit RoughLift(DiscretePath base) : base_(std::move(base)) {
    const int d = base_.dimension();
    const Index m = base_.segments();
    const auto& v = base_.values();
    prefix2_.resize(m + 1, d * d);
    prefix2_.row(0).setZero();
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d * d);
    for (Index k = 0; k < m; ++k) {
      const auto delta = v.row(k + 1) - v.row(k);
      // On a linear segment: int (w - w(t_k)) (x) dw = delta (x) delta / 2,
      // plus the offset term (w(t_k) - w(0)) (x) delta.
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
          acc(a * d + b) += 0.5 * delta(a) * delta(b) + v(k, a) * delta(b);
        }
      }
      prefix2_.row(k + 1) = acc;
    }
  }

  const DiscretePath& base() const { return base_; }
  int dimension() const { return base_.dimension(); }
  int level() const { return base_.level(); }
  Index segments() const { return base_.segments(); }

  /// w(t_j) - w(t_i).
  Eigen::RowVectorXd level1(Index i, Index j) const {
    check_pair(i, j);
    return base_.point(j) - base_.point(i);
  }

  /// Second level over [t_i, t_j] by Chen recombination:
  /// prefix2(j) - prefix2(i) - (w(t_i) - w(0)) (x) (w(t_j) - w(t_i)).
  Eigen::MatrixXd level2(Index i, Index j) const {
    check_pair(i, j);
    const int d = dimension();
    Eigen::MatrixXd out(d, d);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) out(a, b) = level2_entry_unchecked(i, j, a, b);
    }
    return out;
  }

  double level2_entry(Index i, Index j, int a, int b) const {
    check_pair(i, j);
    return level2_entry_unchecked(i, j, a, b);
  }

  /// Scalar table of one second-level component; borrows this lift.
  auto level2_table(int a, int b) const {
    const int d = dimension();
    const double* prefix = prefix2_.col(a * d + b).data();
    const double* wa = base_.coord_data(a);
    const double* wb = base_.coord_data(b);
    return make_table(segments(), [prefix, wa, wb](Index i, Index j) {
      return prefix[j] - prefix[i] - wa[i] * (wb[j] - wb[i]);
    });
  }

 private:
  void check_pair(Index i, Index j) const {
    if (i < 0 || j > segments() || i > j) {
      throw std::invalid_argument("RoughLift: need 0 <= i <= j <= 2^N");
    }
  }
  double level2_entry_unchecked(Index i, Index j, int a, int b) const {
    const int d = dimension();
    return prefix2_(j, a * d + b) - prefix2_(i, a * d + b) -
           base_.values()(i, a) * (base_.values()(j, b) - base_.values()(i, b));
  }

  DiscretePath base_;
  Eigen::MatrixXd prefix2_;
};

inline RoughLift lift(const DiscretePath& w) { return RoughLift(w); }

/// Lift of the difference path w - h. By the translation identity the second
/// level of w - h, the cross integrals against h and the lift of w determine
/// each other; tests check that identity, the construction here is direct.
inline RoughLift subtract(const RoughLift& lifted, const DiscretePath& h) {
  require_same_shape(lifted.base(), h, "subtract");
  return RoughLift(lifted.base() - h);
}

/// Prefix representation of the Stieltjes cross integral
/// C(s, t) = int_s^t (x(u) - x(s)) (x) dz(u) of two piecewise-linear paths
/// on a common grid. Entry (k, l) of the d x m matrix sits in column k*m + l.
class CrossIntegral {
 public:
  CrossIntegral(DiscretePath x, DiscretePath z)
      : x_(std::move(x)), z_(std::move(z)) {
    if (x_.level() != z_.level()) {
      throw std::invalid_argument("CrossIntegral: paths live on different levels");
    }
    const int d = x_.dimension();
    const int m = z_.dimension();
    const Index n = x_.segments();
    prefix_.resize(n + 1, d * m);
    prefix_.row(0).setZero();
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d * m);
    for (Index k = 0; k < n; ++k) {
      for (int a = 0; a < d; ++a) {
        const double dx = x_.values()(k + 1, a) - x_.values()(k, a);
        for (int b = 0; b < m; ++b) {
          const double dz = z_.values()(k + 1, b) - z_.values()(k, b);
          acc(a * m + b) += 0.5 * dx * dz + x_.values()(k, a) * dz;
        }
      }
      prefix_.row(k + 1) = acc;
    }
  }

  const DiscretePath& first() const { return x_; }
  const DiscretePath& second() const { return z_; }
  Index segments() const { return x_.segments(); }
  int rows() const { return x_.dimension(); }
  int cols() const { return z_.dimension(); }

  Eigen::MatrixXd value(Index i, Index j) const {
    check_pair(i, j);
    const int d = rows();
    const int m = cols();
    Eigen::MatrixXd out(d, m);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < m; ++b) {
        out(a, b) = prefix_(j, a * m + b) - prefix_(i, a * m + b) -
                    x_.values()(i, a) * (z_.values()(j, b) - z_.values()(i, b));
      }
    }
    return out;
  }

  auto component_table(int a, int b) const {
    const int m = cols();
    const double* prefix = prefix_.col(a * m + b).data();
    const double* xa = x_.coord_data(a);
    const double* zb = z_.coord_data(b);
    return make_table(segments(), [prefix, xa, zb](Index i, Index j) {
      return prefix[j] - prefix[i] - xa[i] * (zb[j] - zb[i]);
    });
  }

 private:
  void check_pair(Index i, Index j) const {
    if (i < 0 || j > segments() || i > j) {
      throw std::invalid_argument("CrossIntegral: need 0 <= i <= j <= 2^N");
    }
  }

  DiscretePath x_, z_;
  Eigen::MatrixXd prefix_;
};

inline CrossIntegral cross(const DiscretePath& x, const DiscretePath& z) {
  return CrossIntegral(x, z);
}

// ---- Norms of lifts and cross integrals (coordinate-wise maxima). ----

inline double level1_norm(const RoughLift& lifted, double p) {
  return level1_norm(lifted.base(), p);
}

inline double level2_norm(const RoughLift& lifted, double p) {
  const int d = lifted.dimension();
  double worst = 0.0;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      worst = std::max(worst,
                       detail::qvar_dp_pow(lifted.level2_table(a, b).at,
                                           lifted.segments(), p / 2.0));
    }
  }
  return std::pow(worst, 2.0 / p);
}

inline double cp_norm(const RoughLift& lifted, double p) {
  return std::max(level1_norm(lifted, p), level2_norm(lifted, p));
}

/// ||C||_{p/2}: max over entries of the (p/2)-variation.
inline double cross_norm(const CrossIntegral& c, double p) {
  double worst = 0.0;
  for (int a = 0; a < c.rows(); ++a) {
    for (int b = 0; b < c.cols(); ++b) {
      worst = std::max(worst, detail::qvar_dp_pow(c.component_table(a, b).at,
                                                  c.segments(), p / 2.0));
    }
  }
  return std::pow(worst, 2.0 / p);
}

/// ||a - b||_{C^p} on the two-parameter difference tables: the p-variation
/// norm of (a_1 - b_1, a_2 - b_2). This is not the same number as
/// cp_norm(subtract(a, base of b)); both are meaningful and both exposed.
inline double rough_distance(const RoughLift& a, const RoughLift& b, double p) {
  require_same_shape(a.base(), b.base(), "rough_distance");
  const Index last = a.segments();
  const int d = a.dimension();
  double worst1 = 0.0;
  {
    const DiscretePath diff = a.base() - b.base();
    for (int k = 0; k < d; ++k) {
      worst1 = std::max(worst1, increments_qvar_pow(diff.coord_data(k), last, p));
    }
  }
  double worst2 = 0.0;
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      const auto ta = a.level2_table(k, l);
      const auto tb = b.level2_table(k, l);
      worst2 = std::max(
          worst2, detail::qvar_dp_pow(
                      [&ta, &tb](Index i, Index j) { return ta.at(i, j) - tb.at(i, j); },
                      last, p / 2.0));
    }
  }
  return std::max(std::pow(worst1, 1.0 / p), std::pow(worst2, 2.0 / p));
}

}  // namespace roughlab

#endif  // ROUGHLAB_LIFT_HPP
