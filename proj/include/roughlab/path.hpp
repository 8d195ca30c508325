#ifndef ROUGHLAB_PATH_HPP
#define ROUGHLAB_PATH_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "roughlab/rng.hpp"

namespace roughlab {

using Index = Eigen::Index;

/// A d-dimensional path sampled on the dyadic grid {k * 2^-N : 0 <= k <= 2^N},
/// interpreted as piecewise linear between grid points. All paths start at the
/// origin. Values are immutable after construction.
class DiscretePath {
 public:
  static constexpr int kMaxLevel = 26;

  /// Zero path of the given shape.
  DiscretePath(int dimension, int level)
      : level_(validate_level(level)),
        values_(Eigen::MatrixXd::Zero((Index(1) << level_) + 1,
                                      validate_dimension(dimension))) {}

  /// Wraps explicit grid values; rows are grid points, columns coordinates.
  DiscretePath(int level, Eigen::MatrixXd values)
      : level_(validate_level(level)), values_(std::move(values)) {
    if (values_.cols() < 1) {
      throw std::invalid_argument("DiscretePath: dimension must be >= 1");
    }
    if (values_.rows() != points()) {
      throw std::invalid_argument(
          "DiscretePath: expected 2^level + 1 rows, got " +
          std::to_string(values_.rows()));
    }
    if (!values_.row(0).isZero(0.0)) {
      throw std::invalid_argument("DiscretePath: paths must start at 0");
    }
  }

  int dimension() const { return static_cast<int>(values_.cols()); }
  int level() const { return level_; }
  Index segments() const { return Index(1) << level_; }
  Index points() const { return segments() + 1; }
  double dt() const { return std::ldexp(1.0, -level_); }
  double time_at(Index k) const { return std::ldexp(double(k), -level_); }

  const Eigen::MatrixXd& values() const { return values_; }
  auto point(Index k) const { return values_.row(k); }
  /// Contiguous storage of one coordinate (values are column-major).
  const double* coord_data(int k) const { return values_.col(k).data(); }

 private:
  static int validate_level(int level) {
    if (level < 0 || level > kMaxLevel) {
      throw std::invalid_argument("DiscretePath: level out of range [0, " +
                                  std::to_string(kMaxLevel) + "]");
    }
    return level;
  }
  static int validate_dimension(int d) {
    if (d < 1) throw std::invalid_argument("DiscretePath: dimension must be >= 1");
    return d;
  }

  int level_;
  Eigen::MatrixXd values_;
};

/// Brownian path at level N: increments are i.i.d. N(0, 2^-N I_d).
/// Normals are consumed grid-point by grid-point, coordinate-major within a
/// point, so a path is a pure function of the stream state.
inline DiscretePath sample_brownian(int dimension, int level, RngStream& rng) {
  if (dimension < 1) throw std::invalid_argument("sample_brownian: dimension must be >= 1");
  DiscretePath shape(dimension, level);  // validates level
  const Index m = shape.segments();
  const double step = std::sqrt(shape.dt());
  Eigen::MatrixXd values(m + 1, dimension);
  values.row(0).setZero();
  for (Index k = 1; k <= m; ++k) {
    for (int j = 0; j < dimension; ++j) {
      values(k, j) = values(k - 1, j) + step * rng.normal();
    }
  }
  return DiscretePath(level, std::move(values));
}

/// Dyadic polygonal approximation: linear interpolation of w through the
/// points k / 2^n, returned on w's own grid. Grid times are exact dyadics,
/// so interpolation weights are exact and projection at level N is the
/// identity bit for bit.
inline DiscretePath dyadic_project(const DiscretePath& w, int n) {
  if (n < 0 || n > w.level()) {
    throw std::invalid_argument("dyadic_project: need 0 <= n <= level of the path");
  }
  const int shift = w.level() - n;
  if (shift == 0) return w;
  const Index stride = Index(1) << shift;
  const double inv = std::ldexp(1.0, -shift);
  Eigen::MatrixXd out(w.points(), w.dimension());
  for (Index j = 0; j < w.points(); ++j) {
    Index k = j >> shift;
    if (k == (Index(1) << n)) --k;  // top endpoint
    const double frac = double(j - k * stride) * inv;
    out.row(j) = w.point(k * stride) +
                 frac * (w.point((k + 1) * stride) - w.point(k * stride));
  }
  return DiscretePath(w.level(), std::move(out));
}

/// Cameron-Martin norm of the piecewise-linear interpolant:
/// (sum_k |dh_k|^2 * 2^N)^(1/2).
inline double cm_norm(const DiscretePath& h) {
  const Index m = h.segments();
  const double sq = (h.values().bottomRows(m) - h.values().topRows(m)).squaredNorm();
  return std::sqrt(sq * double(m));
}

inline void require_same_shape(const DiscretePath& a, const DiscretePath& b,
                               const char* who) {
  if (a.level() != b.level()) {
    throw std::invalid_argument(std::string(who) + ": paths live on different levels");
  }
  if (a.dimension() != b.dimension()) {
    throw std::invalid_argument(std::string(who) + ": paths have different dimensions");
  }
}

inline DiscretePath operator+(const DiscretePath& a, const DiscretePath& b) {
  require_same_shape(a, b, "path sum");
  return DiscretePath(a.level(), a.values() + b.values());
}

inline DiscretePath operator-(const DiscretePath& a, const DiscretePath& b) {
  require_same_shape(a, b, "path difference");
  return DiscretePath(a.level(), a.values() - b.values());
}

inline DiscretePath operator*(double c, const DiscretePath& a) {
  return DiscretePath(a.level(), c * a.values());
}

/// Stacks coordinates of two paths on a common grid: (a, b) in R^{da+db}.
inline DiscretePath concat_dims(const DiscretePath& a, const DiscretePath& b) {
  if (a.level() != b.level()) {
    throw std::invalid_argument("concat_dims: paths live on different levels");
  }
  Eigen::MatrixXd values(a.points(), a.dimension() + b.dimension());
  values.leftCols(a.dimension()) = a.values();
  values.rightCols(b.dimension()) = b.values();
  return DiscretePath(a.level(), std::move(values));
}

// ---- CSV serialization: header "t,x1,...,xd", one row per grid point, ----
// ---- %.17g so values round-trip losslessly.                           ----

inline void write_csv(const DiscretePath& path, std::ostream& os) {
  os << "t";
  for (int j = 1; j <= path.dimension(); ++j) os << ",x" << j;
  os << "\n";
  char buf[32];
  for (Index k = 0; k < path.points(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", path.time_at(k));
    os << buf;
    for (int j = 0; j < path.dimension(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", path.values()(k, j));
      os << ',' << buf;
    }
    os << "\n";
  }
}

inline void write_csv(const DiscretePath& path, const std::string& file) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("write_csv: cannot open " + file);
  write_csv(path, os);
}

inline DiscretePath read_csv(std::istream& is, const std::string& name = "<stream>") {
  std::string line;
  if (!std::getline(is, line)) {
    throw std::runtime_error("read_csv: " + name + " is empty");
  }
  std::vector<Eigen::RowVectorXd> rows;
  int cols = -1;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> parsed;
    while (std::getline(ss, cell, ',')) parsed.push_back(std::stod(cell));
    if (parsed.size() < 2) {
      throw std::runtime_error("read_csv: " + name + ": need t plus >= 1 coordinate");
    }
    if (cols == -1) {
      cols = static_cast<int>(parsed.size()) - 1;
    } else if (static_cast<int>(parsed.size()) - 1 != cols) {
      throw std::runtime_error("read_csv: " + name + ": ragged rows");
    }
    Eigen::RowVectorXd row(cols);
    for (int j = 0; j < cols; ++j) row(j) = parsed[j + 1];
    rows.push_back(std::move(row));
  }
  const Index npoints = static_cast<Index>(rows.size());
  if (npoints < 2 || ((npoints - 1) & (npoints - 2)) != 0) {
    throw std::runtime_error("read_csv: " + name + ": row count must be 2^N + 1");
  }
  int level = 0;
  while ((Index(1) << level) + 1 != npoints) ++level;
  Eigen::MatrixXd values(npoints, cols);
  for (Index k = 0; k < npoints; ++k) values.row(k) = rows[k];
  return DiscretePath(level, std::move(values));
}

inline DiscretePath read_csv(const std::string& file) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("read_csv: cannot open " + file);
  return read_csv(is, file);
}

}  // namespace roughlab

#endif  // ROUGHLAB_PATH_HPP
