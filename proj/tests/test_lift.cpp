#include <doctest.h>

#include <roughlab/lift.hpp>

#include <cmath>

using namespace roughlab;

namespace {

// Independent oracle: integrate the second level over [t_i, t_j] segment by
// segment, starting fresh at t_i instead of going through the prefix sums.
Eigen::MatrixXd direct_level2(const DiscretePath& w, Index i, Index j) {
  const int d = w.dimension();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
  for (Index k = i; k < j; ++k) {
    const Eigen::RowVectorXd delta = w.point(k + 1) - w.point(k);
    const Eigen::RowVectorXd offset = w.point(k) - w.point(i);
    acc += 0.5 * delta.transpose() * delta + offset.transpose() * delta;
  }
  return acc;
}

DiscretePath parabola(int level) {
  const Index points = (Index(1) << level) + 1;
  Eigen::MatrixXd m(points, 2);
  for (Index k = 0; k < points; ++k) {
    const double t = double(k) / double(points - 1);
    m(k, 0) = t;
    m(k, 1) = t * t;
  }
  return DiscretePath(level, m);
}

DiscretePath monomials(int level, double a, double b) {
  const Index points = (Index(1) << level) + 1;
  Eigen::MatrixXd m(points, 1);
  for (Index k = 0; k < points; ++k) {
    const double t = double(k) / double(points - 1);
    m(k, 0) = a * t + b * t * t;
  }
  return DiscretePath(level, m);
}

}  // namespace

TEST_CASE("lift of the zero path has zero levels") {
  const RoughLift lifted = lift(DiscretePath(2, 4));
  CHECK(cp_norm(lifted, 2.5) == 0.0);
  CHECK(lifted.level2(0, lifted.segments()).isZero(0.0));
}

TEST_CASE("second level of the sampled parabola approaches the closed form") {
  Eigen::MatrixXd exact(2, 2);
  exact << 0.5, 2.0 / 3.0, 1.0 / 3.0, 0.5;
  const Eigen::MatrixXd at10 = lift(parabola(10)).level2(0, Index(1) << 10);
  const Eigen::MatrixXd at12 = lift(parabola(12)).level2(0, Index(1) << 12);
  const double err10 = (at10 - exact).cwiseAbs().maxCoeff();
  const double err12 = (at12 - exact).cwiseAbs().maxCoeff();
  CHECK(err10 < std::ldexp(1.0, -10));
  CHECK(err12 < err10);
}

TEST_CASE("diagonal second-level entries are half squared increments") {
  RngStream rng(20, 0);
  const DiscretePath w = sample_brownian(3, 6, rng);
  const RoughLift lifted = lift(w);
  for (Index i = 0; i <= w.segments(); i += 5) {
    for (Index j = i; j <= w.segments(); j += 7) {
      for (int a = 0; a < 3; ++a) {
        const double inc = w.values()(j, a) - w.values()(i, a);
        CHECK(lifted.level2_entry(i, j, a, a) ==
              doctest::Approx(0.5 * inc * inc).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("symmetric part of the second level is the squared first level") {
  RngStream rng(21, 0);
  const DiscretePath w = sample_brownian(2, 6, rng);
  const RoughLift lifted = lift(w);
  for (Index i = 0; i <= w.segments(); i += 3) {
    for (Index j = i + 1; j <= w.segments(); j += 5) {
      const Eigen::MatrixXd two = lifted.level2(i, j);
      const Eigen::RowVectorXd one = lifted.level1(i, j);
      const Eigen::MatrixXd residual =
          two + two.transpose() - one.transpose() * one;
      CHECK(residual.cwiseAbs().maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("chen recombination agrees with direct segment integration") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    RngStream rng(22, s);
    const DiscretePath w = sample_brownian(2, 7, rng);
    const RoughLift lifted = lift(w);
    for (int c = 0; c < 8; ++c) {
      const Index i = static_cast<Index>(rng.uniform() * (w.segments() + 1));
      const Index j = i + static_cast<Index>(rng.uniform() * (w.segments() + 1 - i));
      const Eigen::MatrixXd residual = lifted.level2(i, j) - direct_level2(w, i, j);
      CHECK(residual.cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  RngStream rng(23, 0);
  const RoughLift lifted = lift(sample_brownian(2, 4, rng));
  CHECK(lifted.level2(3, 3).isZero(0.0));
  CHECK(lifted.level2(0, lifted.segments()).isApprox(
      direct_level2(lifted.base(), 0, lifted.segments()), 1e-13));
  CHECK_THROWS_AS(lifted.level2(5, 4), std::invalid_argument);
}

TEST_CASE("chen identity over all grid triples at small levels") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    RngStream rng(24, s);
    const DiscretePath w = sample_brownian(2, 5, rng);
    const RoughLift lifted = lift(w);
    const Index m = w.segments();
    double worst = 0.0;
    for (Index i = 0; i <= m; ++i) {
      for (Index j = i; j <= m; ++j) {
        for (Index k = j; k <= m; ++k) {
          const Eigen::MatrixXd res = lifted.level2(i, k) - lifted.level2(i, j) -
                                      lifted.level2(j, k) -
                                      lifted.level1(i, j).transpose() * lifted.level1(j, k);
          worst = std::max(worst, res.cwiseAbs().maxCoeff());
        }
      }
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("cross integral of elementary monomials") {
  const DiscretePath t_line = monomials(10, 1.0, 0.0);
  const DiscretePath t_square = monomials(10, 0.0, 1.0);
  // int_0^1 u du = 1/2, exactly on the grid since the line is its own
  // interpolant.
  CHECK(cross(t_line, t_line).value(0, Index(1) << 10)(0, 0) ==
        doctest::Approx(0.5).epsilon(1e-14));
  // int_0^1 u d(u^2) = 2/3 with the polygonal error.
  CHECK(cross(t_line, t_square).value(0, Index(1) << 10)(0, 0) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-5));
  RngStream rng(25, 0);
  CHECK_THROWS_AS(cross(sample_brownian(1, 3, rng), sample_brownian(1, 4, rng)),
                  std::invalid_argument);
}

TEST_CASE("cross integrals satisfy the transpose identity") {
  RngStream rng(26, 0);
  const DiscretePath x = sample_brownian(2, 6, rng);
  const DiscretePath z = sample_brownian(3, 6, rng);
  const CrossIntegral cxz = cross(x, z);
  const CrossIntegral czx = cross(z, x);
  for (Index i = 0; i <= x.segments(); i += 4) {
    for (Index j = i; j <= x.segments(); j += 6) {
      const Eigen::RowVectorXd dx = x.point(j) - x.point(i);
      const Eigen::RowVectorXd dz = z.point(j) - z.point(i);
      const Eigen::MatrixXd residual =
          cxz.value(i, j) + czx.value(i, j).transpose() - dx.transpose() * dz;
      CHECK(residual.cwiseAbs().maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("cross integral is additive in the first path") {
  RngStream rng(27, 0);
  const DiscretePath w = sample_brownian(2, 6, rng);
  const DiscretePath h = sample_brownian(2, 6, rng);
  const DiscretePath z = sample_brownian(1, 6, rng);
  const CrossIntegral sum = cross(w + h, z);
  const CrossIntegral cw = cross(w, z);
  const CrossIntegral ch = cross(h, z);
  for (Index i = 0; i <= w.segments(); i += 3) {
    for (Index j = i; j <= w.segments(); j += 4) {
      const Eigen::MatrixXd residual = sum.value(i, j) - cw.value(i, j) - ch.value(i, j);
      CHECK(residual.cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("subtracting the base path or zero behaves as expected") {
  RngStream rng(28, 0);
  const DiscretePath w = sample_brownian(2, 5, rng);
  const RoughLift lifted = lift(w);
  const RoughLift zeroed = subtract(lifted, w);
  CHECK(zeroed.base().values().isZero(0.0));
  CHECK(cp_norm(zeroed, 2.5) == 0.0);
  const RoughLift same = subtract(lifted, DiscretePath(2, 5));
  CHECK(same.base().values() == w.values());
  CHECK(same.level2(0, w.segments()).isApprox(lifted.level2(0, w.segments()), 1e-15));
  CHECK_THROWS_AS(subtract(lifted, DiscretePath(2, 6)), std::invalid_argument);
}

TEST_CASE("translation identity for second levels") {
  // Both sides computed independently: lift differences on the left, the
  // difference lift plus cross-integral corrections on the right.
  for (std::uint64_t s = 0; s < 10; ++s) {
    RngStream rng(29, s);
    const DiscretePath w = sample_brownian(2, 8, rng);
    const DiscretePath h = dyadic_project(sample_brownian(2, 8, rng), 4);
    const RoughLift lw = lift(w);
    const RoughLift lh = lift(h);
    const DiscretePath diff = w - h;
    const RoughLift ldiff = lift(diff);
    const CrossIntegral cdh = cross(diff, h);
    for (int c = 0; c < 6; ++c) {
      const Index i = static_cast<Index>(rng.uniform() * (w.segments() + 1));
      const Index j = i + static_cast<Index>(rng.uniform() * (w.segments() + 1 - i));
      const Eigen::MatrixXd lhs = lw.level2(i, j) - lh.level2(i, j);
      const Eigen::MatrixXd correction = cdh.value(i, j);
      const Eigen::RowVectorXd dh = h.point(j) - h.point(i);
      const Eigen::RowVectorXd dd = diff.point(j) - diff.point(i);
      const Eigen::MatrixXd rhs = ldiff.level2(i, j) + correction -
                                  correction.transpose() + dh.transpose() * dd;
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("rough distance basics") {
  RngStream rng(30, 0);
  const DiscretePath w = sample_brownian(2, 6, rng);
  const DiscretePath v = sample_brownian(2, 6, rng);
  const RoughLift lw = lift(w);
  const RoughLift lv = lift(v);
  CHECK(rough_distance(lw, lw, 2.5) == 0.0);
  CHECK(rough_distance(lw, lv, 2.5) == rough_distance(lv, lw, 2.5));
  CHECK(rough_distance(lw, lv, 2.5) > 0.0);
  CHECK_THROWS_AS(rough_distance(lw, lift(DiscretePath(2, 5)), 2.5),
                  std::invalid_argument);
}

TEST_CASE("lift scaling moves the levels by c and c squared") {
  RngStream rng(31, 0);
  const DiscretePath w = sample_brownian(2, 6, rng);
  const double c = 1.7;
  const RoughLift lw = lift(w);
  const RoughLift lc = lift(c * w);
  for (Index j = 1; j <= w.segments(); j += 9) {
    CHECK(lc.level1(0, j).isApprox(c * lw.level1(0, j), 1e-14));
    CHECK(lc.level2(0, j).isApprox(c * c * lw.level2(0, j), 1e-13));
  }
  CHECK(level1_norm(lc, 2.5) == doctest::Approx(c * level1_norm(lw, 2.5)).epsilon(1e-13));
  CHECK(level2_norm(lc, 2.5) ==
        doctest::Approx(c * c * level2_norm(lw, 2.5)).epsilon(1e-13));
}

TEST_CASE("cross norm bounds of the integral estimates") {
  // The two continuity estimates for cross integrals, checked per sample.
  for (std::uint64_t s = 0; s < 60; ++s) {
    RngStream rng(32, s);
    const DiscretePath h1 = sample_brownian(2, 6, rng);  // any continuous path
    const DiscretePath h2 = sample_brownian(2, 6, rng);  // integrator, smooth here
    const double lhs = cross_norm(cross(h1, h2), 2.5);
    CHECK(lhs <= level1_norm(h1, 2.5) * cm_norm(h2) + 1e-9);
    const double lhs_swapped = cross_norm(cross(h2, h1), 2.5);
    CHECK(lhs_swapped <=
          (cm_norm(h2) + level1_norm(h2, 2.5)) * level1_norm(h1, 2.5) + 1e-9);
  }
}

TEST_CASE("triangle bound for the level-2 distance") {
  // ||w2 - h2||_{p/2} <= ||(w-h)2||_{p/2} + 2 ||C_{w-h,h}||_{p/2}
  //                      + ||h||_p ||w-h||_p, every term independent.
  const double p = 2.5;
  for (std::uint64_t s = 0; s < 15; ++s) {
    RngStream rng(33, s);
    const DiscretePath w = sample_brownian(2, 6, rng);
    const DiscretePath h = dyadic_project(sample_brownian(2, 6, rng), 3);
    const RoughLift lw = lift(w);
    const RoughLift lh = lift(h);
    double lhs_pow = 0.0;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const auto ta = lw.level2_table(a, b);
        const auto tb = lh.level2_table(a, b);
        lhs_pow = std::max(
            lhs_pow, detail::qvar_dp_pow(
                         [&](Index i, Index j) { return ta.at(i, j) - tb.at(i, j); },
                         w.segments(), p / 2.0));
      }
    }
    const double lhs = std::pow(lhs_pow, 2.0 / p);
    const DiscretePath diff = w - h;
    const double rhs = level2_norm(lift(diff), p) +
                       2.0 * cross_norm(cross(diff, h), p) +
                       level1_norm(h, p) * level1_norm(diff, p);
    CHECK(lhs <= rhs + 1e-9);
  }
}
