#include <doctest.h>

#include <roughlab/rng.hpp>
#include <roughlab/wpi.hpp>

#include <cstdio>
#include <filesystem>

using namespace roughlab;

namespace {

FactorSpace uniform_path_factor(Eigen::Index n, double conductance = 1.0) {
  FactorSpace f;
  f.weights = Eigen::VectorXd::Constant(n, 1.0 / double(n));
  f.conductance = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    f.conductance(i, i + 1) = conductance;
    f.conductance(i + 1, i) = conductance;
  }
  return f;
}

Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> full(Eigen::Index r, Eigen::Index c) {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> m(r, c);
  m.setConstant(true);
  return m;
}

}  // namespace

TEST_CASE("two-point uniform section has poincare constant one half") {
  FactorSpace one;
  one.weights = Eigen::VectorXd::Constant(1, 1.0);
  one.conductance = Eigen::MatrixXd::Zero(1, 1);
  const FiniteProductSpace space(one, uniform_path_factor(2), full(1, 2));
  const SectionCoefficients coeffs = section_pi_constants(space);
  REQUIRE(coeffs.u1.size() == 1);
  CHECK(coeffs.xi2(0) == doctest::Approx(0.5).epsilon(1e-12));
  // singleton sections have zero variance, hence zero coefficient
  REQUIRE(coeffs.u2.size() == 2);
  CHECK(coeffs.xi1(0) == 0.0);
  CHECK(coeffs.xi1(1) == 0.0);
}

TEST_CASE("scaling conductances scales the coefficients inversely") {
  FactorSpace one;
  one.weights = Eigen::VectorXd::Constant(1, 1.0);
  one.conductance = Eigen::MatrixXd::Zero(1, 1);
  const FiniteProductSpace base(one, uniform_path_factor(6), full(1, 6));
  const FiniteProductSpace scaled(one, uniform_path_factor(6, 4.0), full(1, 6));
  const double xi_base = section_pi_constants(base).xi2(0);
  const double xi_scaled = section_pi_constants(scaled).xi2(0);
  CHECK(xi_scaled == doctest::Approx(xi_base / 4.0).epsilon(1e-10));
}

TEST_CASE("the section coefficient is the exact poincare constant") {
  // Brute-force comparison on a small section: maximize Var(f)/E(f) over
  // random functions; the eigenvalue route must dominate and be attained.
  FactorSpace one;
  one.weights = Eigen::VectorXd::Constant(1, 1.0);
  one.conductance = Eigen::MatrixXd::Zero(1, 1);
  FactorSpace f;
  f.weights.resize(4);
  f.weights << 0.1, 0.2, 0.3, 0.4;
  f.conductance = Eigen::MatrixXd::Zero(4, 4);
  auto edge = [&](int i, int j, double c) {
    f.conductance(i, j) = c;
    f.conductance(j, i) = c;
  };
  edge(0, 1, 1.0);
  edge(1, 2, 0.5);
  edge(2, 3, 2.0);
  edge(0, 3, 0.25);
  const FiniteProductSpace space(one, f, full(1, 4));
  const double xi = section_pi_constants(space).xi2(0);
  RngStream rng(31, 0);
  double best_ratio = 0.0;
  for (int c = 0; c < 20000; ++c) {
    Eigen::VectorXd g(4);
    for (int i = 0; i < 4; ++i) g(i) = 2.0 * rng.uniform() - 1.0;
    const double mean = f.weights.dot(g);
    double var = 0.0, energy = 0.0;
    for (int i = 0; i < 4; ++i) {
      var += f.weights(i) * (g(i) - mean) * (g(i) - mean);
      for (int j = 0; j < 4; ++j) {
        energy += 0.5 * f.weights(i) * f.conductance(i, j) * (g(i) - g(j)) * (g(i) - g(j));
      }
    }
    if (energy > 0.0) best_ratio = std::max(best_ratio, var / energy);
  }
  CHECK(best_ratio <= xi * (1.0 + 1e-9));
  CHECK(best_ratio > 0.9 * xi);  // random search comes close to the optimum
}

TEST_CASE("disconnected positive-measure sections are reported by name") {
  FactorSpace one;
  one.weights = Eigen::VectorXd::Constant(1, 1.0);
  one.conductance = Eigen::MatrixXd::Zero(1, 1);
  FactorSpace broken = uniform_path_factor(4);
  broken.conductance(1, 2) = 0.0;
  broken.conductance(2, 1) = 0.0;  // the path splits in two
  const FiniteProductSpace space(one, broken, full(1, 4));
  CHECK_THROWS_WITH_AS(section_pi_constants(space),
                       doctest::Contains("disconnected"), std::runtime_error);
}

TEST_CASE("space construction validates its inputs") {
  FactorSpace f = uniform_path_factor(3);
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> none(3, 3);
  none.setConstant(false);
  CHECK_THROWS_AS(FiniteProductSpace(f, f, none), std::invalid_argument);
  FactorSpace negative = f;
  negative.weights(0) = -0.5;
  CHECK_THROWS_AS(FiniteProductSpace(negative, f, full(3, 3)), std::invalid_argument);
  FactorSpace unnormalized = f;
  unnormalized.weights(0) = 0.9;
  CHECK_THROWS_AS(FiniteProductSpace(unnormalized, f, full(3, 3)), std::invalid_argument);
  FactorSpace lopsided = f;
  lopsided.conductance(0, 1) = 2.0;  // breaks symmetry
  CHECK_THROWS_AS(FiniteProductSpace(lopsided, f, full(3, 3)), std::invalid_argument);
}

TEST_CASE("full product space satisfies the certificate with margin") {
  const FiniteProductSpace space(uniform_path_factor(6), uniform_path_factor(6),
                                 full(6, 6));
  const WpiCertificate cert = verify_product_wpi(space, 0.05, 0.05, 0.05, 200, 42);
  CHECK(cert.mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cert.delta_eps == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cert.max_violation <= 1e-9);
  CHECK(cert.u1_kept == 6);
}

TEST_CASE("constant functions make both sides vanish") {
  const FiniteProductSpace space = FiniteProductSpace::two_rectangles();
  // A constant is in the random corpus's span only by chance; check directly
  // through the public pieces: LHS = 2(m(U) sum f^2 dm - (sum f dm)^2) = 0.
  const double mass = space.mass();
  double mean = 0.0, second = 0.0;
  for (Eigen::Index x = 0; x < space.size1(); ++x) {
    for (Eigen::Index y = 0; y < space.size2(); ++y) {
      if (space.membership()(x, y)) {
        const double w = space.factor1().weights(x) * space.factor2().weights(y);
        mean += w * 3.25;
        second += w * 3.25 * 3.25;
      }
    }
  }
  CHECK(2.0 * (mass * second - mean * mean) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("two-rectangle example verifies at the standard triples") {
  const FiniteProductSpace space = FiniteProductSpace::two_rectangles();
  const WpiCertificate tight = verify_product_wpi(space, 0.05, 0.05, 0.01, 300, 42);
  CHECK(tight.max_violation <= 1e-9);
  CHECK(tight.delta_eps == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(tight.u1_kept == 10);
  CHECK(tight.mass == doctest::Approx(0.68).epsilon(1e-12));
  const WpiCertificate coarse = verify_product_wpi(space, 0.2, 0.2, 0.1, 300, 42);
  CHECK(coarse.max_violation <= 1e-9);
}

TEST_CASE("impossible overlap floors are rejected with a diagnostic") {
  const FiniteProductSpace space = FiniteProductSpace::two_rectangles();
  CHECK_THROWS_WITH_AS(verify_product_wpi(space, 1e-6, 0.05, 0.01, 10, 42, 0.5),
                       doctest::Contains("deficit"), std::runtime_error);
}

TEST_CASE("product space json round trip") {
  const FiniteProductSpace space = FiniteProductSpace::two_rectangles();
  const std::string file = "test_space_roundtrip.json";
  space.save_json(file);
  const FiniteProductSpace back = FiniteProductSpace::load_json(file);
  CHECK(back.size1() == space.size1());
  CHECK(back.size2() == space.size2());
  CHECK((back.membership() == space.membership()).all());
  CHECK(back.factor1().weights.isApprox(space.factor1().weights, 1e-15));
  CHECK(back.factor1().conductance.isApprox(space.factor1().conductance, 1e-15));
  const WpiCertificate a = verify_product_wpi(space, 0.05, 0.05, 0.01, 50, 7);
  const WpiCertificate b = verify_product_wpi(back, 0.05, 0.05, 0.01, 50, 7);
  CHECK(a.max_violation == b.max_violation);
  std::filesystem::remove(file);
}

TEST_CASE("gaussian generator input validation") {
  CHECK_THROWS_AS(gaussian_convex_check(2.0, 1.0, 500, 10, 42), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_convex_check(-1.0, 2.0, 50, 10, 42), std::invalid_argument);
}

TEST_CASE("near-full-line interval reproduces the ornstein-uhlenbeck gap") {
  const GaussianIntervalReport report = gaussian_convex_check(-8.0, 8.0, 2000, 100, 42);
  CHECK(std::abs(report.lambda0) < 1e-8);
  CHECK(report.lambda1 == doctest::Approx(1.0).epsilon(0.02));
  CHECK(report.lsi_max_violation <= 1e-6);
  CHECK(report.mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("asymmetric convex restriction keeps the gap above one") {
  const GaussianIntervalReport report = gaussian_convex_check(-1.0, 2.0, 2000, 200, 42);
  CHECK(report.lambda1 >= 0.98);
  CHECK(report.lsi_max_violation <= 1e-6);
  CHECK(report.mass < 1.0);
}

TEST_CASE("the gap grows as the interval shrinks") {
  const double g1 = gaussian_convex_check(-8.0, 8.0, 1200, 0, 42).lambda1;
  const double g2 = gaussian_convex_check(-4.0, 5.0, 1200, 0, 42).lambda1;
  const double g3 = gaussian_convex_check(-1.0, 2.0, 1200, 0, 42).lambda1;
  const double g4 = gaussian_convex_check(0.0, 1.0, 1200, 0, 42).lambda1;
  CHECK(g1 <= g2 * (1.0 + 1e-9));
  CHECK(g2 <= g3 * (1.0 + 1e-9));
  CHECK(g3 <= g4 * (1.0 + 1e-9));
}

TEST_CASE("the gap is stable under grid refinement") {
  const double coarse = gaussian_convex_check(-1.0, 2.0, 1000, 0, 42).lambda1;
  const double fine = gaussian_convex_check(-1.0, 2.0, 2000, 0, 42).lambda1;
  CHECK(std::abs(coarse - fine) <= 0.01);
}
