#include <doctest.h>

#include <roughlab/domains.hpp>

#include <sstream>

using namespace roughlab;

TEST_CASE("zero path lies in every centered domain") {
  const DiscretePath zero(2, 5);
  const DiscretePath z(2, 5);
  CHECK(in_U(zero, z, 1e-6, 2.5));
  CHECK(in_B(zero, zero, 1e-6, 2.5));
  CHECK(in_O(zero, zero, 1e-6, 2.5));
}

TEST_CASE("membership is strict at the boundary") {
  RngStream rng(40, 0);
  const DiscretePath w = sample_brownian(2, 5, rng);
  const DiscretePath z(2, 5);
  const double exact = cp_norm(lift(w), 2.5);
  CHECK_FALSE(in_U(w, z, exact, 2.5));      // norm == a excluded
  CHECK(in_U(w, z, exact * (1.0 + 1e-12), 2.5));
  CHECK_FALSE(in_O(w, DiscretePath(2, 5), 0.0, 2.5));  // a = 0 never holds
}

TEST_CASE("zero reference reduces the unit set to the lift constraint") {
  RngStream rng(41, 0);
  const DiscretePath z(2, 5);
  for (int c = 0; c < 20; ++c) {
    const DiscretePath w = sample_brownian(2, 5, rng);
    const double a = 0.5 + 4.0 * rng.uniform();
    CHECK(in_U(w, z, a, 2.5) == (cp_norm(lift(w), 2.5) < a));
  }
}

TEST_CASE("translated ball equals the centered set at the shifted point") {
  // in_B(w, {h, a}) = in_U(w - h, {z = h, a}); the same difference path backs
  // both predicates, so the booleans must agree exactly.
  RngStream rng(42, 0);
  for (int c = 0; c < 30; ++c) {
    const DiscretePath w = sample_brownian(2, 5, rng);
    const DiscretePath h = dyadic_project(sample_brownian(2, 5, rng), 2);
    const double a = 0.2 + 4.0 * rng.uniform();
    CHECK(in_B(w, h, a, 2.5) == in_U(w - h, h, a, 2.5));
  }
}

TEST_CASE("membership at the center and with zero shift") {
  RngStream rng(43, 0);
  const DiscretePath h = dyadic_project(sample_brownian(2, 5, rng), 3);
  CHECK(in_B(h, h, 1e-9, 2.5));
  CHECK(in_O(h, h, 1e-9, 2.5));
  const DiscretePath w = sample_brownian(2, 5, rng);
  const DiscretePath zero(2, 5);
  CHECK(in_B(w, zero, 5.0, 2.5) == in_U(w, zero, 5.0, 2.5));
}

TEST_CASE("product domain for one-dimensional pairs") {
  const DiscretePath zero(1, 4);
  CHECK(in_Uab(zero, zero, 1.0, 2.0, 2.5));
  RngStream rng(44, 0);
  const DiscretePath w1 = sample_brownian(1, 4, rng);
  const DiscretePath w2 = sample_brownian(1, 4, rng);
  const double n1 = level1_norm(w1, 2.5);
  const double n2 = level1_norm(w2, 2.5);
  // boundary cases are excluded
  CHECK_FALSE(in_Uab(w1, w2, n1 * n2, std::max(n1, n2) + 1.0, 2.5));
  CHECK_FALSE(in_Uab(w1, w2, 0.99 * n1 * n1, n1, 2.5));
  CHECK(in_Uab(w1, w2, n1 * n2 * 1.01, std::max(n1, n2) * 1.01, 2.5));
  CHECK_THROWS_AS(in_Uab(sample_brownian(2, 4, rng), w2, 1.0, 2.0, 2.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(in_Uab(w1, w2, 4.0, 2.0, 2.5), std::invalid_argument);  // a >= b^2
}

TEST_CASE("zero last coordinate lies in every section") {
  RngStream rng(45, 0);
  const DiscretePath prefix = sample_brownian(2, 5, rng);
  const DiscretePath z = sample_brownian(1, 5, rng);
  const DiscretePath zero(1, 5);
  CHECK(in_section(zero, prefix, z, 1e-9, 2.5));
  CHECK(in_section(zero, z, 1e-9, 2.5));
}

TEST_CASE("degenerate prefix reduces the section to the z-only constraints") {
  RngStream rng(46, 0);
  const DiscretePath z = sample_brownian(2, 5, rng);
  for (int c = 0; c < 10; ++c) {
    const DiscretePath w = sample_brownian(1, 5, rng);
    const double a = 0.3 + 3.0 * rng.uniform();
    const bool direct = in_section(w, z, a, 2.5);
    const bool expanded = cross_norm(cross(z, w), 2.5) < a &&
                          cross_norm(cross(w, z), 2.5) < a &&
                          level1_norm(w, 2.5) < a;
    CHECK(direct == expanded);
  }
}

TEST_CASE("unit-set membership splits into prefix and section constraints") {
  // Predicate-by-predicate decomposition of the two-dimensional unit set.
  // For a <= 2 the correspondence is exact; the diagonal second-level
  // constraint 0.5 ||w2||_p^2 < a is implied by ||w2||_p < a only there.
  RngStream rng(47, 0);
  const DiscretePath z = sample_brownian(1, 5, rng);
  int in_count = 0;
  for (int c = 0; c < 60; ++c) {
    const DiscretePath w = sample_brownian(2, 5, rng);
    const double a = 0.3 + 1.7 * rng.uniform();  // a <= 2
    const DiscretePath w1(5, w.values().leftCols(1));
    const DiscretePath w2(5, w.values().rightCols(1));
    const bool whole = in_U(w, z, a, 2.5);
    const bool split = in_U(w1, z, a, 2.5) && in_section(w2, w1, z, a, 2.5);
    CHECK(whole == split);
    in_count += whole ? 1 : 0;
    // One direction survives any a: the full constraint set implies the split.
    const double big_a = 2.0 + 3.0 * rng.uniform();
    if (in_U(w, z, big_a, 2.5)) {
      CHECK(in_U(w1, z, big_a, 2.5));
      CHECK(in_section(w2, w1, z, big_a, 2.5));
    }
  }
  CHECK(in_count > 0);  // the equivalence was not tested vacuously
}

TEST_CASE("membership is monotone in the radius") {
  RngStream rng(48, 0);
  for (int c = 0; c < 20; ++c) {
    const DiscretePath w = sample_brownian(2, 5, rng);
    const DiscretePath h = dyadic_project(sample_brownian(2, 5, rng), 2);
    const double a = 0.2 + 3.0 * rng.uniform();
    if (in_U(w, h, a, 2.5)) CHECK(in_U(w, h, a * 1.5, 2.5));
    if (in_B(w, h, a, 2.5)) CHECK(in_B(w, h, a * 1.5, 2.5));
    if (in_O(w, h, a, 2.5)) CHECK(in_O(w, h, a * 1.5, 2.5));
  }
}

TEST_CASE("level mismatches are rejected") {
  const DiscretePath w(2, 5);
  const DiscretePath z(2, 4);
  CHECK_THROWS_AS(in_U(w, z, 1.0, 2.5), std::invalid_argument);
  CHECK_THROWS_AS(in_B(w, z, 1.0, 2.5), std::invalid_argument);
  CHECK_THROWS_AS(in_O(w, z, 1.0, 2.5), std::invalid_argument);
  CHECK_THROWS_AS(in_section(DiscretePath(1, 5), w, z, 1.0, 2.5),
                  std::invalid_argument);
}

TEST_CASE("domain specs serialize to the flat key-value block and back") {
  RngStream rng(49, 0);
  const DiscretePath z = sample_brownian(2, 4, rng);
  const std::string z_file = "test_domain_ref.csv";
  write_csv(z, z_file);
  const DomainSpec spec(DomainKind::U, 2.5, VarParams(2.5, 2.0), z);
  const std::string block = serialize(spec, z_file);
  std::istringstream is(block);
  const DomainSpec parsed = parse_domain_spec(is);
  CHECK(parsed.kind == DomainKind::U);
  CHECK(parsed.a == spec.a);
  CHECK(parsed.params.p == spec.params.p);
  REQUIRE(parsed.reference.has_value());
  CHECK(parsed.reference->values() == z.values());

  const DiscretePath w = sample_brownian(2, 4, rng);
  CHECK(contains(parsed, w) == in_U(w, z, 2.5, 2.5));

  std::istringstream bad("kind = X\na = 1\n");
  CHECK_THROWS(parse_domain_spec(bad));
  std::istringstream unknown("kind = U\nfoo = 1\n");
  CHECK_THROWS(parse_domain_spec(unknown));
  CHECK_THROWS_AS(DomainSpec(DomainKind::U, -1.0, VarParams(2.5, 2.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(DomainSpec(DomainKind::Uab, 5.0, VarParams(2.5, 2.0), std::nullopt, 2.0),
                  std::invalid_argument);
}

TEST_CASE("predicates only see the path through its lift and cross integrals") {
  // Serialize the sample, reread, evaluate again: identical booleans.
  RngStream rng(50, 0);
  const DiscretePath w = sample_brownian(2, 5, rng);
  const DiscretePath z = dyadic_project(sample_brownian(2, 5, rng), 2);
  std::stringstream io;
  write_csv(w, io);
  const DiscretePath back = read_csv(io, "roundtrip");
  for (double a : {0.5, 1.0, 2.0, 4.0}) {
    CHECK(in_U(w, z, a, 2.5) == in_U(back, z, a, 2.5));
    CHECK(in_B(w, z, a, 2.5) == in_B(back, z, a, 2.5));
  }
}
