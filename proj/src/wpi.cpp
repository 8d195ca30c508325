#include "roughlab/wpi.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "roughlab/parallel.hpp"
#include "roughlab/rng.hpp"

namespace roughlab {

namespace {

void validate_factor(const FactorSpace& f, const char* name) {
  const Eigen::Index n = f.weights.size();
  if (n < 1 || n > FiniteProductSpace::kMaxPoints) {
    throw std::invalid_argument(std::string("FiniteProductSpace: ") + name +
                                " must have 1.." +
                                std::to_string(FiniteProductSpace::kMaxPoints) + " points");
  }
  if ((f.weights.array() <= 0.0).any()) {
    throw std::invalid_argument(std::string("FiniteProductSpace: ") + name +
                                " weights must be positive");
  }
  if (std::abs(f.weights.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument(std::string("FiniteProductSpace: ") + name +
                                " weights must sum to 1");
  }
  if (f.conductance.rows() != n || f.conductance.cols() != n) {
    throw std::invalid_argument(std::string("FiniteProductSpace: ") + name +
                                " conductance matrix has wrong shape");
  }
  if (!f.conductance.isApprox(f.conductance.transpose(), 1e-12)) {
    throw std::invalid_argument(std::string("FiniteProductSpace: ") + name +
                                " conductances must be symmetric");
  }
  if ((f.conductance.array() < 0.0).any()) {
    throw std::invalid_argument(std::string("FiniteProductSpace: ") + name +
                                " conductances must be nonnegative");
  }
  if (f.conductance.diagonal().cwiseAbs().maxCoeff() > 0.0) {
    throw std::invalid_argument(std::string("FiniteProductSpace: ") + name +
                                " conductance diagonal must vanish");
  }
}

// Connectivity of the index set under positive conductances.
bool connected(const Eigen::MatrixXd& cond, const std::vector<Eigen::Index>& idx) {
  if (idx.size() <= 1) return true;
  std::vector<char> seen(idx.size(), 0);
  std::vector<std::size_t> stack = {0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t at = stack.back();
    stack.pop_back();
    for (std::size_t other = 0; other < idx.size(); ++other) {
      if (!seen[other] && cond(idx[at], idx[other]) > 0.0) {
        seen[other] = 1;
        ++reached;
        stack.push_back(other);
      }
    }
  }
  return reached == idx.size();
}

// Exact Poincare constant of one section: the variance against the
// normalized section measure is at most 1/lambda_1 times the section energy
//   E(g) = sum_y m(y) * 1/2 sum_{y'} c(y,y') (g(y) - g(y'))^2,
// where lambda_1 is the gap of the symmetrized pencil.
double section_constant(const FactorSpace& factor, const std::vector<Eigen::Index>& idx,
                        const char* section_name, Eigen::Index section_at) {
  if (idx.size() == 1) return 0.0;
  if (!connected(factor.conductance, idx)) {
    throw std::runtime_error(std::string("section_pi_constants: section ") +
                             section_name + " at index " + std::to_string(section_at) +
                             " is disconnected");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(idx.size());
  double mass = 0.0;
  for (Eigen::Index i : idx) mass += factor.weights(i);
  Eigen::VectorXd m(n);
  for (Eigen::Index a = 0; a < n; ++a) m(a) = factor.weights(idx[a]) / mass;
  // Effective symmetric conductances of the energy above.
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      if (a == b) continue;
      const double c = 0.5 * (m(a) + m(b)) * factor.conductance(idx[a], idx[b]);
      lap(a, b) -= c;
      lap(a, a) += c;
    }
  }
  const Eigen::VectorXd scale = m.array().sqrt().inverse().matrix();
  const Eigen::MatrixXd sym = scale.asDiagonal() * lap * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("section_pi_constants: eigen-solve failed");
  }
  const double lambda1 = solver.eigenvalues()(1);
  return 1.0 / lambda1;
}

}  // namespace

FiniteProductSpace::FiniteProductSpace(
    FactorSpace y1, FactorSpace y2,
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> membership)
    : y1_(std::move(y1)), y2_(std::move(y2)), membership_(std::move(membership)) {
  validate_factor(y1_, "factor 1");
  validate_factor(y2_, "factor 2");
  if (membership_.rows() != size1() || membership_.cols() != size2()) {
    throw std::invalid_argument("FiniteProductSpace: membership table has wrong shape");
  }
  if (!membership_.any()) {
    throw std::invalid_argument("FiniteProductSpace: U must be nonempty");
  }
}

double FiniteProductSpace::mass() const {
  double total = 0.0;
  for (Eigen::Index x = 0; x < size1(); ++x) {
    for (Eigen::Index y = 0; y < size2(); ++y) {
      if (membership_(x, y)) total += y1_.weights(x) * y2_.weights(y);
    }
  }
  return total;
}

FiniteProductSpace FiniteProductSpace::two_rectangles() {
  const Eigen::Index n = 10;
  FactorSpace f;
  f.weights = Eigen::VectorXd::Constant(n, 1.0 / double(n));
  f.conductance = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    f.conductance(i, i + 1) = 1.0;
    f.conductance(i + 1, i) = 1.0;
  }
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> member(n, n);
  member.setConstant(false);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) {
      const bool first = x <= 5 && y <= 5;
      const bool second = x >= 4 && y >= 4;
      member(x, y) = first || second;
    }
  }
  return FiniteProductSpace(f, f, member);
}

FiniteProductSpace FiniteProductSpace::load_json(const std::string& file) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("FiniteProductSpace: cannot open " + file);
  nlohmann::json doc = nlohmann::json::parse(is);
  auto read_factor = [](const nlohmann::json& j) {
    FactorSpace f;
    const auto& w = j.at("weights");
    f.weights.resize(static_cast<Eigen::Index>(w.size()));
    for (Eigen::Index i = 0; i < f.weights.size(); ++i) f.weights(i) = w.at(i).get<double>();
    f.conductance = Eigen::MatrixXd::Zero(f.weights.size(), f.weights.size());
    for (const auto& e : j.at("edges")) {
      const Eigen::Index a = e.at(0).get<Eigen::Index>();
      const Eigen::Index b = e.at(1).get<Eigen::Index>();
      const double c = e.at(2).get<double>();
      if (a < 0 || b < 0 || a >= f.weights.size() || b >= f.weights.size()) {
        throw std::runtime_error("FiniteProductSpace: edge endpoint out of range");
      }
      f.conductance(a, b) = c;
      f.conductance(b, a) = c;
    }
    return f;
  };
  const FactorSpace y1 = read_factor(doc.at("y1"));
  const FactorSpace y2 = read_factor(doc.at("y2"));
  const auto& rows = doc.at("membership");
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> member(
      static_cast<Eigen::Index>(rows.size()), y2.weights.size());
  for (Eigen::Index x = 0; x < member.rows(); ++x) {
    const auto& row = rows.at(x);
    if (static_cast<Eigen::Index>(row.size()) != member.cols()) {
      throw std::runtime_error("FiniteProductSpace: ragged membership rows");
    }
    for (Eigen::Index y = 0; y < member.cols(); ++y) {
      member(x, y) = row.at(y).get<int>() != 0;
    }
  }
  return FiniteProductSpace(y1, y2, member);
}

void FiniteProductSpace::save_json(const std::string& file) const {
  nlohmann::json doc;
  auto write_factor = [](const FactorSpace& f) {
    nlohmann::json j;
    j["weights"] = std::vector<double>(f.weights.data(), f.weights.data() + f.weights.size());
    nlohmann::json edges = nlohmann::json::array();
    for (Eigen::Index a = 0; a < f.weights.size(); ++a) {
      for (Eigen::Index b = a + 1; b < f.weights.size(); ++b) {
        if (f.conductance(a, b) > 0.0) edges.push_back({a, b, f.conductance(a, b)});
      }
    }
    j["edges"] = std::move(edges);
    return j;
  };
  doc["y1"] = write_factor(y1_);
  doc["y2"] = write_factor(y2_);
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index x = 0; x < size1(); ++x) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index y = 0; y < size2(); ++y) row.push_back(membership_(x, y) ? 1 : 0);
    rows.push_back(std::move(row));
  }
  doc["membership"] = std::move(rows);
  std::ofstream os(file);
  if (!os) throw std::runtime_error("FiniteProductSpace: cannot write " + file);
  os << doc.dump(2) << "\n";
}

SectionCoefficients section_pi_constants(const FiniteProductSpace& space) {
  SectionCoefficients out;
  const auto& member = space.membership();
  for (Eigen::Index x = 0; x < space.size1(); ++x) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index y = 0; y < space.size2(); ++y) {
      if (member(x, y)) idx.push_back(y);
    }
    if (!idx.empty()) out.u1.push_back(x);
  }
  for (Eigen::Index y = 0; y < space.size2(); ++y) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index x = 0; x < space.size1(); ++x) {
      if (member(x, y)) idx.push_back(x);
    }
    if (!idx.empty()) out.u2.push_back(y);
  }
  out.xi2.resize(static_cast<Eigen::Index>(out.u1.size()));
  for (std::size_t k = 0; k < out.u1.size(); ++k) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index y = 0; y < space.size2(); ++y) {
      if (member(out.u1[k], y)) idx.push_back(y);
    }
    out.xi2(static_cast<Eigen::Index>(k)) =
        section_constant(space.factor2(), idx, "U_x", out.u1[k]);
  }
  out.xi1.resize(static_cast<Eigen::Index>(out.u2.size()));
  for (std::size_t k = 0; k < out.u2.size(); ++k) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index x = 0; x < space.size1(); ++x) {
      if (member(x, out.u2[k])) idx.push_back(x);
    }
    out.xi1(static_cast<Eigen::Index>(k)) =
        section_constant(space.factor1(), idx, "U^y", out.u2[k]);
  }
  return out;
}

namespace {

// Largest xi among kept sections after greedily discarding the worst ones
// within the eps_prime mass budget.
double sup_after_trim(const Eigen::VectorXd& xi, const std::vector<Eigen::Index>& members,
                      const Eigen::VectorXd& weights, double eps_prime) {
  std::vector<std::size_t> order(members.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (xi(static_cast<Eigen::Index>(a)) != xi(static_cast<Eigen::Index>(b))) {
      return xi(static_cast<Eigen::Index>(a)) > xi(static_cast<Eigen::Index>(b));
    }
    return a < b;
  });
  double dropped = 0.0;
  std::size_t first_kept = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double w = weights(members[order[k]]);
    if (dropped + w <= eps_prime && k + 1 < order.size()) {
      dropped += w;
      first_kept = k + 1;
    } else {
      break;
    }
  }
  double sup = 0.0;
  for (std::size_t k = first_kept; k < order.size(); ++k) {
    sup = std::max(sup, xi(static_cast<Eigen::Index>(order[k])));
  }
  return sup;
}

}  // namespace

WpiCertificate verify_product_wpi(const FiniteProductSpace& space, double eps,
                                  double eps_prime, double delta,
                                  std::int64_t corpus_size, std::uint64_t seed,
                                  double overlap_floor, int workers) {
  if (!(eps > 0.0 && eps_prime > 0.0 && delta > 0.0)) {
    throw std::invalid_argument("verify_product_wpi: eps, eps_prime, delta must be positive");
  }
  if (corpus_size < 1) throw std::invalid_argument("verify_product_wpi: empty corpus");
  const auto& member = space.membership();
  const Eigen::VectorXd& m1 = space.factor1().weights;
  const Eigen::VectorXd& m2 = space.factor2().weights;
  const SectionCoefficients coeffs = section_pi_constants(space);

  WpiCertificate cert;
  cert.eps = eps;
  cert.eps_prime = eps_prime;
  cert.delta = delta;
  cert.overlap_floor_used = overlap_floor;
  cert.mass = space.mass();
  cert.corpus_size = corpus_size;
  cert.u1_total = static_cast<std::int64_t>(coeffs.u1.size());

  // A2 witness: greedy by mass, pairwise section overlap >= floor throughout.
  std::vector<double> section_mass(coeffs.u1.size(), 0.0);
  for (std::size_t k = 0; k < coeffs.u1.size(); ++k) {
    for (Eigen::Index y = 0; y < space.size2(); ++y) {
      if (member(coeffs.u1[k], y)) section_mass[k] += m2(y);
    }
  }
  auto overlap = [&](Eigen::Index xa, Eigen::Index xb) {
    double acc = 0.0;
    for (Eigen::Index y = 0; y < space.size2(); ++y) {
      if (member(xa, y) && member(xb, y)) acc += m2(y);
    }
    return acc;
  };
  std::vector<std::size_t> order(coeffs.u1.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double wa = m1(coeffs.u1[a]);
    const double wb = m1(coeffs.u1[b]);
    if (wa != wb) return wa > wb;
    return coeffs.u1[a] < coeffs.u1[b];
  });
  std::vector<Eigen::Index> kept;
  double kept_mass = 0.0;
  double u1_mass = 0.0;
  for (std::size_t k : order) u1_mass += m1(coeffs.u1[k]);
  double floor_realized = 1.0;
  for (std::size_t k : order) {
    const Eigen::Index x = coeffs.u1[k];
    double worst = section_mass[k];
    bool ok = true;
    for (Eigen::Index other : kept) {
      const double o = overlap(x, other);
      worst = std::min(worst, o);
      if (o < overlap_floor) {
        ok = false;
        break;
      }
    }
    if (ok) {
      kept.push_back(x);
      kept_mass += m1(x);
      floor_realized = std::min(floor_realized, worst);
    }
  }
  const double deficit = u1_mass - kept_mass;
  if (deficit > eps + 1e-15) {
    throw std::runtime_error(
        "verify_product_wpi: no admissible well-overlapping subset; mass deficit " +
        std::to_string(deficit) + " exceeds eps " + std::to_string(eps) +
        " at overlap floor " + std::to_string(overlap_floor));
  }
  cert.u1_kept = static_cast<std::int64_t>(kept.size());
  cert.delta_eps = floor_realized;

  cert.xi = std::max(sup_after_trim(coeffs.xi2, coeffs.u1, m1, eps_prime),
                     sup_after_trim(coeffs.xi1, coeffs.u2, m2, eps_prime));
  cert.energy_constant = 18.0 * cert.xi / cert.delta_eps;
  cert.supnorm_constant = 8.0 * eps + 36.0 * eps_prime / cert.delta_eps +
                          18.0 * delta * cert.mass / cert.delta_eps;

  // Corpus: random bounded functions plus section-indicator adversaries.
  const std::int64_t adversaries = static_cast<std::int64_t>(coeffs.u1.size() + coeffs.u2.size());
  const std::int64_t total = corpus_size + adversaries;
  std::vector<double> violation(static_cast<std::size_t>(total), 0.0);
  std::vector<double> lhs_seen(static_cast<std::size_t>(total), 0.0);
  const auto& c1 = space.factor1().conductance;
  const auto& c2 = space.factor2().conductance;

  auto evaluate = [&](const Eigen::MatrixXd& f, std::int64_t slot) {
    double mean = 0.0, second = 0.0, energy = 0.0, sup = 0.0;
    for (Eigen::Index x = 0; x < space.size1(); ++x) {
      for (Eigen::Index y = 0; y < space.size2(); ++y) {
        if (!member(x, y)) continue;
        const double w = m1(x) * m2(y);
        const double v = f(x, y);
        mean += w * v;
        second += w * v * v;
        sup = std::max(sup, std::abs(v));
        double gamma = 0.0;
        for (Eigen::Index xx = 0; xx < space.size1(); ++xx) {
          if (member(xx, y) && c1(x, xx) > 0.0) {
            gamma += 0.5 * c1(x, xx) * (v - f(xx, y)) * (v - f(xx, y));
          }
        }
        for (Eigen::Index yy = 0; yy < space.size2(); ++yy) {
          if (member(x, yy) && c2(y, yy) > 0.0) {
            gamma += 0.5 * c2(y, yy) * (v - f(x, yy)) * (v - f(x, yy));
          }
        }
        energy += w * gamma;
      }
    }
    const double lhs = 2.0 * (cert.mass * second - mean * mean);
    const double rhs = cert.energy_constant * energy + cert.supnorm_constant * sup * sup;
    violation[static_cast<std::size_t>(slot)] = lhs - rhs;
    lhs_seen[static_cast<std::size_t>(slot)] = lhs;
  };

  parallel_for(total, workers, [&](std::int64_t k) {
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(space.size1(), space.size2());
    if (k < corpus_size) {
      RngStream rng(seed, static_cast<std::uint64_t>(k));
      for (Eigen::Index x = 0; x < space.size1(); ++x) {
        for (Eigen::Index y = 0; y < space.size2(); ++y) {
          if (member(x, y)) f(x, y) = 2.0 * rng.uniform() - 1.0;
        }
      }
    } else if (k < corpus_size + static_cast<std::int64_t>(coeffs.u1.size())) {
      const Eigen::Index x0 = coeffs.u1[static_cast<std::size_t>(k - corpus_size)];
      for (Eigen::Index x = 0; x < space.size1(); ++x) {
        for (Eigen::Index y = 0; y < space.size2(); ++y) {
          if (member(x, y)) f(x, y) = member(x0, y) ? 1.0 : -1.0;
        }
      }
    } else {
      const Eigen::Index y0 =
          coeffs.u2[static_cast<std::size_t>(k - corpus_size - coeffs.u1.size())];
      for (Eigen::Index x = 0; x < space.size1(); ++x) {
        for (Eigen::Index y = 0; y < space.size2(); ++y) {
          if (member(x, y)) f(x, y) = member(x, y0) ? 1.0 : -1.0;
        }
      }
    }
    evaluate(f, k);
  });

  cert.max_violation = *std::max_element(violation.begin(), violation.end());
  cert.max_lhs = *std::max_element(lhs_seen.begin(), lhs_seen.end());
  return cert;
}

GaussianIntervalReport gaussian_convex_check(double lower, double upper,
                                             int grid_size, std::int64_t corpus_size,
                                             std::uint64_t seed) {
  if (!(lower < upper)) throw std::invalid_argument("gaussian_convex_check: requires lower < upper");
  if (grid_size < 100) throw std::invalid_argument("gaussian_convex_check: requires grid_size >= 100");
  if (corpus_size < 0) throw std::invalid_argument("gaussian_convex_check: negative corpus");

  const int n = grid_size;
  const double step = (upper - lower) / double(n - 1);
  Eigen::VectorXd nodes(n), density(n);
  for (int i = 0; i < n; ++i) {
    nodes(i) = lower + step * i;
    density(i) = std::exp(-0.5 * nodes(i) * nodes(i)) / std::sqrt(2.0 * 3.14159265358979323846);
  }
  // Trapezoid measure weights, normalized to the restricted Gaussian.
  Eigen::VectorXd weights = density * step;
  weights(0) *= 0.5;
  weights(n - 1) *= 0.5;
  const double normalizer = weights.sum();
  weights /= normalizer;
  // Midpoint conductances of the Neumann generator; same normalizer so the
  // energy approximates int f'^2 dnu.
  Eigen::VectorXd conduct(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    const double mid = 0.5 * (nodes(i) + nodes(i + 1));
    conduct(i) = std::exp(-0.5 * mid * mid) / std::sqrt(2.0 * 3.14159265358979323846) /
                 (step * normalizer);
  }

  Eigen::VectorXd diag(n), sub(n - 1);
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    if (i > 0) row += conduct(i - 1);
    if (i + 1 < n) row += conduct(i);
    diag(i) = row / weights(i);
  }
  for (int i = 0; i + 1 < n; ++i) {
    sub(i) = -conduct(i) / std::sqrt(weights(i) * weights(i + 1));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("gaussian_convex_check: eigen-solve did not converge");
  }

  GaussianIntervalReport report;
  report.lower = lower;
  report.upper = upper;
  report.grid = grid_size;
  report.corpus_size = corpus_size;
  const auto phi = [](double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); };
  report.mass = phi(upper) - phi(lower);
  report.lambda0 = solver.eigenvalues()(0);
  report.lambda1 = solver.eigenvalues()(1);

  // LSI corpus: smooth trigonometric functions with analytic derivatives,
  // entropy and energy integrated by the same quadrature weights.
  double worst = -1e300;
  RngStream rng(seed, 0);
  for (std::int64_t c = 0; c < corpus_size; ++c) {
    double a0 = 2.0 * rng.uniform() - 1.0;
    double amp[3], freq[3], phase[3];
    for (int k = 0; k < 3; ++k) {
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      amp[k] = sign * (0.2 + 0.8 * rng.uniform());
      freq[k] = 0.3 + 2.7 * rng.uniform();
      phase[k] = 2.0 * 3.14159265358979323846 * rng.uniform();
    }
    double norm_sq = 0.0, energy = 0.0;
    Eigen::VectorXd sq(n);
    for (int i = 0; i < n; ++i) {
      double f = a0, df = 0.0;
      for (int k = 0; k < 3; ++k) {
        f += amp[k] * std::sin(freq[k] * nodes(i) + phase[k]);
        df += amp[k] * freq[k] * std::cos(freq[k] * nodes(i) + phase[k]);
      }
      sq(i) = f * f;
      norm_sq += weights(i) * sq(i);
      energy += weights(i) * df * df;
    }
    double entropy = 0.0;
    for (int i = 0; i < n; ++i) {
      if (sq(i) > 0.0) entropy += weights(i) * sq(i) * std::log(sq(i) / norm_sq);
    }
    worst = std::max(worst, entropy - 2.0 * energy);
  }
  report.lsi_max_violation = corpus_size > 0 ? worst : 0.0;
  return report;
}

}  // namespace roughlab
