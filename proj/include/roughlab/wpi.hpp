#ifndef ROUGHLAB_WPI_HPP
#define ROUGHLAB_WPI_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace roughlab {

/// One factor of a finite product space: a weighted point set with symmetric
/// edge conductances. The square field is
///   Gamma(f)(y) = 1/2 sum_{y'} c(y, y') (f(y) - f(y'))^2,
/// summed over edges inside whatever section the form is restricted to.
struct FactorSpace {
  Eigen::VectorXd weights;      // positive, sums to 1
  Eigen::MatrixXd conductance;  // symmetric, nonnegative, zero diagonal
};

/// Finite product space with a membership table U and per-factor forms.
class FiniteProductSpace {
 public:
  static constexpr Eigen::Index kMaxPoints = 512;

  FiniteProductSpace(FactorSpace y1, FactorSpace y2,
                     Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> membership);

  const FactorSpace& factor1() const { return y1_; }
  const FactorSpace& factor2() const { return y2_; }
  const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& membership() const {
    return membership_;
  }
  Eigen::Index size1() const { return y1_.weights.size(); }
  Eigen::Index size2() const { return y2_.weights.size(); }
  /// m(U) under the product measure.
  double mass() const;

  /// Uniform 10x10 grid, unit path-graph conductances, U the union of the
  /// axis-aligned squares [0,5]^2 and [4,9]^2.
  static FiniteProductSpace two_rectangles();

  static FiniteProductSpace load_json(const std::string& file);
  void save_json(const std::string& file) const;

 private:
  FactorSpace y1_, y2_;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> membership_;
};

/// Exact Poincare coefficients of all sections: xi2(x) bounds the variance on
/// U_x against the section energy, xi1(y) likewise for U^y. A section with
/// one point gets 0; a disconnected positive-measure section is an error
/// naming the section. Poincare implies WPI with a delta-independent
/// coefficient, which is how these enter the product certificate.
struct SectionCoefficients {
  std::vector<Eigen::Index> u1;  // x with positive-mass section U_x
  std::vector<Eigen::Index> u2;  // y with positive-mass section U^y
  Eigen::VectorXd xi2;           // indexed like u1
  Eigen::VectorXd xi1;           // indexed like u2
};

SectionCoefficients section_pi_constants(const FiniteProductSpace& space);

struct WpiCertificate {
  double eps = 0.0, eps_prime = 0.0, delta = 0.0;
  double xi = 0.0;               // sup of kept section coefficients
  double delta_eps = 0.0;        // realized pairwise-overlap floor
  double overlap_floor_used = 0.0;
  double mass = 0.0;             // m(U)
  double energy_constant = 0.0;  // 18 xi / delta_eps
  double supnorm_constant = 0.0; // 8 eps + 36 eps' / delta_eps + 18 delta m(U) / delta_eps
  double max_violation = 0.0;    // max over the corpus of LHS - RHS
  double max_lhs = 0.0;
  std::int64_t corpus_size = 0;
  std::int64_t u1_kept = 0, u1_total = 0;
};

/// Checks the doubled-variance inequality
///   iint (f(x,y) - f(x',y'))^2 dm dm
///     <= [18 xi / delta(eps)] iint Gamma(f,f) dm + [8 eps + 36 eps'/delta(eps)
///        + 18 delta m(U)/delta(eps)] ||f||_inf^2
/// over a corpus of random bounded functions plus section-indicator-like
/// adversaries. The well-overlapping subset is built greedily: points enter
/// by decreasing mass while all pairwise section overlaps stay >= the floor;
/// the mass left out must not exceed eps.
WpiCertificate verify_product_wpi(const FiniteProductSpace& space, double eps,
                                  double eps_prime, double delta,
                                  std::int64_t corpus_size, std::uint64_t seed,
                                  double overlap_floor = 1e-9, int workers = 0);

struct GaussianIntervalReport {
  double lower = 0.0, upper = 0.0;
  int grid = 0;
  double mass = 0.0;     // Gaussian measure of the interval
  double lambda0 = 0.0;  // bottom eigenvalue, should vanish
  double lambda1 = 0.0;  // spectral gap of the restricted generator
  double lsi_max_violation = 0.0;  // max of Ent(f^2) - 2 Energy(f)
  std::int64_t corpus_size = 0;
};

/// Spectral gap and LSI check for the standard Gaussian restricted to
/// [lower, upper]: finite-difference Neumann generator with density weights,
/// eigenvalues from the tridiagonal solver, and an entropy-energy comparison
/// over a corpus of random smooth functions with analytic derivatives.
GaussianIntervalReport gaussian_convex_check(double lower, double upper,
                                             int grid_size, std::int64_t corpus_size,
                                             std::uint64_t seed);

}  // namespace roughlab

#endif  // ROUGHLAB_WPI_HPP
