#ifndef ROUGHLAB_EXPERIMENTS_HPP
#define ROUGHLAB_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "roughlab/domains.hpp"

namespace roughlab {

/// Wilson 99% confidence interval for a binomial proportion. Valid at
/// hits = 0, which is exactly the regime the positivity studies probe.
std::pair<double, double> wilson99(std::int64_t hits, std::int64_t trials);

/// Monte Carlo output of a membership study. Deterministic given (seed,
/// parameters); trial i always consumes RngStream(seed, i).
struct EstimateReport {
  std::int64_t trials = 0;
  std::int64_t hits = 0;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t seed = 0;
  std::string spec_echo;
};

/// Samples Brownian paths at the given level and counts membership in the
/// domain. Uab samples the pair (w1, w2) from one stream per trial.
EstimateReport estimate_measure(const DomainSpec& spec, int dimension, int level,
                                std::int64_t trials, std::uint64_t seed,
                                int workers = 0);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
};

/// Least-squares fit of y against x.
SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct ConvergenceRow {
  int n = 0;
  double mean_distance = 0.0, sd_distance = 0.0;  // ||lift(P_n w) - lift(w)||_{C^p}
  double mean_level2 = 0.0, sd_level2 = 0.0;      // ||(w - P_n w)_2||_{p/2}
  double mean_cross = 0.0, sd_cross = 0.0;        // ||C_{w - P_n w, P_n w}||_{p/2}
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;  // n strictly increasing
  std::int64_t trials = 0;
  SlopeFit distance_fit;  // log2(mean) vs n
  SlopeFit level2_fit;
  SlopeFit cross_fit;
};

/// Dyadic-approximation decay study: per trial draws w at the top level and
/// measures the three quantities above at every n in n_list (all n < level).
ConvergenceTable convergence_study(int dimension, int level,
                                   const std::vector<int>& n_list,
                                   std::int64_t trials, const VarParams& params,
                                   std::uint64_t seed, int workers = 0);

struct CrossBoundReport {
  std::vector<double> scales;
  std::vector<double> ratios;  // mean ||C_{w,cz}||_{p/2}^{p/2} / ||cz||_{p,kappa}^{p/2}
  double max_relative_spread = 0.0;
  std::int64_t trials = 0;
};

/// Ratio stability of the mean cross-integral mass against the dyadic norm
/// of z, across scalings of z. The same Brownian draws back every scaling,
/// so a flat ratio profile is an exact homogeneity check.
CrossBoundReport cross_bound_study(const DiscretePath& z, int dimension,
                                   std::int64_t trials, const VarParams& params,
                                   std::uint64_t seed,
                                   std::vector<double> scales = {},
                                   int workers = 0);

struct OverlapConfig {
  double a = 5.0;
  double epsilon = 5.0;
  double r = 0.25;  // must be in (0, 1/3)
  int prefix_dim = 1;
  int level = 8;
  std::int64_t trials = 10000;   // direct-sampling batch (alpha, alpha_bar)
  std::int64_t pair_draws = 2000;  // unconditional draws for pairwise overlap
  int section_pool = 8;            // sections kept for pairwise testing
  double min_acceptance = 1e-4;    // conditioning-event floor; below aborts
  std::uint64_t seed = 42;
  int workers = 0;
};

struct OverlapReport {
  EstimateReport alpha;      // prefix event: whole-lift and cross norms below a
  EstimateReport alpha_bar;  // last-coordinate event with the epsilon cap
  double acceptance_rate = 0.0;
  std::int64_t conditional_pool = 0;
  double tail_estimate = 0.0;   // conditional mass of max cross norm >= a
  double tail_benchmark = 0.0;  // (alpha_hat * r)^2
  std::int64_t v_candidates = 0;
  std::int64_t v_members = 0;
  std::int64_t pairs_tested = 0;
  double min_pairwise_overlap = 0.0;  // min over tested pairs of mu(section cap section)
  double min_overlap_se = 0.0;
  double one_third_alpha_bar = 0.0;
  bool bound_holds_within_3se = true;
};

/// Conditional overlap structure of the section sets: estimates the measures
/// entering the one-third pairwise-overlap bound and checks it within Monte
/// Carlo error. Conditional samples come from plain rejection on the
/// conditioning event; the study aborts if that event is rarer than
/// cfg.min_acceptance.
OverlapReport overlap_study(const DiscretePath& z, const VarParams& params,
                            const OverlapConfig& cfg);

}  // namespace roughlab

#endif  // ROUGHLAB_EXPERIMENTS_HPP
