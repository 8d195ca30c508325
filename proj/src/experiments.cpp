#include "roughlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "roughlab/parallel.hpp"

namespace roughlab {

namespace {

constexpr double kZ99 = 2.5758293035489004;  // Phi^{-1}(0.995)

// Stream index blocks keep the independent sampling purposes of one study
// from ever sharing a generator.
constexpr std::uint64_t kStreamBlock = std::uint64_t(1) << 40;

double sample_sd(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / double(xs.size() - 1));
}

}  // namespace

std::pair<double, double> wilson99(std::int64_t hits, std::int64_t trials) {
  if (trials < 1) throw std::invalid_argument("wilson99: requires trials >= 1");
  if (hits < 0 || hits > trials) throw std::invalid_argument("wilson99: hits out of range");
  const double n = double(trials);
  const double phat = double(hits) / n;
  const double z2 = kZ99 * kZ99;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      kZ99 * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

EstimateReport estimate_measure(const DomainSpec& spec, int dimension, int level,
                                std::int64_t trials, std::uint64_t seed,
                                int workers) {
  if (trials < 1) throw std::invalid_argument("estimate_measure: requires trials >= 1");
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(trials), 0);
  parallel_for(trials, workers, [&](std::int64_t t) {
    RngStream rng(seed, static_cast<std::uint64_t>(t));
    if (spec.kind == DomainKind::Uab) {
      const DiscretePath w1 = sample_brownian(1, level, rng);
      const DiscretePath w2 = sample_brownian(1, level, rng);
      hit[static_cast<std::size_t>(t)] = contains(spec, w1, w2) ? 1 : 0;
    } else {
      const DiscretePath w = sample_brownian(dimension, level, rng);
      hit[static_cast<std::size_t>(t)] = contains(spec, w) ? 1 : 0;
    }
  });
  EstimateReport report;
  report.trials = trials;
  report.hits = std::accumulate(hit.begin(), hit.end(), std::int64_t(0));
  report.estimate = double(report.hits) / double(trials);
  std::tie(report.ci_low, report.ci_high) = wilson99(report.hits, trials);
  report.seed = seed;
  report.spec_echo = serialize(spec, "(in-memory)", "(in-memory)");
  return report;
}

SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_line: need >= 2 matching points");
  }
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  SlopeFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    rss += r * r;
  }
  fit.residual_rms = std::sqrt(rss / n);
  return fit;
}

ConvergenceTable convergence_study(int dimension, int level,
                                   const std::vector<int>& n_list,
                                   std::int64_t trials, const VarParams& params,
                                   std::uint64_t seed, int workers) {
  if (trials < 1) throw std::invalid_argument("convergence_study: requires trials >= 1");
  if (n_list.empty()) throw std::invalid_argument("convergence_study: empty n list");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 0 || n_list[i] >= level) {
      throw std::invalid_argument("convergence_study: every n must satisfy 0 <= n < level");
    }
    if (i > 0 && n_list[i] <= n_list[i - 1]) {
      throw std::invalid_argument("convergence_study: n list must be strictly increasing");
    }
  }
  const std::size_t cols = n_list.size();
  // results[t * 3*cols + 3*ni + k], k = 0 distance, 1 level2, 2 cross
  std::vector<double> results(static_cast<std::size_t>(trials) * 3 * cols, 0.0);
  parallel_for(trials, workers, [&](std::int64_t t) {
    RngStream rng(seed, static_cast<std::uint64_t>(t));
    const DiscretePath w = sample_brownian(dimension, level, rng);
    const RoughLift lifted_w = lift(w);
    for (std::size_t ni = 0; ni < cols; ++ni) {
      const DiscretePath pn = dyadic_project(w, n_list[ni]);
      const DiscretePath rest = w - pn;
      double* slot = &results[(static_cast<std::size_t>(t) * cols + ni) * 3];
      slot[0] = rough_distance(lift(pn), lifted_w, params.p);
      slot[1] = level2_norm(lift(rest), params.p);
      slot[2] = cross_norm(cross(rest, pn), params.p);
    }
  });
  ConvergenceTable table;
  table.trials = trials;
  std::vector<double> ns(cols), log_dist(cols), log_lvl2(cols), log_cross(cols);
  for (std::size_t ni = 0; ni < cols; ++ni) {
    ConvergenceRow row;
    row.n = n_list[ni];
    std::vector<double> dist(trials), lvl2(trials), crs(trials);
    for (std::int64_t t = 0; t < trials; ++t) {
      const double* slot = &results[(static_cast<std::size_t>(t) * cols + ni) * 3];
      dist[t] = slot[0];
      lvl2[t] = slot[1];
      crs[t] = slot[2];
    }
    auto mean = [](const std::vector<double>& xs) {
      return std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
    };
    row.mean_distance = mean(dist);
    row.sd_distance = sample_sd(dist, row.mean_distance);
    row.mean_level2 = mean(lvl2);
    row.sd_level2 = sample_sd(lvl2, row.mean_level2);
    row.mean_cross = mean(crs);
    row.sd_cross = sample_sd(crs, row.mean_cross);
    table.rows.push_back(row);
    ns[ni] = double(row.n);
    log_dist[ni] = std::log2(row.mean_distance);
    log_lvl2[ni] = std::log2(row.mean_level2);
    log_cross[ni] = std::log2(row.mean_cross);
  }
  if (cols >= 2) {
    table.distance_fit = fit_line(ns, log_dist);
    table.level2_fit = fit_line(ns, log_lvl2);
    table.cross_fit = fit_line(ns, log_cross);
  }
  return table;
}

CrossBoundReport cross_bound_study(const DiscretePath& z, int dimension,
                                   std::int64_t trials, const VarParams& params,
                                   std::uint64_t seed, std::vector<double> scales,
                                   int workers) {
  if (trials < 1) throw std::invalid_argument("cross_bound_study: requires trials >= 1");
  if (!(dyadic_norm(z, params) > 0.0)) {
    throw std::invalid_argument("cross_bound_study: reference path must have positive dyadic norm");
  }
  if (scales.empty()) scales = {0.5, 1.0, 2.0, 4.0};
  for (double c : scales) {
    if (!(c > 0.0)) throw std::invalid_argument("cross_bound_study: scales must be positive");
  }
  const std::size_t ns = scales.size();
  std::vector<DiscretePath> scaled;
  scaled.reserve(ns);
  for (double c : scales) scaled.push_back(c * z);
  std::vector<double> mass(static_cast<std::size_t>(trials) * ns, 0.0);
  const double q = params.p / 2.0;
  parallel_for(trials, workers, [&](std::int64_t t) {
    RngStream rng(seed, static_cast<std::uint64_t>(t));
    const DiscretePath w = sample_brownian(dimension, z.level(), rng);
    for (std::size_t si = 0; si < ns; ++si) {
      mass[static_cast<std::size_t>(t) * ns + si] =
          qpow(cross_norm(cross(w, scaled[si]), params.p), q);
    }
  });
  CrossBoundReport report;
  report.trials = trials;
  report.scales = scales;
  report.ratios.resize(ns);
  for (std::size_t si = 0; si < ns; ++si) {
    double acc = 0.0;
    for (std::int64_t t = 0; t < trials; ++t) acc += mass[static_cast<std::size_t>(t) * ns + si];
    report.ratios[si] = (acc / double(trials)) / qpow(dyadic_norm(scaled[si], params), q);
  }
  const auto [lo, hi] = std::minmax_element(report.ratios.begin(), report.ratios.end());
  report.max_relative_spread = (*hi - *lo) / (0.5 * (*hi + *lo));
  return report;
}

OverlapReport overlap_study(const DiscretePath& z, const VarParams& params,
                            const OverlapConfig& cfg) {
  if (!(cfg.r > 0.0 && cfg.r < 1.0 / 3.0)) {
    throw std::invalid_argument("overlap_study: requires 0 < r < 1/3");
  }
  if (cfg.trials < 1 || cfg.pair_draws < 1) {
    throw std::invalid_argument("overlap_study: requires positive trial counts");
  }
  if (cfg.prefix_dim < 1) throw std::invalid_argument("overlap_study: prefix_dim must be >= 1");
  const double p = params.p;
  const double a = cfg.a;

  // Last-coordinate conditioning event of the study: the dyadic norm sits
  // below epsilon while both cross integrals against z stay below a.
  auto conditioning_event = [&](const DiscretePath& w1) {
    return dyadic_norm(w1, params) < cfg.epsilon &&
           cross_norm(cross(w1, z), p) < a && cross_norm(cross(z, w1), p) < a;
  };

  OverlapReport report;

  // Block 0: alpha over prefixes.
  std::vector<std::uint8_t> alpha_hit(static_cast<std::size_t>(cfg.trials), 0);
  std::vector<std::int64_t> in_u_indices;
  parallel_for(cfg.trials, cfg.workers, [&](std::int64_t t) {
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(t));
    const DiscretePath wp = sample_brownian(cfg.prefix_dim, cfg.level, rng);
    alpha_hit[static_cast<std::size_t>(t)] = in_U(wp, z, a, p) ? 1 : 0;
  });
  report.alpha.trials = cfg.trials;
  report.alpha.hits = std::accumulate(alpha_hit.begin(), alpha_hit.end(), std::int64_t(0));
  report.alpha.estimate = double(report.alpha.hits) / double(cfg.trials);
  std::tie(report.alpha.ci_low, report.alpha.ci_high) = wilson99(report.alpha.hits, cfg.trials);
  report.alpha.seed = cfg.seed;
  for (std::int64_t t = 0; t < cfg.trials; ++t) {
    if (alpha_hit[static_cast<std::size_t>(t)]) in_u_indices.push_back(t);
  }

  // Block 1: alpha_bar and the conditional pool, one rejection batch.
  std::vector<std::uint8_t> bar_hit(static_cast<std::size_t>(cfg.trials), 0);
  parallel_for(cfg.trials, cfg.workers, [&](std::int64_t t) {
    RngStream rng(cfg.seed, kStreamBlock + static_cast<std::uint64_t>(t));
    const DiscretePath w1 = sample_brownian(1, cfg.level, rng);
    bar_hit[static_cast<std::size_t>(t)] = conditioning_event(w1) ? 1 : 0;
  });
  report.alpha_bar.trials = cfg.trials;
  report.alpha_bar.hits = std::accumulate(bar_hit.begin(), bar_hit.end(), std::int64_t(0));
  report.alpha_bar.estimate = double(report.alpha_bar.hits) / double(cfg.trials);
  std::tie(report.alpha_bar.ci_low, report.alpha_bar.ci_high) =
      wilson99(report.alpha_bar.hits, cfg.trials);
  report.alpha_bar.seed = cfg.seed;
  report.acceptance_rate = report.alpha_bar.estimate;
  if (report.acceptance_rate < cfg.min_acceptance) {
    throw std::runtime_error(
        "overlap_study: conditioning event too rare at these parameters "
        "(acceptance " + std::to_string(report.acceptance_rate) + " < floor " +
        std::to_string(cfg.min_acceptance) + "); raise epsilon or a");
  }
  std::vector<std::int64_t> pool_indices;
  for (std::int64_t t = 0; t < cfg.trials; ++t) {
    if (bar_hit[static_cast<std::size_t>(t)]) pool_indices.push_back(t);
  }
  report.conditional_pool = static_cast<std::int64_t>(pool_indices.size());

  // Block 2: conditional tail of the mutual cross norms, one fresh prefix
  // per conditional sample.
  const std::int64_t pool = report.conditional_pool;
  std::vector<std::uint8_t> tail_hit(static_cast<std::size_t>(pool), 0);
  parallel_for(pool, cfg.workers, [&](std::int64_t k) {
    RngStream replay(cfg.seed, kStreamBlock + static_cast<std::uint64_t>(pool_indices[k]));
    const DiscretePath w1 = sample_brownian(1, cfg.level, replay);
    RngStream rng(cfg.seed, 2 * kStreamBlock + static_cast<std::uint64_t>(k));
    const DiscretePath wp = sample_brownian(cfg.prefix_dim, cfg.level, rng);
    const double m = std::max(cross_norm(cross(wp, w1), p), cross_norm(cross(w1, wp), p));
    tail_hit[static_cast<std::size_t>(k)] = m >= a ? 1 : 0;
  });
  const std::int64_t tail_hits =
      std::accumulate(tail_hit.begin(), tail_hit.end(), std::int64_t(0));
  report.tail_estimate = pool > 0 ? double(tail_hits) / double(pool) : 0.0;
  report.tail_benchmark =
      (report.alpha.estimate * cfg.r) * (report.alpha.estimate * cfg.r);

  // Block 3: empirical analogue of the well-covered prefix set. Candidates
  // are the in-U prefixes from block 0; membership asks the conditional pool.
  const std::int64_t candidate_cap = std::min<std::int64_t>(
      static_cast<std::int64_t>(in_u_indices.size()), 4 * cfg.section_pool);
  report.v_candidates = candidate_cap;
  std::vector<DiscretePath> sections;
  const double v_threshold = 1.0 - cfg.r * report.alpha.estimate;
  for (std::int64_t c = 0; c < candidate_cap; ++c) {
    RngStream replay(cfg.seed, static_cast<std::uint64_t>(in_u_indices[c]));
    const DiscretePath wp = sample_brownian(cfg.prefix_dim, cfg.level, replay);
    std::vector<std::uint8_t> member(static_cast<std::size_t>(pool), 0);
    parallel_for(pool, cfg.workers, [&](std::int64_t k) {
      RngStream replay1(cfg.seed, kStreamBlock + static_cast<std::uint64_t>(pool_indices[k]));
      const DiscretePath w1 = sample_brownian(1, cfg.level, replay1);
      member[static_cast<std::size_t>(k)] = in_section(w1, wp, z, a, p) ? 1 : 0;
    });
    const std::int64_t hits = std::accumulate(member.begin(), member.end(), std::int64_t(0));
    if (pool > 0 && double(hits) / double(pool) >= v_threshold) {
      sections.push_back(wp);
      if (static_cast<int>(sections.size()) >= cfg.section_pool) break;
    }
  }
  report.v_members = static_cast<std::int64_t>(sections.size());

  // Block 4: unconditional pairwise overlap of the section sets.
  report.one_third_alpha_bar = report.alpha_bar.estimate / 3.0;
  if (sections.size() >= 2) {
    const std::size_t s = sections.size();
    std::vector<std::uint8_t> matrix(static_cast<std::size_t>(cfg.pair_draws) * s, 0);
    parallel_for(cfg.pair_draws, cfg.workers, [&](std::int64_t j) {
      RngStream rng(cfg.seed, 3 * kStreamBlock + static_cast<std::uint64_t>(j));
      const DiscretePath w1 = sample_brownian(1, cfg.level, rng);
      for (std::size_t si = 0; si < s; ++si) {
        matrix[static_cast<std::size_t>(j) * s + si] =
            in_section(w1, sections[si], z, a, p) ? 1 : 0;
      }
    });
    double min_overlap = 1.0;
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t j = i + 1; j < s; ++j) {
        std::int64_t both = 0;
        for (std::int64_t k = 0; k < cfg.pair_draws; ++k) {
          both += matrix[static_cast<std::size_t>(k) * s + i] &
                  matrix[static_cast<std::size_t>(k) * s + j];
        }
        min_overlap = std::min(min_overlap, double(both) / double(cfg.pair_draws));
        ++report.pairs_tested;
      }
    }
    report.min_pairwise_overlap = min_overlap;
    report.min_overlap_se =
        std::sqrt(min_overlap * (1.0 - min_overlap) / double(cfg.pair_draws));
    const double bar_se = std::sqrt(report.alpha_bar.estimate *
                                    (1.0 - report.alpha_bar.estimate) /
                                    double(cfg.trials));
    const double se = std::sqrt(report.min_overlap_se * report.min_overlap_se +
                                bar_se * bar_se / 9.0);
    report.bound_holds_within_3se =
        min_overlap >= report.one_third_alpha_bar - 3.0 * se;
  }
  return report;
}

}  // namespace roughlab
