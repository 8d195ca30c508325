#include "roughlab/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "roughlab/experiments.hpp"
#include "roughlab/wpi.hpp"

namespace roughlab::cli {

namespace {

constexpr int kSchemaVersion = 1;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::ofstream open_output(const std::string& file, bool force) {
  if (!force && std::filesystem::exists(file)) {
    throw std::runtime_error("output file '" + file +
                             "' exists; pass --force to overwrite");
  }
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot open '" + file + "' for writing");
  return os;
}

void write_json(const nlohmann::json& doc, const std::string& file, bool force) {
  auto os = open_output(file, force);
  os << doc.dump(2) << "\n";
}

// Range syntax "2..10" or comma list "2,4,6".
std::vector<int> parse_levels(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const int lo = std::stoi(text.substr(0, dots));
    const int hi = std::stoi(text.substr(dots + 2));
    for (int n = lo; n <= hi; ++n) out.push_back(n);
  } else {
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stoi(cell));
  }
  if (out.empty()) throw std::runtime_error("empty level list '" + text + "'");
  return out;
}

struct CommonOpts {
  double p = 2.5;
  double kappa = 2.0;
  std::uint64_t seed = 42;
  int workers = 0;
  bool force = false;
  bool ci_mode = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--p", opts.p, "variation exponent, 2 < p < 3");
  cmd->add_option("--kappa", opts.kappa, "dyadic-norm exponent, kappa > p - 1");
  cmd->add_option("--seed", opts.seed, "master seed");
  cmd->add_option("--workers", opts.workers, "worker threads (0 = hardware)");
  cmd->add_flag("--force", opts.force, "overwrite existing outputs");
  cmd->add_flag("--ci", opts.ci_mode, "require an explicit --seed");
}

void check_ci(const CLI::App* cmd, const CommonOpts& opts) {
  if (opts.ci_mode && cmd->count("--seed") == 0) {
    throw std::runtime_error("--ci requires an explicit --seed");
  }
}

nlohmann::json base_config(const std::string& subcommand, const CommonOpts& opts) {
  nlohmann::json config;
  config["p"] = opts.p;
  config["kappa"] = opts.kappa;
  config["seed"] = opts.seed;
  nlohmann::json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["subcommand"] = subcommand;
  doc["config"] = std::move(config);
  return doc;
}

nlohmann::json report_json(const EstimateReport& r) {
  nlohmann::json j;
  j["trials"] = r.trials;
  j["hits"] = r.hits;
  j["estimate"] = r.estimate;
  j["ci_low"] = r.ci_low;
  j["ci_high"] = r.ci_high;
  j["seed"] = r.seed;
  return j;
}

// Deterministic built-in reference path: a coarse polygonal smoothing of a
// Brownian draw from a stream far away from the per-trial blocks.
DiscretePath builtin_reference(int dimension, int level, std::uint64_t seed) {
  RngStream rng(seed, std::uint64_t(1) << 50);
  const DiscretePath w = sample_brownian(dimension, level, rng);
  return dyadic_project(w, std::min(4, level));
}

int run_property_suite(int level, std::int64_t cases, const CommonOpts& opts);

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"numerical laboratory for second-order rough paths on dyadic grids"};
  app.require_subcommand(1);

  // ---- lift ----
  auto* lift_cmd = app.add_subcommand("lift", "norms of the two-level lift of a path");
  CommonOpts lift_opts;
  std::string lift_path, lift_table;
  lift_cmd->add_option("--path", lift_path, "path CSV")->required();
  lift_cmd->add_option("--table", lift_table, "dump the full (i,j) pair table (debug, O(4^N) rows)");
  add_common(lift_cmd, lift_opts);

  // ---- pvar ----
  auto* pvar_cmd = app.add_subcommand("pvar", "level-1 p-variation norm of a path");
  CommonOpts pvar_opts;
  std::string pvar_path;
  pvar_cmd->add_option("--path", pvar_path, "path CSV")->required();
  add_common(pvar_cmd, pvar_opts);

  // ---- dyadic-norm ----
  auto* dyadic_cmd = app.add_subcommand("dyadic-norm", "dyadic (p,kappa)-norm of a path");
  CommonOpts dyadic_opts;
  std::string dyadic_path;
  dyadic_cmd->add_option("--path", dyadic_path, "path CSV")->required();
  add_common(dyadic_cmd, dyadic_opts);

  // ---- membership ----
  auto* member_cmd = app.add_subcommand("membership", "evaluate a domain predicate on a path");
  CommonOpts member_opts;
  std::string member_spec, member_path, member_path2;
  member_cmd->add_option("--spec", member_spec, "domain spec file (key = value lines)")->required();
  member_cmd->add_option("--path", member_path, "path CSV")->required();
  member_cmd->add_option("--path2", member_path2, "second path CSV (Uab only)");
  add_common(member_cmd, member_opts);

  // ---- estimate-measure ----
  auto* est_cmd = app.add_subcommand("estimate-measure", "Monte Carlo mass of a domain");
  CommonOpts est_opts;
  std::string est_kind = "U", est_ref = "zero", est_prefix, est_json, est_csv;
  double est_a = 5.0, est_b = 0.0;
  int est_d = 2, est_level = 8;
  std::int64_t est_trials = 10000;
  est_cmd->add_option("--kind", est_kind, "U|B|O|Uab|Section");
  est_cmd->add_option("--a", est_a, "radius a");
  est_cmd->add_option("--b", est_b, "outer radius b (Uab)");
  est_cmd->add_option("--z", est_ref, "reference path CSV, or 'zero'");
  est_cmd->add_option("--prefix", est_prefix, "section prefix path CSV");
  est_cmd->add_option("--d", est_d, "sample dimension");
  est_cmd->add_option("--N", est_level, "grid level");
  est_cmd->add_option("--trials", est_trials, "Monte Carlo trials");
  est_cmd->add_option("--out-json", est_json, "JSON summary file");
  est_cmd->add_option("--out-csv", est_csv, "CSV output file");
  add_common(est_cmd, est_opts);

  // ---- convergence ----
  auto* conv_cmd = app.add_subcommand("convergence", "dyadic approximation decay study");
  CommonOpts conv_opts;
  std::string conv_levels = "2..6", conv_json, conv_csv;
  int conv_d = 1, conv_level = 8;
  std::int64_t conv_trials = 200;
  conv_cmd->add_option("--d", conv_d, "path dimension");
  conv_cmd->add_option("--N", conv_level, "top grid level");
  conv_cmd->add_option("--n", conv_levels, "projection levels, e.g. 2..10 or 2,4,6");
  conv_cmd->add_option("--trials", conv_trials, "Monte Carlo trials");
  conv_cmd->add_option("--out-json", conv_json, "JSON summary file");
  conv_cmd->add_option("--out-csv", conv_csv, "CSV output file");
  add_common(conv_cmd, conv_opts);

  // ---- cross-bound ----
  auto* cb_cmd = app.add_subcommand("cross-bound", "cross-integral mass vs dyadic norm of z");
  CommonOpts cb_opts;
  std::string cb_ref = "builtin", cb_json, cb_csv, cb_scales = "0.5,1,2,4";
  int cb_d = 1, cb_level = 8;
  std::int64_t cb_trials = 200;
  cb_cmd->add_option("--z", cb_ref, "reference path CSV, or 'builtin'");
  cb_cmd->add_option("--d", cb_d, "sample dimension");
  cb_cmd->add_option("--N", cb_level, "grid level for the builtin reference");
  cb_cmd->add_option("--scales", cb_scales, "comma list of scalings of z");
  cb_cmd->add_option("--trials", cb_trials, "Monte Carlo trials");
  cb_cmd->add_option("--out-json", cb_json, "JSON summary file");
  cb_cmd->add_option("--out-csv", cb_csv, "CSV output file");
  add_common(cb_cmd, cb_opts);

  // ---- overlap ----
  auto* ov_cmd = app.add_subcommand("overlap", "conditional section-overlap study");
  CommonOpts ov_opts;
  std::string ov_ref = "builtin", ov_json, ov_csv;
  OverlapConfig ov_cfg;
  ov_cmd->add_option("--z", ov_ref, "reference path CSV, or 'builtin'");
  ov_cmd->add_option("--a", ov_cfg.a, "radius a");
  ov_cmd->add_option("--eps", ov_cfg.epsilon, "dyadic-norm cap of the conditioning event");
  ov_cmd->add_option("--r", ov_cfg.r, "coverage parameter, 0 < r < 1/3");
  ov_cmd->add_option("--d", ov_cfg.prefix_dim, "prefix dimension");
  ov_cmd->add_option("--N", ov_cfg.level, "grid level");
  ov_cmd->add_option("--trials", ov_cfg.trials, "direct-sampling batch size");
  ov_cmd->add_option("--pair-draws", ov_cfg.pair_draws, "draws for pairwise overlaps");
  ov_cmd->add_option("--sections", ov_cfg.section_pool, "sections kept for pairing");
  ov_cmd->add_option("--min-acceptance", ov_cfg.min_acceptance, "abort threshold");
  ov_cmd->add_option("--out-json", ov_json, "JSON summary file");
  ov_cmd->add_option("--out-csv", ov_csv, "CSV output file");
  add_common(ov_cmd, ov_opts);

  // ---- wpi-toy ----
  auto* wpi_cmd = app.add_subcommand("wpi-toy", "finite product-space WPI certificate");
  CommonOpts wpi_opts;
  std::string wpi_space = "builtin", wpi_json, wpi_csv;
  double wpi_eps = 0.05, wpi_eps_prime = 0.05, wpi_delta = 0.01, wpi_floor = 1e-9;
  std::int64_t wpi_corpus = 1000;
  wpi_cmd->add_option("--space", wpi_space, "space JSON file, or 'builtin' (two rectangles)");
  wpi_cmd->add_option("--eps", wpi_eps, "mass budget of the well-overlapping subset");
  wpi_cmd->add_option("--eps-prime", wpi_eps_prime, "mass budget for trimming coefficients");
  wpi_cmd->add_option("--delta", wpi_delta, "WPI delta entering the constants");
  wpi_cmd->add_option("--floor", wpi_floor, "pairwise overlap floor");
  wpi_cmd->add_option("--corpus", wpi_corpus, "random test functions");
  wpi_cmd->add_option("--out-json", wpi_json, "JSON certificate file");
  wpi_cmd->add_option("--out-csv", wpi_csv, "CSV output file");
  add_common(wpi_cmd, wpi_opts);

  // ---- gaussian-gap ----
  auto* gap_cmd = app.add_subcommand("gaussian-gap",
                                     "spectral gap and LSI of a restricted Gaussian");
  CommonOpts gap_opts;
  std::string gap_json, gap_csv;
  double gap_lower = -1.0, gap_upper = 2.0;
  int gap_grid = 2000;
  std::int64_t gap_corpus = 500;
  gap_cmd->add_option("--l", gap_lower, "interval lower end");
  gap_cmd->add_option("--u", gap_upper, "interval upper end");
  gap_cmd->add_option("--grid", gap_grid, "grid points");
  gap_cmd->add_option("--corpus", gap_corpus, "random smooth test functions");
  gap_cmd->add_option("--out-json", gap_json, "JSON summary file");
  gap_cmd->add_option("--out-csv", gap_csv, "CSV output file");
  add_common(gap_cmd, gap_opts);

  // ---- property-suite ----
  auto* prop_cmd = app.add_subcommand("property-suite", "quick invariant checks");
  CommonOpts prop_opts;
  int prop_level = 5;
  std::int64_t prop_cases = 50;
  prop_cmd->add_option("--N", prop_level, "grid level");
  prop_cmd->add_option("--cases", prop_cases, "random cases per property");
  add_common(prop_cmd, prop_opts);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*lift_cmd) {
      check_ci(lift_cmd, lift_opts);
      const VarParams params(lift_opts.p, lift_opts.kappa);
      const DiscretePath w = read_csv(lift_path);
      const RoughLift lw = lift(w);
      std::cout << "level1 = " << fmt(level1_norm(lw, params.p)) << "\n"
                << "level2 = " << fmt(level2_norm(lw, params.p)) << "\n"
                << "cp     = " << fmt(cp_norm(lw, params.p)) << "\n";
      if (!lift_table.empty()) {
        auto os = open_output(lift_table, lift_opts.force);
        const int d = lw.dimension();
        os << "i,j";
        for (int k = 0; k < d; ++k) os << ",x" << k + 1;
        for (int k = 0; k < d; ++k) {
          for (int l = 0; l < d; ++l) os << ",a" << k + 1 << l + 1;
        }
        os << "\n";
        for (Index i = 0; i <= lw.segments(); ++i) {
          for (Index j = i; j <= lw.segments(); ++j) {
            os << i << ',' << j;
            const auto one = lw.level1(i, j);
            for (int k = 0; k < d; ++k) os << ',' << fmt(one(k));
            const auto two = lw.level2(i, j);
            for (int k = 0; k < d; ++k) {
              for (int l = 0; l < d; ++l) os << ',' << fmt(two(k, l));
            }
            os << "\n";
          }
        }
      }
      return 0;
    }

    if (*pvar_cmd) {
      check_ci(pvar_cmd, pvar_opts);
      const VarParams params(pvar_opts.p, pvar_opts.kappa);
      std::cout << fmt(level1_norm(read_csv(pvar_path), params.p)) << "\n";
      return 0;
    }

    if (*dyadic_cmd) {
      check_ci(dyadic_cmd, dyadic_opts);
      const VarParams params(dyadic_opts.p, dyadic_opts.kappa);
      std::cout << fmt(dyadic_norm(read_csv(dyadic_path), params)) << "\n";
      return 0;
    }

    if (*member_cmd) {
      check_ci(member_cmd, member_opts);
      std::ifstream is(member_spec);
      if (!is) throw std::runtime_error("cannot open spec file '" + member_spec + "'");
      const DomainSpec spec = parse_domain_spec(is);
      bool inside = false;
      if (spec.kind == DomainKind::Uab) {
        if (member_path2.empty()) {
          throw std::runtime_error("Uab membership needs --path2");
        }
        inside = contains(spec, read_csv(member_path), read_csv(member_path2));
      } else {
        inside = contains(spec, read_csv(member_path));
      }
      std::cout << (inside ? "true" : "false") << "\n";
      return 0;
    }

    if (*est_cmd) {
      check_ci(est_cmd, est_opts);
      const VarParams params(est_opts.p, est_opts.kappa);
      std::optional<DiscretePath> reference;
      if (est_ref != "zero") reference = read_csv(est_ref);
      std::optional<DiscretePath> prefix;
      if (!est_prefix.empty()) prefix = read_csv(est_prefix);
      const DomainSpec spec(domain_kind_from(est_kind), est_a, params,
                            std::move(reference), est_b, std::move(prefix));
      const EstimateReport report = estimate_measure(spec, est_d, est_level, est_trials,
                                                     est_opts.seed, est_opts.workers);
      nlohmann::json doc = base_config("estimate-measure", est_opts);
      doc["config"]["kind"] = est_kind;
      doc["config"]["a"] = est_a;
      if (est_kind == "Uab") doc["config"]["b"] = est_b;
      doc["config"]["z"] = est_ref;
      doc["config"]["d"] = est_d;
      doc["config"]["N"] = est_level;
      doc["config"]["trials"] = est_trials;
      doc["result"] = report_json(report);
      std::cout << "estimate = " << fmt(report.estimate) << "  ci99 = ["
                << fmt(report.ci_low) << ", " << fmt(report.ci_high) << "]\n";
      if (!est_json.empty()) write_json(doc, est_json, est_opts.force);
      if (!est_csv.empty()) {
        auto os = open_output(est_csv, est_opts.force);
        os << "trials,hits,estimate,ci_low,ci_high,seed\n"
           << report.trials << ',' << report.hits << ',' << fmt(report.estimate) << ','
           << fmt(report.ci_low) << ',' << fmt(report.ci_high) << ',' << report.seed << "\n";
      }
      return 0;
    }

    if (*conv_cmd) {
      check_ci(conv_cmd, conv_opts);
      const VarParams params(conv_opts.p, conv_opts.kappa);
      const std::vector<int> n_list = parse_levels(conv_levels);
      const ConvergenceTable table =
          convergence_study(conv_d, conv_level, n_list, conv_trials, params,
                            conv_opts.seed, conv_opts.workers);
      nlohmann::json doc = base_config("convergence", conv_opts);
      doc["config"]["d"] = conv_d;
      doc["config"]["N"] = conv_level;
      doc["config"]["n"] = n_list;
      doc["config"]["trials"] = conv_trials;
      doc["result"]["slope_distance"] = table.distance_fit.slope;
      doc["result"]["slope_level2"] = table.level2_fit.slope;
      doc["result"]["slope_cross"] = table.cross_fit.slope;
      doc["result"]["residual_distance"] = table.distance_fit.residual_rms;
      doc["result"]["residual_level2"] = table.level2_fit.residual_rms;
      doc["result"]["residual_cross"] = table.cross_fit.residual_rms;
      std::cout << "slope(level2) = " << fmt(table.level2_fit.slope)
                << "  slope(cross) = " << fmt(table.cross_fit.slope) << "\n";
      if (!conv_json.empty()) write_json(doc, conv_json, conv_opts.force);
      if (!conv_csv.empty()) {
        auto os = open_output(conv_csv, conv_opts.force);
        os << "quantity,n,mean,sd,trials\n";
        for (const auto& row : table.rows) {
          os << "distance," << row.n << ',' << fmt(row.mean_distance) << ','
             << fmt(row.sd_distance) << ',' << table.trials << "\n";
        }
        for (const auto& row : table.rows) {
          os << "level2," << row.n << ',' << fmt(row.mean_level2) << ','
             << fmt(row.sd_level2) << ',' << table.trials << "\n";
        }
        for (const auto& row : table.rows) {
          os << "cross," << row.n << ',' << fmt(row.mean_cross) << ','
             << fmt(row.sd_cross) << ',' << table.trials << "\n";
        }
      }
      return 0;
    }

    if (*cb_cmd) {
      check_ci(cb_cmd, cb_opts);
      const VarParams params(cb_opts.p, cb_opts.kappa);
      const DiscretePath z = cb_ref == "builtin"
                                 ? builtin_reference(1, cb_level, cb_opts.seed)
                                 : read_csv(cb_ref);
      std::vector<double> scales;
      {
        std::stringstream ss(cb_scales);
        std::string cell;
        while (std::getline(ss, cell, ',')) scales.push_back(std::stod(cell));
      }
      const CrossBoundReport report = cross_bound_study(
          z, cb_d, cb_trials, params, cb_opts.seed, scales, cb_opts.workers);
      nlohmann::json doc = base_config("cross-bound", cb_opts);
      doc["config"]["z"] = cb_ref;
      doc["config"]["d"] = cb_d;
      doc["config"]["N"] = z.level();
      doc["config"]["trials"] = cb_trials;
      doc["config"]["scales"] = report.scales;
      doc["result"]["ratios"] = report.ratios;
      doc["result"]["max_relative_spread"] = report.max_relative_spread;
      std::cout << "ratio spread = " << fmt(report.max_relative_spread) << "\n";
      if (!cb_json.empty()) write_json(doc, cb_json, cb_opts.force);
      if (!cb_csv.empty()) {
        auto os = open_output(cb_csv, cb_opts.force);
        os << "scale,ratio\n";
        for (std::size_t i = 0; i < report.scales.size(); ++i) {
          os << fmt(report.scales[i]) << ',' << fmt(report.ratios[i]) << "\n";
        }
      }
      return report.max_relative_spread <= 1e-2 ? 0 : 2;
    }

    if (*ov_cmd) {
      check_ci(ov_cmd, ov_opts);
      const VarParams params(ov_opts.p, ov_opts.kappa);
      ov_cfg.seed = ov_opts.seed;
      ov_cfg.workers = ov_opts.workers;
      const DiscretePath z = ov_ref == "builtin"
                                 ? builtin_reference(1, ov_cfg.level, ov_opts.seed)
                                 : read_csv(ov_ref);
      const OverlapReport report = overlap_study(z, params, ov_cfg);
      nlohmann::json doc = base_config("overlap", ov_opts);
      doc["config"]["z"] = ov_ref;
      doc["config"]["a"] = ov_cfg.a;
      doc["config"]["eps"] = ov_cfg.epsilon;
      doc["config"]["r"] = ov_cfg.r;
      doc["config"]["d"] = ov_cfg.prefix_dim;
      doc["config"]["N"] = ov_cfg.level;
      doc["config"]["trials"] = ov_cfg.trials;
      doc["config"]["pair_draws"] = ov_cfg.pair_draws;
      doc["config"]["sections"] = ov_cfg.section_pool;
      doc["result"]["alpha"] = report_json(report.alpha);
      doc["result"]["alpha_bar"] = report_json(report.alpha_bar);
      doc["result"]["acceptance_rate"] = report.acceptance_rate;
      doc["result"]["conditional_pool"] = report.conditional_pool;
      doc["result"]["tail_estimate"] = report.tail_estimate;
      doc["result"]["tail_benchmark"] = report.tail_benchmark;
      doc["result"]["v_candidates"] = report.v_candidates;
      doc["result"]["v_members"] = report.v_members;
      doc["result"]["pairs_tested"] = report.pairs_tested;
      doc["result"]["min_pairwise_overlap"] = report.min_pairwise_overlap;
      doc["result"]["min_overlap_se"] = report.min_overlap_se;
      doc["result"]["one_third_alpha_bar"] = report.one_third_alpha_bar;
      doc["result"]["bound_holds_within_3se"] = report.bound_holds_within_3se;
      std::cout << "alpha = " << fmt(report.alpha.estimate)
                << "  alpha_bar = " << fmt(report.alpha_bar.estimate)
                << "  min overlap = " << fmt(report.min_pairwise_overlap)
                << "  benchmark = " << fmt(report.one_third_alpha_bar) << "\n";
      if (!ov_json.empty()) write_json(doc, ov_json, ov_opts.force);
      if (!ov_csv.empty()) {
        auto os = open_output(ov_csv, ov_opts.force);
        os << "alpha,alpha_bar,acceptance_rate,tail_estimate,tail_benchmark,"
              "min_pairwise_overlap,one_third_alpha_bar,pairs_tested\n"
           << fmt(report.alpha.estimate) << ',' << fmt(report.alpha_bar.estimate) << ','
           << fmt(report.acceptance_rate) << ',' << fmt(report.tail_estimate) << ','
           << fmt(report.tail_benchmark) << ',' << fmt(report.min_pairwise_overlap) << ','
           << fmt(report.one_third_alpha_bar) << ',' << report.pairs_tested << "\n";
      }
      return report.bound_holds_within_3se ? 0 : 2;
    }

    if (*wpi_cmd) {
      check_ci(wpi_cmd, wpi_opts);
      const FiniteProductSpace space = wpi_space == "builtin"
                                           ? FiniteProductSpace::two_rectangles()
                                           : FiniteProductSpace::load_json(wpi_space);
      const WpiCertificate cert =
          verify_product_wpi(space, wpi_eps, wpi_eps_prime, wpi_delta, wpi_corpus,
                             wpi_opts.seed, wpi_floor, wpi_opts.workers);
      nlohmann::json doc = base_config("wpi-toy", wpi_opts);
      doc["config"]["space"] = wpi_space;
      doc["config"]["eps"] = cert.eps;
      doc["config"]["eps_prime"] = cert.eps_prime;
      doc["config"]["delta"] = cert.delta;
      doc["config"]["corpus"] = wpi_corpus;
      doc["config"]["overlap_floor"] = wpi_floor;
      doc["result"]["xi"] = cert.xi;
      doc["result"]["delta_eps"] = cert.delta_eps;
      doc["result"]["mass"] = cert.mass;
      doc["result"]["energy_constant"] = cert.energy_constant;
      doc["result"]["supnorm_constant"] = cert.supnorm_constant;
      doc["result"]["max_violation"] = cert.max_violation;
      doc["result"]["max_lhs"] = cert.max_lhs;
      doc["result"]["u1_kept"] = cert.u1_kept;
      doc["result"]["u1_total"] = cert.u1_total;
      std::cout << "xi = " << fmt(cert.xi) << "  delta(eps) = " << fmt(cert.delta_eps)
                << "  max violation = " << fmt(cert.max_violation) << "\n";
      if (!wpi_json.empty()) write_json(doc, wpi_json, wpi_opts.force);
      if (!wpi_csv.empty()) {
        auto os = open_output(wpi_csv, wpi_opts.force);
        os << "xi,delta_eps,energy_constant,supnorm_constant,max_violation\n"
           << fmt(cert.xi) << ',' << fmt(cert.delta_eps) << ','
           << fmt(cert.energy_constant) << ',' << fmt(cert.supnorm_constant) << ','
           << fmt(cert.max_violation) << "\n";
      }
      return cert.max_violation <= 1e-9 ? 0 : 2;
    }

    if (*gap_cmd) {
      check_ci(gap_cmd, gap_opts);
      const GaussianIntervalReport report = gaussian_convex_check(
          gap_lower, gap_upper, gap_grid, gap_corpus, gap_opts.seed);
      nlohmann::json doc = base_config("gaussian-gap", gap_opts);
      doc["config"]["l"] = gap_lower;
      doc["config"]["u"] = gap_upper;
      doc["config"]["grid"] = gap_grid;
      doc["config"]["corpus"] = gap_corpus;
      doc["result"]["mass"] = report.mass;
      doc["result"]["lambda0"] = report.lambda0;
      doc["result"]["lambda1"] = report.lambda1;
      doc["result"]["lsi_max_violation"] = report.lsi_max_violation;
      std::cout << "lambda1 = " << fmt(report.lambda1)
                << "  lsi max violation = " << fmt(report.lsi_max_violation) << "\n";
      if (!gap_json.empty()) write_json(doc, gap_json, gap_opts.force);
      if (!gap_csv.empty()) {
        auto os = open_output(gap_csv, gap_opts.force);
        os << "lower,upper,grid,mass,lambda1,lsi_max_violation\n"
           << fmt(report.lower) << ',' << fmt(report.upper) << ',' << report.grid << ','
           << fmt(report.mass) << ',' << fmt(report.lambda1) << ','
           << fmt(report.lsi_max_violation) << "\n";
      }
      const bool ok = report.lambda1 > 0.0 && report.lsi_max_violation <= 1e-6;
      return ok ? 0 : 2;
    }

    if (*prop_cmd) {
      check_ci(prop_cmd, prop_opts);
      return run_property_suite(prop_level, prop_cases, prop_opts);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

namespace {

int run_property_suite(int level, std::int64_t cases, const CommonOpts& opts) {
  const VarParams params(opts.p, opts.kappa);
  const double p = params.p;
  int failures = 0;
  auto report = [&](const char* name, bool ok, double worst) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "  (worst " << fmt(worst)
              << ")\n";
    if (!ok) ++failures;
  };

  {  // Chen identity on random lifts, all grid triples.
    double worst = 0.0;
    for (std::int64_t c = 0; c < std::min<std::int64_t>(cases, 8); ++c) {
      RngStream rng(opts.seed, static_cast<std::uint64_t>(c));
      const RoughLift lw = lift(sample_brownian(2, level, rng));
      const Index m = lw.segments();
      for (Index i = 0; i <= m; ++i) {
        for (Index j = i; j <= m; ++j) {
          for (Index k = j; k <= m; ++k) {
            const Eigen::MatrixXd res = lw.level2(i, k) - lw.level2(i, j) -
                                        lw.level2(j, k) -
                                        lw.level1(i, j).transpose() * lw.level1(j, k);
            worst = std::max(worst, res.cwiseAbs().maxCoeff());
          }
        }
      }
    }
    report("chen identity residual < 1e-10", worst < 1e-10, worst);
  }

  {  // Cross-integral additivity in the first argument.
    double worst = 0.0;
    for (std::int64_t c = 0; c < cases; ++c) {
      RngStream rng(opts.seed, (std::uint64_t(1) << 32) + static_cast<std::uint64_t>(c));
      const DiscretePath w = sample_brownian(2, level, rng);
      const DiscretePath h = dyadic_project(sample_brownian(2, level, rng), level - 1);
      const DiscretePath z = sample_brownian(2, level, rng);
      const CrossIntegral lhs = cross(w + h, z);
      const CrossIntegral c1 = cross(w, z);
      const CrossIntegral c2 = cross(h, z);
      const Index m = w.segments();
      for (Index i = 0; i <= m; i += std::max<Index>(1, m / 8)) {
        for (Index j = i; j <= m; j += std::max<Index>(1, m / 8)) {
          const Eigen::MatrixXd res = lhs.value(i, j) - c1.value(i, j) - c2.value(i, j);
          worst = std::max(worst, res.cwiseAbs().maxCoeff());
        }
      }
    }
    report("cross-integral additivity < 1e-12", worst < 1e-12, worst);
  }

  {  // Lift scaling: levels scale by c and c^2.
    double worst = 0.0;
    for (std::int64_t c = 0; c < cases; ++c) {
      RngStream rng(opts.seed, (std::uint64_t(2) << 32) + static_cast<std::uint64_t>(c));
      const DiscretePath w = sample_brownian(2, level, rng);
      const double scale = 0.25 + 3.0 * rng.uniform();
      const RoughLift lw = lift(w);
      const RoughLift ls = lift(scale * w);
      const Index m = w.segments();
      for (Index j = 1; j <= m; j += std::max<Index>(1, m / 8)) {
        const Eigen::MatrixXd res = ls.level2(0, j) - scale * scale * lw.level2(0, j);
        worst = std::max(worst, res.cwiseAbs().maxCoeff());
      }
    }
    report("lift scaling (c, c^2) residual < 1e-10", worst < 1e-10, worst);
  }

  {  // Cross norm bound against the Cameron-Martin norm of the integrator.
    double worst = -1e300;
    for (std::int64_t c = 0; c < cases; ++c) {
      RngStream rng(opts.seed, (std::uint64_t(3) << 32) + static_cast<std::uint64_t>(c));
      const DiscretePath h1 = sample_brownian(2, level, rng);
      const DiscretePath h2 = sample_brownian(2, level, rng);
      const double lhs = cross_norm(cross(h1, h2), p);
      const double rhs = level1_norm(h1, p) * cm_norm(h2);
      worst = std::max(worst, lhs - rhs);
    }
    report("cross norm <= ||h1||_p ||h2||_H + 1e-9", worst <= 1e-9, worst);
  }

  {  // Dyadic-norm domination.
    const double constant = dyadic_domination_constant(params);
    double worst = -1e300;
    for (std::int64_t c = 0; c < cases; ++c) {
      RngStream rng(opts.seed, (std::uint64_t(4) << 32) + static_cast<std::uint64_t>(c));
      const DiscretePath h = sample_brownian(1, level, rng);
      worst = std::max(worst, dyadic_norm(h, params) - constant * cm_norm(h));
    }
    report("dyadic norm <= C(p,kappa) cm_norm + 1e-9", worst <= 1e-9, worst);
  }

  {  // Translation correspondence between the centred and shifted domains.
    int mismatches = 0;
    for (std::int64_t c = 0; c < cases; ++c) {
      RngStream rng(opts.seed, (std::uint64_t(5) << 32) + static_cast<std::uint64_t>(c));
      const DiscretePath w = sample_brownian(2, level, rng);
      const DiscretePath h = dyadic_project(sample_brownian(2, level, rng), 2);
      const double a = 0.5 + 4.0 * rng.uniform();
      if (in_B(w, h, a, p) != in_U(w - h, h, a, p)) ++mismatches;
    }
    report("B_{a,h} = U_{a,h} + h on samples", mismatches == 0, double(mismatches));
  }

  return failures == 0 ? 0 : 2;
}

}  // namespace

}  // namespace roughlab::cli
