#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "cannings/casp.hpp"
#include "cannings/exact.hpp"
#include "cannings/forward.hpp"
#include "cannings/graphical.hpp"
#include "cannings/mathutil.hpp"
#include "cannings/moran.hpp"
#include "cannings/parallel.hpp"
#include "cannings/stats.hpp"
#include "report.hpp"

namespace cannings {
namespace cli {

unsigned GlobalOpts::effective_threads() const {
  return threads == 0 ? default_thread_count() : threads;
}

PopulationParams ModelOpts::resolve() const {
  if (n < 2) throw UsageError("--n must be at least 2");
  bool have_s = s >= 0.0;
  bool have_b = s_exponent >= 0.0;
  if (have_s == have_b) {
    throw UsageError("give exactly one of --s and --s-exponent");
  }
  PopulationParams params;
  params.n_pop = n;
  params.s = have_s ? s : std::pow(static_cast<double>(n), -s_exponent);
  try {
    params.weights = parse_weight_model(weights);
    validate_params(params);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return params;
}

namespace {

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled) {
    if (enabled_) start_ = std::chrono::steady_clock::now();
  }
  double seconds() const {
    if (!enabled_) return 0.0;
    auto dt = std::chrono::steady_clock::now() - start_;
    return std::chrono::duration<double>(dt).count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

Value exponent_value(const PopulationParams& params) {
  if (params.s > 0.0) return params.selection_exponent();
  return std::string();
}

std::vector<std::string> fixation_columns(bool with_status) {
  std::vector<std::string> cols = {
      "n",      "s",     "b",         "weights", "rho2",
      "method", "estimate", "stderr", "ci_lo",   "ci_hi",
      "haldane_ref", "ratio", "seed", "wall_time_s"};
  if (with_status) cols.push_back("status");
  return cols;
}

struct FixationOutcome {
  EstimatorResult estimate;
  bool diagnostic_warning = false;
  std::string warning_text;
};

FixationOutcome run_fixation_point(const GlobalOpts& global,
                                   const PopulationParams& params,
                                   const FixationOpts& opts) {
  unsigned threads = global.effective_threads();
  FixationOutcome out;
  if (opts.mode == "forward") {
    int k0 = opts.k0 < 0 ? params.n_pop - 1 : opts.k0;
    std::int64_t horizon =
        opts.max_gens < 0 ? default_max_gens(params) : opts.max_gens;
    auto res = estimate_fixation_forward(params, k0, opts.replicates, horizon,
                                         global.seed, threads);
    out.estimate = res.estimate;
    if (res.unreliable) {
      out.diagnostic_warning = true;
      out.warning_text = "censored fraction above 1% (" +
                         std::to_string(res.n_censored) + " of " +
                         std::to_string(opts.replicates) + ")";
    }
  } else if (opts.mode == "dual") {
    CaspParams cfg;
    cfg.pop = params;
    cfg.burn_in = opts.burn_in < 0 ? default_burn_in(params) : opts.burn_in;
    cfg.thinning = opts.thinning < 0 ? default_thinning(params) : opts.thinning;
    cfg.n_samples = opts.samples;
    auto res = estimate_fixation_dual(cfg, global.seed, threads);
    out.estimate = res.estimate;
    if (!res.diagnostic_ok) {
      out.diagnostic_warning = true;
      out.warning_text =
          "two-start equilibrium means differ by more than 5% (" +
          format_double(res.start_low_mean) + " vs " +
          format_double(res.start_high_mean) + ")";
    }
  } else if (opts.mode == "exact") {
    auto matrix = exact::forward_transition_matrix(params);
    double pi = exact::absorption_probability(matrix, params.n_pop - 1, 0);
    out.estimate.point = pi;
    out.estimate.ci_lo = pi;
    out.estimate.ci_hi = pi;
    out.estimate.seed = global.seed;
    out.estimate.method = "exact";
  } else if (opts.mode == "closed-form") {
    MoranParams moran;
    moran.n_pop = params.n_pop;
    moran.s = params.s;
    moran.gamma = opts.gamma > 0.0 ? opts.gamma : params.rho2();
    double pi = moran_fixation_exact(moran);
    out.estimate.point = pi;
    out.estimate.ci_lo = pi;
    out.estimate.ci_hi = pi;
    out.estimate.seed = global.seed;
    out.estimate.method = "closed-form";
  } else {
    throw UsageError("unknown fixation mode: " + opts.mode);
  }
  return out;
}

std::vector<Value> fixation_row(const GlobalOpts& global,
                                const PopulationParams& params,
                                const std::string& mode,
                                const FixationOutcome& outcome,
                                double wall_time, const std::string& status,
                                bool with_status) {
  double rho2 = params.rho2();
  double haldane_ref = params.s > 0.0 ? 2.0 * params.s / rho2 : 0.0;
  double ratio = haldane_ref > 0.0 ? outcome.estimate.point / haldane_ref : 0.0;
  std::vector<Value> row = {
      static_cast<std::int64_t>(params.n_pop),
      params.s,
      exponent_value(params),
      weight_model_label(params.weights),
      rho2,
      mode,
      outcome.estimate.point,
      outcome.estimate.stderr_,
      outcome.estimate.ci_lo,
      outcome.estimate.ci_hi,
      haldane_ref,
      ratio,
      global.seed,
      wall_time};
  if (with_status) row.push_back(status);
  return row;
}

int finish_diagnostics(const GlobalOpts& global, bool warning,
                       const std::string& text) {
  if (!warning) return 0;
  std::cerr << "warning: " << text << "\n";
  return global.strict ? 4 : 0;
}

}  // namespace

int cmd_fixation(const GlobalOpts& global, const ModelOpts& model,
                 const FixationOpts& opts) {
  PopulationParams params = model.resolve();
  Stopwatch timer(global.timing);
  FixationOutcome outcome;
  try {
    outcome = run_fixation_point(global, params, opts);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Table table;
  table.columns = fixation_columns(false);
  table.rows.push_back(fixation_row(global, params, opts.mode, outcome,
                                    timer.seconds(), "", false));
  write_table(table, global.out, global.format);
  return finish_diagnostics(global, outcome.diagnostic_warning,
                            outcome.warning_text);
}

namespace {

// Random type configuration and sample for one pathwise replicate.
struct PathwiseCounts {
  std::uint64_t fails = 0;
};

std::uint64_t run_pathwise(const GlobalOpts& global,
                           const PopulationParams& params, int g,
                           int sample_size, std::uint64_t replicates,
                           std::string* dump_text) {
  constexpr std::uint64_t kChunk = 64;
  std::size_t n_chunks =
      static_cast<std::size_t>((replicates + kChunk - 1) / kChunk);
  std::vector<std::uint64_t> fails(n_chunks, 0);
  std::vector<std::string> failing_dump(n_chunks);
  parallel_tasks(n_chunks, global.effective_threads(), [&](std::size_t c) {
    auto rng = derive_stream(global.seed, c);
    std::uint64_t begin = c * kChunk;
    std::uint64_t end = std::min(replicates, begin + kChunk);
    for (std::uint64_t r = begin; r < end; ++r) {
      std::vector<int> wild;
      for (int i = 1; i <= params.n_pop; ++i) {
        if (rng.uniform() < 0.5) wild.push_back(i);
      }
      auto real = simulate_graphical(params, g, wild, rng);
      std::set<int> sample;
      while (static_cast<int>(sample.size()) < sample_size) {
        sample.insert(1 + static_cast<int>(rng.uniform_below(params.n_pop)));
      }
      std::vector<int> sample_vec(sample.begin(), sample.end());
      if (!pathwise_duality_assert(real, sample_vec, g)) {
        ++fails[c];
        if (failing_dump[c].empty()) {
          failing_dump[c] = realization_to_text(real);
        }
      }
      if (dump_text && c == 0 && r == 0 && dump_text->empty()) {
        *dump_text = realization_to_text(real);
      }
    }
  });
  std::uint64_t total = 0;
  for (auto f : fails) total += f;
  // A failing realization is the more useful dump for debugging.
  if (dump_text && total > 0) {
    for (const auto& d : failing_dump) {
      if (!d.empty()) {
        *dump_text = d;
        break;
      }
    }
  }
  return total;
}

}  // namespace

int cmd_duality(const GlobalOpts& global, const ModelOpts& model,
                const DualityOpts& opts) {
  PopulationParams params = model.resolve();
  int n_pop = params.n_pop;
  int sample_size = opts.sample > 0 ? opts.sample : std::max(1, n_pop / 10);
  if (sample_size > n_pop) throw UsageError("--sample larger than --n");
  Stopwatch timer(global.timing);
  Table table;
  if (opts.kind == "pathwise") {
    std::string dump;
    std::uint64_t fails =
        run_pathwise(global, params, opts.g, sample_size, opts.replicates,
                     opts.dump_realization.empty() ? nullptr : &dump);
    if (!opts.dump_realization.empty()) {
      write_text(dump, opts.dump_realization);
    }
    table.columns = {"kind", "n",     "s",          "b",
                     "weights", "sample", "g",      "replicates",
                     "fails",   "seed",   "wall_time_s"};
    table.rows.push_back({std::string("pathwise"),
                          static_cast<std::int64_t>(n_pop), params.s,
                          exponent_value(params),
                          weight_model_label(params.weights),
                          static_cast<std::int64_t>(sample_size),
                          static_cast<std::int64_t>(opts.g), opts.replicates,
                          fails, global.seed, timer.seconds()});
    write_table(table, global.out, global.format);
    if (fails > 0) {
      throw PropertyFailure("pathwise duality failed in " +
                            std::to_string(fails) + " realizations");
    }
    return 0;
  }
  if (opts.kind == "exact") {
    int k = opts.k > 0 ? opts.k : n_pop - 1;
    exact::DualityCheck check;
    try {
      check = exact::exact_duality_check(params, k, sample_size, opts.g);
      if (!opts.dump_matrices.empty()) {
        write_text(exact::to_csv(exact::forward_transition_matrix(params)),
                   opts.dump_matrices + ".forward.csv");
        write_text(exact::to_csv(exact::casp_transition_matrix(params)),
                   opts.dump_matrices + ".casp.csv");
      }
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    table.columns = {"kind", "n", "s", "b", "weights", "k", "sample",
                     "g",    "lhs", "rhs", "gap", "seed", "wall_time_s"};
    table.rows.push_back(
        {std::string("exact"), static_cast<std::int64_t>(n_pop), params.s,
         exponent_value(params), weight_model_label(params.weights),
         static_cast<std::int64_t>(k), static_cast<std::int64_t>(sample_size),
         static_cast<std::int64_t>(opts.g), check.lhs, check.rhs, check.gap,
         global.seed, timer.seconds()});
    write_table(table, global.out, global.format);
    return 0;
  }
  if (opts.kind == "sampling" || opts.kind == "moment") {
    int k = opts.k > 0 ? opts.k : n_pop - 1;
    DualityEstimates est;
    if (opts.kind == "sampling") {
      est = sampling_duality_mc(params, k, sample_size, opts.g,
                                opts.replicates, global.seed,
                                global.effective_threads());
    } else {
      est = moment_duality_mc(params, k, sample_size, opts.g, opts.replicates,
                              global.seed, global.effective_threads());
    }
    double combined = std::hypot(est.lhs.stderr_, est.rhs.stderr_);
    double z = combined > 0.0 ? (est.lhs.point - est.rhs.point) / combined : 0.0;
    table.columns = {"kind",      "n",         "s",
                     "b",         "weights",   "k",
                     "sample",    "g",         "replicates",
                     "lhs",       "lhs_stderr", "rhs",
                     "rhs_stderr", "combined_stderr", "z",
                     "seed",      "wall_time_s"};
    table.rows.push_back(
        {opts.kind, static_cast<std::int64_t>(n_pop), params.s,
         exponent_value(params), weight_model_label(params.weights),
         static_cast<std::int64_t>(k), static_cast<std::int64_t>(sample_size),
         static_cast<std::int64_t>(opts.g), opts.replicates, est.lhs.point,
         est.lhs.stderr_, est.rhs.point, est.rhs.stderr_, combined, z,
         global.seed, timer.seconds()});
    write_table(table, global.out, global.format);
    return 0;
  }
  throw UsageError("unknown duality kind: " + opts.kind);
}

namespace {

struct HistogramSummary {
  double mean = 0.0;
  double variance = 0.0;
};

HistogramSummary summarize_pmf(const std::vector<double>& pmf) {
  HistogramSummary s;
  for (std::size_t i = 0; i < pmf.size(); ++i) s.mean += (i + 1.0) * pmf[i];
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    s.variance += (i + 1.0 - s.mean) * (i + 1.0 - s.mean) * pmf[i];
  }
  return s;
}

double pmf_ks_vs_normal(const std::vector<double>& pmf, double mu,
                        double sigma) {
  double cdf = 0.0, ks = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    double z = (i + 1.0 - mu) / sigma;
    ks = std::max(ks, std::fabs(cdf - normal_cdf(z)));
    cdf += pmf[i];
    ks = std::max(ks, std::fabs(cdf - normal_cdf(z)));
  }
  return ks;
}

Table histogram_table(const std::vector<std::int64_t>& counts) {
  Table t;
  t.columns = {"value", "count"};
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    t.rows.push_back({static_cast<std::int64_t>(i + 1), counts[i]});
  }
  return t;
}

}  // namespace

int cmd_equilibrium(const GlobalOpts& global, const ModelOpts& model,
                    const EquilibriumOpts& raw_opts) {
  PopulationParams params = model.resolve();
  if (!(params.s > 0.0)) throw UsageError("equilibrium requires s > 0");
  EquilibriumOpts opts = raw_opts;
  if (opts.histogram_out.empty() && !global.out.empty() && global.out != "-") {
    opts.histogram_out = global.out + ".hist." + global.format;
  }
  Stopwatch timer(global.timing);
  Table summary;
  summary.columns = {"target",  "n",       "s",          "b",
                     "gamma",   "weights", "rho2",       "mean",
                     "variance", "mu_n",   "sigma_n",    "ks_vs_normal",
                     "tv_vs_binomial",     "diagnostic_ok", "samples",
                     "seed",    "wall_time_s"};
  bool warning = false;
  std::string warning_text;
  double rho2 = params.rho2();

  if (opts.target == "casp") {
    CaspParams cfg;
    cfg.pop = params;
    cfg.burn_in = opts.burn_in < 0 ? default_burn_in(params) : opts.burn_in;
    cfg.thinning = opts.thinning < 0 ? default_thinning(params) : opts.thinning;
    cfg.n_samples = opts.samples;
    auto eq = sample_equilibrium(cfg, global.seed, global.effective_threads());
    std::vector<std::int64_t> counts(params.n_pop, 0);
    std::vector<double> values(eq.values.begin(), eq.values.end());
    for (int v : eq.values) ++counts[v - 1];
    auto check = normality_check_casp(values, params.n_pop, params.s, rho2);
    double mean = sample_mean(values);
    double variance = values.size() > 1 ? sample_variance(values) : 0.0;
    if (!eq.diagnostic_ok) {
      warning = true;
      warning_text = "two-start equilibrium diagnostic failed";
    }
    summary.rows.push_back(
        {std::string("casp"), static_cast<std::int64_t>(params.n_pop),
         params.s, exponent_value(params), std::string(),
         weight_model_label(params.weights), rho2, mean, variance, check.mu,
         check.sigma, check.ks, std::string(), eq.diagnostic_ok,
         static_cast<std::uint64_t>(eq.values.size()), global.seed,
         timer.seconds()});
    if (!opts.histogram_out.empty()) {
      write_table(histogram_table(counts), opts.histogram_out, global.format);
    }
  } else if (opts.target == "masp") {
    MoranParams moran;
    moran.n_pop = params.n_pop;
    moran.s = params.s;
    moran.gamma = opts.gamma > 0.0 ? opts.gamma : rho2;
    double p = 2.0 * moran.s / (2.0 * moran.s + moran.gamma);
    int b0 = opts.b0 > 0
                 ? opts.b0
                 : std::max(1, static_cast<int>(std::lround(params.n_pop * p)));
    auto rng = derive_stream(global.seed, 0);
    auto hist = masp_stationary_histogram(moran, b0, opts.jumps,
                                          opts.jump_burn_in, rng);
    auto pmf = masp_equilibrium_pmf(moran);
    double tv = tv_distance(hist, pmf);
    auto s = summarize_pmf(hist);
    double mu = params.n_pop * p;
    double sigma = std::sqrt(params.n_pop * p * (1 - p));
    double ks = pmf_ks_vs_normal(hist, mu, sigma);
    summary.rows.push_back(
        {std::string("masp"), static_cast<std::int64_t>(params.n_pop),
         params.s, exponent_value(params), moran.gamma,
         weight_model_label(params.weights), rho2, s.mean, s.variance, mu,
         sigma, ks, tv, true,
         static_cast<std::uint64_t>(opts.jumps), global.seed, timer.seconds()});
    if (!opts.histogram_out.empty()) {
      Table t;
      t.columns = {"value", "weight"};
      for (std::size_t i = 0; i < hist.size(); ++i) {
        if (hist[i] > 0.0) {
          t.rows.push_back({static_cast<std::int64_t>(i + 1), hist[i]});
        }
      }
      write_table(t, opts.histogram_out, global.format);
    }
  } else {
    throw UsageError("unknown equilibrium target: " + opts.target);
  }
  write_table(summary, global.out, global.format);
  return finish_diagnostics(global, warning, warning_text);
}

int cmd_transitions(const GlobalOpts& global, const ModelOpts& model,
                    const TransitionsOpts& opts) {
  PopulationParams params = model.resolve();
  if (opts.k < 1 || opts.k > params.n_pop) {
    throw UsageError("--k must lie in [1, N]");
  }
  Stopwatch timer(global.timing);
  double rho2 = params.rho2();
  auto pmf = one_step_pmf_empirical(opts.k, params, opts.replicates,
                                    global.seed, global.effective_threads());
  auto ref =
      moran_like_reference(opts.k, params.n_pop, params.s, rho2, opts.c_err);
  double up = pmf.count(1) ? pmf.at(1) : 0.0;
  double down = pmf.count(-1) ? pmf.at(-1) : 0.0;
  double big = 0.0;
  for (const auto& [jump, f] : pmf) {
    if (std::abs(jump) >= 2) big += f;
  }
  auto budget_for = [&](double p_ref) {
    double se = std::sqrt(std::max(p_ref, 1e-12) * (1 - std::min(p_ref, 1.0)) /
                          static_cast<double>(opts.replicates));
    return std::max(5.0 * se, ref.error_budget);
  };
  bool pass_up = std::fabs(up - ref.p_up) <= budget_for(ref.p_up);
  bool pass_down = std::fabs(down - ref.p_down) <= budget_for(ref.p_down);
  bool pass_big = big <= ref.error_budget;
  Table table;
  table.columns = {"n",          "k",          "s",           "b",
                   "weights",    "rho2",       "replicates",  "p_up_emp",
                   "p_up_ref",   "p_down_emp", "p_down_ref",  "p_jump2plus_emp",
                   "error_budget", "pass_up",  "pass_down",   "pass_jump2plus",
                   "seed",       "wall_time_s"};
  table.rows.push_back(
      {static_cast<std::int64_t>(params.n_pop),
       static_cast<std::int64_t>(opts.k), params.s, exponent_value(params),
       weight_model_label(params.weights), rho2, opts.replicates, up, ref.p_up,
       down, ref.p_down, big, ref.error_budget, pass_up, pass_down, pass_big,
       global.seed, timer.seconds()});
  write_table(table, global.out, global.format);
  return 0;
}

int cmd_conditions(const GlobalOpts& global, const ConditionsOpts& opts) {
  if (opts.n_grid.empty()) throw UsageError("--n-grid must be nonempty");
  WeightModel model;
  try {
    model = parse_weight_model(opts.weights);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Stopwatch timer(global.timing);
  ConditionReport report;
  try {
    report = check_regularity(model, opts.n_grid, opts.k_const, global.seed,
                              opts.replicates);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Table table;
  table.columns = {"weights",   "n",     "h_n",
                   "m2_scaled", "m3_scaled", "mohle",
                   "moment_bound_ok", "k_min_admissible", "k_const",
                   "seed",      "wall_time_s"};
  for (const auto& row : report.rows) {
    table.rows.push_back({opts.weights, static_cast<std::int64_t>(row.n_pop),
                          static_cast<std::int64_t>(row.h_n), row.m2_scaled,
                          row.m3_scaled, row.mohle, row.moment_bound_ok,
                          row.k_min_admissible, report.k_const, global.seed,
                          timer.seconds()});
  }
  write_table(table, global.out, global.format);
  return 0;
}

namespace {

std::set<std::string> completed_sweep_keys(const std::string& path) {
  std::set<std::string> keys;
  std::ifstream in(path);
  if (!in) return keys;
  std::string line;
  bool header = true;
  int n_col = -1, b_col = -1, w_col = -1, m_col = -1, status_col = -1;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) fields.push_back(item);
    if (header) {
      for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
        if (fields[i] == "n") n_col = i;
        if (fields[i] == "b") b_col = i;
        if (fields[i] == "weights") w_col = i;
        if (fields[i] == "method") m_col = i;
        if (fields[i] == "status") status_col = i;
      }
      header = false;
      continue;
    }
    if (n_col < 0 || b_col < 0 || w_col < 0 || m_col < 0 || status_col < 0) {
      continue;
    }
    if (static_cast<int>(fields.size()) <= status_col) continue;
    if (fields[status_col] != "ok") continue;
    keys.insert(fields[n_col] + "|" + fields[b_col] + "|" + fields[w_col] +
                "|" + fields[m_col]);
  }
  return keys;
}

}  // namespace

int cmd_sweep(const GlobalOpts& global, const SweepOpts& opts) {
  if (opts.n_grid.empty() || opts.b_grid.empty() || opts.weights_list.empty()) {
    throw UsageError("sweep needs nonempty --n-grid, --b-grid and --weights-list");
  }
  if (global.format != "csv") {
    throw UsageError("sweep output is CSV only (resumability)");
  }
  bool to_file = !global.out.empty() && global.out != "-";
  std::set<std::string> done;
  bool file_exists = false;
  if (to_file) {
    std::ifstream probe(global.out);
    file_exists = probe.good() && probe.peek() != EOF;
    if (file_exists) done = completed_sweep_keys(global.out);
  }

  std::ostringstream pending;
  Table header_only;
  header_only.columns = fixation_columns(true);
  if (!file_exists) pending << to_csv(header_only);

  int exit_code = 0;
  for (const auto& weights : opts.weights_list) {
    for (int n : opts.n_grid) {
      for (double b : opts.b_grid) {
        ModelOpts model;
        model.n = n;
        model.s_exponent = b;
        model.weights = weights;
        PopulationParams params = model.resolve();
        std::string key = std::to_string(n) + "|" +
                          format_double(params.selection_exponent()) + "|" +
                          weights + "|" + opts.mode;
        if (done.count(key)) continue;
        Stopwatch timer(global.timing);
        FixationOpts fx = opts.fixation;
        fx.mode = opts.mode;
        std::string status = "ok";
        FixationOutcome outcome;
        try {
          outcome = run_fixation_point(global, params, fx);
          if (outcome.diagnostic_warning) {
            std::cerr << "warning: " << outcome.warning_text << "\n";
            if (global.strict) exit_code = 4;
          }
        } catch (const std::exception& e) {
          status = std::string("error: ") + e.what();
        }
        Table one;
        one.columns = header_only.columns;
        one.rows.push_back(fixation_row(global, params, opts.mode, outcome,
                                        timer.seconds(), status, true));
        std::string text = to_csv(one);
        // strip the header line, keep the row
        pending << text.substr(text.find('\n') + 1);
      }
    }
  }
  if (to_file) {
    std::ofstream out(global.out, std::ios::app | std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + global.out);
    out << pending.str();
  } else {
    std::cout << pending.str();
  }
  return exit_code;
}

}  // namespace cli
}  // namespace cannings
