#include "cannings/casp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cannings/mathutil.hpp"
#include "cannings/parallel.hpp"

namespace cannings {

std::int64_t branching_step(std::int64_t a, double s, SplitMix64& rng) {
  if (a < 1) throw std::invalid_argument("branching_step: a < 1");
  if (!(s >= 0.0 && s < 1.0)) {
    throw std::invalid_argument("branching_step: s out of range");
  }
  std::int64_t h = 0;
  for (std::int64_t i = 0; i < a; ++i) h += geometric_trials(s, rng);
  return h;
}

int coalescence_step(std::int64_t h, const WeightVector& w, SplitMix64& rng) {
  return distinct_boxes(h, w, rng);
}

int step_casp(int a, const PopulationParams& params, SplitMix64& rng,
              OccupancySampler& occupancy) {
  if (a < 1 || a > params.n_pop) {
    throw std::invalid_argument("step_casp: a out of range");
  }
  std::int64_t h = branching_step(a, params.s, rng);
  return occupancy.sample(h, rng);
}

int step_casp(int a, const PopulationParams& params, SplitMix64& rng) {
  OccupancySampler occupancy(params.weights, params.n_pop);
  return step_casp(a, params, rng, occupancy);
}

void validate_casp_params(const CaspParams& cfg) {
  validate_params(cfg.pop);
  if (cfg.burn_in < 0) throw std::invalid_argument("casp: burn_in < 0");
  if (cfg.thinning < 1) throw std::invalid_argument("casp: thinning < 1");
  if (cfg.n_samples < 1) throw std::invalid_argument("casp: n_samples < 1");
}

std::int64_t default_burn_in(const PopulationParams& params) {
  double s_eff = std::max(params.s, 1.0 / params.n_pop);
  return static_cast<std::int64_t>(
      std::ceil(20.0 / s_eff * std::log(static_cast<double>(params.n_pop))));
}

std::int64_t default_thinning(const PopulationParams& params) {
  double s_eff = std::max(params.s, 1.0 / params.n_pop);
  return static_cast<std::int64_t>(std::ceil(1.0 / s_eff));
}

int casp_start_state(const PopulationParams& params) {
  double center = std::ceil(2.0 * params.n_pop * params.s / params.rho2());
  return std::clamp(static_cast<int>(center), 1, params.n_pop);
}

namespace {

// One equilibrium chain: burn in, then record every thinning-th state.
void run_chain(const CaspParams& cfg, int start, std::int64_t n_record,
               SplitMix64 rng, int* out) {
  OccupancySampler occupancy(cfg.pop.weights, cfg.pop.n_pop);
  int a = start;
  for (std::int64_t i = 0; i < cfg.burn_in; ++i) {
    a = step_casp(a, cfg.pop, rng, occupancy);
  }
  for (std::int64_t r = 0; r < n_record; ++r) {
    for (std::int64_t t = 0; t < cfg.thinning; ++t) {
      a = step_casp(a, cfg.pop, rng, occupancy);
    }
    out[r] = a;
  }
}

constexpr std::uint64_t kDiagLowStream = 1000000;
constexpr std::uint64_t kDiagHighStream = 1000001;

}  // namespace

CaspEquilibriumSample sample_equilibrium(const CaspParams& cfg,
                                         std::uint64_t seed,
                                         unsigned n_threads) {
  validate_casp_params(cfg);
  int n_chains = cfg.n_samples >= 128 ? 4 : 1;
  std::int64_t base = cfg.n_samples / n_chains;
  std::int64_t extra = cfg.n_samples % n_chains;

  CaspEquilibriumSample sample;
  sample.values.assign(static_cast<std::size_t>(cfg.n_samples), 0);
  std::vector<std::int64_t> offsets(n_chains + 1, 0);
  for (int c = 0; c < n_chains; ++c) {
    offsets[c + 1] = offsets[c] + base + (c < extra ? 1 : 0);
  }
  std::int64_t diag_n = std::max<std::int64_t>(256, cfg.n_samples / 4);
  std::vector<int> diag_low(static_cast<std::size_t>(diag_n));
  std::vector<int> diag_high(static_cast<std::size_t>(diag_n));

  int start = casp_start_state(cfg.pop);
  std::size_t n_tasks = static_cast<std::size_t>(n_chains) + 2;
  parallel_tasks(n_tasks, n_threads, [&](std::size_t task) {
    if (task < static_cast<std::size_t>(n_chains)) {
      run_chain(cfg, start, offsets[task + 1] - offsets[task],
                derive_stream(seed, task), sample.values.data() + offsets[task]);
    } else if (task == static_cast<std::size_t>(n_chains)) {
      run_chain(cfg, 1, diag_n, derive_stream(seed, kDiagLowStream),
                diag_low.data());
    } else {
      run_chain(cfg, cfg.pop.n_pop, diag_n,
                derive_stream(seed, kDiagHighStream), diag_high.data());
    }
  });

  auto mean_of = [](const std::vector<int>& v) {
    KahanSum s;
    for (int x : v) s.add(x);
    return s.value() / static_cast<double>(v.size());
  };
  sample.start_low_mean = mean_of(diag_low);
  sample.start_high_mean = mean_of(diag_high);
  double avg = 0.5 * (sample.start_low_mean + sample.start_high_mean);
  sample.diagnostic_ok =
      std::fabs(sample.start_low_mean - sample.start_high_mean) <= 0.05 * avg;
  return sample;
}

DualFixationResult estimate_fixation_dual(const CaspParams& cfg,
                                          std::uint64_t seed,
                                          unsigned n_threads) {
  CaspEquilibriumSample eq = sample_equilibrium(cfg, seed, n_threads);
  std::vector<double> values(eq.values.begin(), eq.values.end());
  double n = static_cast<double>(cfg.pop.n_pop);
  DualFixationResult res;
  res.estimate.point = sample_mean(values) / n;
  if (values.size() >= 64) {
    res.estimate.stderr_ = batch_means_stderr(values) / n;
  } else if (values.size() >= 2) {
    res.estimate.stderr_ =
        std::sqrt(sample_variance(values) / values.size()) / n;
  }
  res.estimate.ci_lo = res.estimate.point - 1.959963984540054 * res.estimate.stderr_;
  res.estimate.ci_hi = res.estimate.point + 1.959963984540054 * res.estimate.stderr_;
  res.estimate.replicates = values.size();
  res.estimate.seed = seed;
  res.estimate.method = "batch-means";
  res.start_low_mean = eq.start_low_mean;
  res.start_high_mean = eq.start_high_mean;
  res.diagnostic_ok = eq.diagnostic_ok;
  return res;
}

std::map<int, double> one_step_pmf_empirical(int k,
                                             const PopulationParams& params,
                                             std::uint64_t replicates,
                                             std::uint64_t seed,
                                             unsigned n_threads) {
  validate_params(params);
  if (k < 1 || k > params.n_pop) {
    throw std::invalid_argument("one_step_pmf_empirical: k out of range");
  }
  if (replicates < 1) {
    throw std::invalid_argument("one_step_pmf_empirical: replicates < 1");
  }
  constexpr std::uint64_t kChunk = 65536;
  std::size_t n_chunks =
      static_cast<std::size_t>((replicates + kChunk - 1) / kChunk);
  std::vector<std::map<int, std::uint64_t>> per_chunk(n_chunks);
  parallel_tasks(n_chunks, n_threads, [&](std::size_t c) {
    auto rng = derive_stream(seed, c);
    OccupancySampler occupancy(params.weights, params.n_pop);
    std::uint64_t begin = c * kChunk;
    std::uint64_t end = std::min(replicates, begin + kChunk);
    auto& counts = per_chunk[c];
    for (std::uint64_t r = begin; r < end; ++r) {
      int next = step_casp(k, params, rng, occupancy);
      ++counts[next - k];
    }
  });
  std::map<int, std::uint64_t> counts;
  for (const auto& m : per_chunk) {
    for (const auto& [jump, c] : m) counts[jump] += c;
  }
  std::map<int, double> freq;
  for (const auto& [jump, c] : counts) {
    freq[jump] = static_cast<double>(c) / static_cast<double>(replicates);
  }
  return freq;
}

MoranLikeReference moran_like_reference(int k, int n_pop, double s,
                                        double rho2, double c_err) {
  if (k < 1 || k > n_pop) {
    throw std::invalid_argument("moran_like_reference: k out of range");
  }
  MoranLikeReference ref;
  ref.p_up = k * s;
  ref.p_down = 0.5 * static_cast<double>(k) * (k - 1.0) * rho2 / n_pop;
  ref.p_stay = 1.0 - ref.p_up - ref.p_down;
  double ks = k * s;
  double k2n = static_cast<double>(k) * k / n_pop;
  ref.error_budget = c_err * (ks * ks + k2n * k2n);
  return ref;
}

}  // namespace cannings
