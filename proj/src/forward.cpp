#include "cannings/forward.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "cannings/mathutil.hpp"
#include "cannings/parallel.hpp"

namespace cannings {

double wildtype_success_prob(int k, const WeightVector& w, double s) {
  validate_weight_vector(w);
  int n = w.n();
  if (k < 0 || k > n) {
    throw std::invalid_argument("wildtype_success_prob: k out of range");
  }
  if (!(s >= 0.0 && s < 1.0)) {
    throw std::invalid_argument("wildtype_success_prob: s out of range");
  }
  if (k == 0) return 0.0;
  if (k == n) return 1.0;
  KahanSum head;
  for (int i = 0; i < k; ++i) head.add(w.w[i]);
  double wild = (1.0 - s) * head.value();
  double benef = std::max(0.0, 1.0 - head.value());
  double p = wild / (wild + benef);
  return std::min(1.0, std::max(0.0, p));
}

int step_frequency(int k, const PopulationParams& params, SplitMix64& rng) {
  int n = params.n_pop;
  if (k < 0 || k > n) {
    throw std::invalid_argument("step_frequency: k out of range");
  }
  if (k == 0 || k == n) return k;
  double mass = sample_prefix_mass(params.weights, n, k, rng);
  double wild = (1.0 - params.s) * mass;
  double p = wild / (wild + (1.0 - mass));
  std::binomial_distribution<int> bin(n, p);
  return bin(rng);
}

std::int64_t default_max_gens(const PopulationParams& params) {
  double denom = std::max(params.s, 1.0 / params.n_pop);
  return static_cast<std::int64_t>(std::ceil(50.0 * params.n_pop / denom));
}

AbsorptionOutcome run_to_absorption(const PopulationParams& params, int k0,
                                    std::int64_t max_gens, SplitMix64& rng) {
  validate_params(params);
  if (k0 < 0 || k0 > params.n_pop) {
    throw std::invalid_argument("run_to_absorption: k0 out of range");
  }
  if (max_gens < 1) throw std::invalid_argument("run_to_absorption: max_gens");
  int k = k0;
  for (std::int64_t g = 0; g <= max_gens; ++g) {
    if (k == 0) return {AbsorptionState::BeneficialFixed, g};
    if (k == params.n_pop) return {AbsorptionState::BeneficialLost, g};
    if (g == max_gens) break;
    k = step_frequency(k, params, rng);
  }
  return {AbsorptionState::Censored, max_gens};
}

ForwardFixationResult estimate_fixation_forward(const PopulationParams& params,
                                                int k0,
                                                std::uint64_t replicates,
                                                std::int64_t max_gens,
                                                std::uint64_t seed,
                                                unsigned n_threads) {
  validate_params(params);
  if (replicates < 1) {
    throw std::invalid_argument("estimate_fixation_forward: replicates < 1");
  }
  constexpr std::uint64_t kChunk = 4096;
  std::size_t n_chunks =
      static_cast<std::size_t>((replicates + kChunk - 1) / kChunk);
  struct Counts {
    std::uint64_t fixed = 0, lost = 0, censored = 0;
  };
  std::vector<Counts> per_chunk(n_chunks);
  parallel_tasks(n_chunks, n_threads, [&](std::size_t c) {
    auto rng = derive_stream(seed, c);
    std::uint64_t begin = c * kChunk;
    std::uint64_t end = std::min(replicates, begin + kChunk);
    Counts counts;
    for (std::uint64_t r = begin; r < end; ++r) {
      AbsorptionOutcome out = run_to_absorption(params, k0, max_gens, rng);
      switch (out.state) {
        case AbsorptionState::BeneficialFixed: ++counts.fixed; break;
        case AbsorptionState::BeneficialLost: ++counts.lost; break;
        case AbsorptionState::Censored: ++counts.censored; break;
      }
    }
    per_chunk[c] = counts;
  });
  ForwardFixationResult res;
  for (const auto& c : per_chunk) {
    res.n_fixed += c.fixed;
    res.n_lost += c.lost;
    res.n_censored += c.censored;
  }
  res.estimate = wilson_interval(res.n_fixed, replicates);
  res.estimate.seed = seed;
  res.unreliable =
      static_cast<double>(res.n_censored) > 0.01 * static_cast<double>(replicates);
  return res;
}

}  // namespace cannings
