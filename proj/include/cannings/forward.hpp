#pragma once

#include <cstdint>

#include "cannings/paintbox.hpp"
#include "cannings/stats.hpp"

namespace cannings {

// Absorption of the frequency chain. K counts WILDTYPE individuals, so
// K = 0 means the beneficial type fixed and K = N means it was lost.
enum class AbsorptionState { BeneficialFixed, BeneficialLost, Censored };

struct AbsorptionOutcome {
  AbsorptionState state = AbsorptionState::Censored;
  std::int64_t generations = 0;
};

// Success probability of the mixed binomial transition:
// P(k,W) = (1-s) sum_{i<=k} W_i / ((1-s) sum_{i<=k} W_i + sum_{i>k} W_i).
double wildtype_success_prob(int k, const WeightVector& w, double s);

// One generation of the frequency chain; 0 and N are absorbing.
int step_frequency(int k, const PopulationParams& params, SplitMix64& rng);

// 50 N / max(s, 1/N): comfortably above desk-scale absorption times, so
// censoring is visible rather than silent.
std::int64_t default_max_gens(const PopulationParams& params);

AbsorptionOutcome run_to_absorption(const PopulationParams& params, int k0,
                                    std::int64_t max_gens, SplitMix64& rng);

struct ForwardFixationResult {
  EstimatorResult estimate;  // Wilson interval for P(BeneficialFixed)
  std::uint64_t n_fixed = 0;
  std::uint64_t n_lost = 0;
  std::uint64_t n_censored = 0;
  bool unreliable = false;  // censored fraction above 1%
};

// Direct absorption Monte Carlo. Replicates are split into fixed-size
// chunks with streams derived from (seed, chunk index); counts are summed,
// so the result is identical for any thread count.
ForwardFixationResult estimate_fixation_forward(const PopulationParams& params,
                                                int k0,
                                                std::uint64_t replicates,
                                                std::int64_t max_gens,
                                                std::uint64_t seed,
                                                unsigned n_threads = 1);

}  // namespace cannings
