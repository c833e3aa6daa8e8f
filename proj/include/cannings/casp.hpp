#pragma once

#include <cstdint>
#include <map>

#include "cannings/paintbox.hpp"
#include "cannings/stats.hpp"

namespace cannings {

// Branching half-step: H = sum of a iid Geometric(1-s) trial counts, i.e.
// H ~ NegBin(a, 1-s) supported on {a, a+1, ...}.
std::int64_t branching_step(std::int64_t a, double s, SplitMix64& rng);

// Coalescence half-step: number of distinct boxes hit by h independent
// throws with box probabilities w.
int coalescence_step(std::int64_t h, const WeightVector& w, SplitMix64& rng);

// One full CASP transition: branch, then coalesce against a fresh paintbox
// draw. The overload with an OccupancySampler reuses its buffers; the
// plain overload builds one per call.
int step_casp(int a, const PopulationParams& params, SplitMix64& rng,
              OccupancySampler& occupancy);
int step_casp(int a, const PopulationParams& params, SplitMix64& rng);

struct CaspParams {
  PopulationParams pop;
  std::int64_t burn_in = 0;
  std::int64_t thinning = 1;
  std::int64_t n_samples = 1;
};

void validate_casp_params(const CaspParams& cfg);

// Heuristic defaults, guarded by the two-start diagnostic below:
// burn-in ceil(20 (1/s) ln N), thinning ceil(1/s), start state
// clamp(ceil(2 N s / rho2), 1, N) (the center of attraction).
std::int64_t default_burn_in(const PopulationParams& params);
std::int64_t default_thinning(const PopulationParams& params);
int casp_start_state(const PopulationParams& params);

struct CaspEquilibriumSample {
  std::vector<int> values;  // thinned states, chain-major order
  double start_low_mean = 0.0;   // diagnostic chain started at 1
  double start_high_mean = 0.0;  // diagnostic chain started at N
  bool diagnostic_ok = true;     // two-start means within 5% relative
};

// Draws n_samples approximate equilibrium states. Work is split over a
// fixed number of logical chains (4 once n_samples >= 128) with streams
// derived from (seed, chain), so output is thread-count independent.
CaspEquilibriumSample sample_equilibrium(const CaspParams& cfg,
                                         std::uint64_t seed,
                                         unsigned n_threads = 1);

struct DualFixationResult {
  EstimatorResult estimate;  // mean(A_eq)/N with batch-means stderr
  double start_low_mean = 0.0;
  double start_high_mean = 0.0;
  bool diagnostic_ok = true;
};

// Fixation probability through the sampling duality: pi_N = E[A_eq]/N.
DualFixationResult estimate_fixation_dual(const CaspParams& cfg,
                                          std::uint64_t seed,
                                          unsigned n_threads = 1);

// Empirical one-step jump distribution of A_{m+1}-k given A_m = k.
std::map<int, double> one_step_pmf_empirical(int k,
                                             const PopulationParams& params,
                                             std::uint64_t replicates,
                                             std::uint64_t seed,
                                             unsigned n_threads = 1);

// Moran-like reference transition probabilities near the center, with the
// error budget c_err (k^2 s^2 + k^4 / N^2).
struct MoranLikeReference {
  double p_stay = 0.0;
  double p_up = 0.0;
  double p_down = 0.0;
  double error_budget = 0.0;
};

MoranLikeReference moran_like_reference(int k, int n_pop, double s,
                                        double rho2, double c_err = 10.0);

}  // namespace cannings
