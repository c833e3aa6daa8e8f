#pragma once

#include <cstdint>
#include <vector>

#include "cannings/rng.hpp"

namespace cannings {

// Moran model with neutral reproduction rate gamma/2 per individual and
// selection strength s. Set gamma = rho^2 when pairing with a Cannings
// model, which matches the coupling's neutral rate.
struct MoranParams {
  int n_pop = 1;
  double s = 0.0;
  double gamma = 1.0;
};

void validate_moran(const MoranParams& p);

struct MaspRates {
  double up = 0.0;    // k -> k+1 at rate k s (N-k)/N
  double down = 0.0;  // k -> k-1 at rate (gamma/N) C(k,2)
};

MaspRates masp_rates(int k, const MoranParams& p);

// Stationary law of the MASP: Binomial(N, 2s/(2s+gamma)) conditioned to be
// positive, as a pmf over {1,...,N} (index 0 holds state 1).
std::vector<double> masp_equilibrium_pmf(const MoranParams& p);

// E[B_eq]/N = p / (1 - (1-p)^N) with p = 2s/(2s+gamma); exact Moran
// fixation probability of a single beneficial mutant.
double moran_fixation_exact(const MoranParams& p);

// Haldane's asymptotics 2 s / rho^2.
double haldane_approx(double s, double rho2);

// Kimura's weak-selection formula for s = alpha/N:
// (2 alpha / (N gamma)) / (1 - exp(-2 alpha / gamma)).
double kimura_approx(double alpha, double gamma, int n_pop);

// Strong-selection limit 2s/(2s+gamma).
double strong_selection_approx(double s, double gamma);

// Embedded jump chain of the MASP: from k go up with probability
// up/(up+down), else down. State 1 with s = 0 is absorbing. Returns the
// trajectory including the initial state (length n_jumps + 1).
std::vector<int> simulate_masp_embedded(const MoranParams& p, int b0,
                                        std::int64_t n_jumps, SplitMix64& rng);

// Occupation histogram of the embedded chain reweighted by the holding
// times 1/r(k), normalized to a pmf over {1,...,N}. burn_in jumps are
// discarded first.
std::vector<double> masp_stationary_histogram(const MoranParams& p, int b0,
                                              std::int64_t n_jumps,
                                              std::int64_t burn_in,
                                              SplitMix64& rng);

}  // namespace cannings
