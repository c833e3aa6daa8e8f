#pragma once

#include <string>
#include <vector>

#include "cannings/paintbox.hpp"

namespace cannings {
namespace exact {

// Dense row-stochastic matrix. state_offset is 0 for the frequency chain
// on {0..N} and 1 for the CASP on {1..N}.
struct TransitionMatrix {
  int dim = 0;
  int state_offset = 0;
  std::vector<double> entries;
  double truncation_residual = 0.0;

  double at(int i, int j) const { return entries[static_cast<std::size_t>(i) * dim + j]; }
  double& at(int i, int j) { return entries[static_cast<std::size_t>(i) * dim + j]; }
};

// Row-major CSV with a first header line carrying dim and state_offset.
std::string to_csv(const TransitionMatrix& m);

// Distribution of the number of occupied boxes after h uniform throws into
// n_pop boxes: P(b) = S2(h,b) N(N-1)...(N-b+1) / N^h, computed in log
// space (Stirling triangle by dynamic programming). h up to 200.
std::vector<double> occupancy_pmf_uniform(int h, int n_pop);

// Frequency-chain matrix on {0..N}. Wright-Fisher rows are exact binomial
// rows; symmetric Dirichlet rows integrate the binomial kernel against the
// Beta(k a,(N-k)a) law of the wildtype mass by Gauss-Legendre quadrature.
TransitionMatrix forward_transition_matrix(const PopulationParams& params,
                                           int quadrature_nodes = 256);

// CASP matrix on {1..N} for Wright-Fisher weights: negative binomial
// branching mixed against the uniform occupancy law, truncated where the
// branching tail drops below tail_tol, rows renormalized.
TransitionMatrix casp_transition_matrix(const PopulationParams& params,
                                        double tail_tol = 1e-14);

// Probability of absorbing at `target` (0 or N) from k0, by the dense
// linear solve (I - Q) x = r on the interior states.
double absorption_probability(const TransitionMatrix& m, int k0, int target);

// Left eigenvector for eigenvalue 1 by power iteration to sup-norm
// residual 1e-13, normalized to sum 1.
std::vector<double> stationary_distribution(const TransitionMatrix& m);

struct DualityCheck {
  double lhs = 0.0;  // E[falling(K_g,n)/falling(N,n) | K_0=k]
  double rhs = 0.0;  // E[falling(k,A_g)/falling(N,A_g) | A_0=n]
  double gap = 0.0;
};

// Both sides of the hypergeometric sampling duality after g generations,
// evaluated exactly through matrix powers (Wright-Fisher weights).
DualityCheck exact_duality_check(const PopulationParams& params, int k, int n,
                                 int g);

// Stationary law of the CASP restricted to {1..k_max}, for desk-scale
// checks at large N where the full matrix is out of reach. Mass that the
// kernel sends above k_max is folded into k_max; valid when the
// equilibrium is concentrated far below k_max. Wright-Fisher weights.
std::vector<double> casp_truncated_stationary(const PopulationParams& params,
                                              int k_max,
                                              double tail_tol = 1e-14);

}  // namespace exact
}  // namespace cannings
