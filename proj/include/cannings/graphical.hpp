#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cannings/paintbox.hpp"
#include "cannings/stats.hpp"

namespace cannings {

// One uniform pick from the unit square, with the vertical interval it
// landed in already resolved against the parent generation's weights.
struct Pick {
  double x = 0.0;
  double y = 0.0;
  int box = 0;
};

// Pick history of one individual (j,g): picks run up to and including the
// first with x <= 1-s, so G(j,g) = picks.size(). gamma is the 1-based
// index of the decisive pick that assigned the parent.
struct PickHistory {
  std::vector<Pick> picks;
  int parent = 0;
  int gamma = 0;
  bool wildtype = false;
};

// A full realization of the graphical construction over generations
// 0..g_max. The same picks drive the forward type transport and the
// backward potential-ancestor sets; that shared randomness is what makes
// the duality check pathwise.
struct GraphicalRealization {
  int n_pop = 0;
  double s = 0.0;
  int g_max = 0;
  // wildtype[g][i]: individual (i+1, g) carries the wildtype.
  std::vector<std::vector<char>> wildtype;
  // individuals[g-1][j]: pick history of (j+1, g), g = 1..g_max.
  std::vector<std::vector<PickHistory>> individuals;
  // weights[g-1]: paintbox of generation g-1 used by children at g.
  std::vector<WeightVector> weights;
};

// Builds a realization: for each child, picks are drawn until the first
// lands in [0,1-s] x [0,1]; the parent is the box of the first pick in the
// region formed by beneficial rows at full width and wildtype rows cut at
// 1-s; the child inherits the parent's type.
GraphicalRealization simulate_graphical(const PopulationParams& params,
                                        int g_max,
                                        const std::vector<int>& initial_wildtype,
                                        SplitMix64& rng);

// Potential-ancestor sets A_0 = J, A_{m+1} = union of all boxes hit by the
// stored picks of the members of A_m. Level m lives in generation g-m.
std::vector<std::vector<int>> extract_ancestors(const GraphicalRealization& real,
                                                const std::vector<int>& sample,
                                                int g);

// TRUE iff {J entirely wildtype in generation g} equals {all potential
// ancestors of J in generation 0 are wildtype}. The construction makes
// this an almost-sure event equality, so FALSE indicates a bug.
bool pathwise_duality_assert(const GraphicalRealization& real,
                             const std::vector<int>& sample, int g);

// Human-readable dump of a realization for manual audit.
std::string realization_to_text(const GraphicalRealization& real);

struct DualityEstimates {
  EstimatorResult lhs;
  EstimatorResult rhs;
};

// Monte Carlo version of the sampling duality: lhs draws a fresh uniform
// n-subset against a forward trajectory, rhs weights the CASP cardinality
// by the hypergeometric factor falling(k,A_g)/falling(N,A_g).
DualityEstimates sampling_duality_mc(const PopulationParams& params, int k,
                                     int n, int g, std::uint64_t replicates,
                                     std::uint64_t seed,
                                     unsigned n_threads = 1);

// Monte Carlo version of the moment duality: both sides estimate the
// probability that an n-sample in generation g is entirely wildtype,
// evaluating the wildtype mass raised to a negative binomial power.
DualityEstimates moment_duality_mc(const PopulationParams& params, int k,
                                   int n, int g, std::uint64_t replicates,
                                   std::uint64_t seed, unsigned n_threads = 1);

}  // namespace cannings
