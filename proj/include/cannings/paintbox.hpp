#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cannings/rng.hpp"
#include "cannings/stats.hpp"

namespace cannings {

// Catalog laws for the positive variable Y behind Dirichlet-type weights
// W_i = Y_i / sum Y. All three have finite exponential moments near 0 and
// finite negative moments, which is what the moment conditions need.
struct YLawConstant {
  double c = 1.0;
};
struct YLawGamma {
  double shape = 1.0;
  double scale = 1.0;
};
struct YLawUniform {
  double a = 0.0;
  double b = 1.0;
};
using YLaw = std::variant<YLawConstant, YLawGamma, YLawUniform>;

// Law of the exchangeable paintbox on the simplex.
struct WrightFisher {};
struct SymmetricDirichlet {
  double alpha = 1.0;
};
struct DirichletType {
  YLaw y_law;
};
using WeightModel =
    std::variant<WrightFisher, SymmetricDirichlet, DirichletType>;

// Throws std::invalid_argument if parameters are out of range.
void validate_model(const WeightModel& model);

// Flat string grammar: wf | dirichlet:ALPHA | dirichlet-type:gamma:SHAPE:SCALE
// | dirichlet-type:uniform:A:B | dirichlet-type:const:C
WeightModel parse_weight_model(const std::string& text);
std::string weight_model_label(const WeightModel& model);

// True when the law degenerates to the deterministic uniform vector
// (WrightFisher itself, or a constant Y).
bool is_degenerate_uniform(const WeightModel& model);

// One realization W = (W_1,...,W_N) on the simplex.
struct WeightVector {
  std::vector<double> w;
  int n() const { return static_cast<int>(w.size()); }
};

// Checks length, nonnegativity and sum-to-one within 1e-12.
void validate_weight_vector(const WeightVector& wv);

WeightVector sample_weights(const WeightModel& model, int n_pop,
                            SplitMix64& rng);

// E[W_1^order] where a closed form exists (WrightFisher, SymmetricDirichlet,
// constant-Y Dirichlet-type); nullopt otherwise.
std::optional<double> analytic_moment(const WeightModel& model, int n_pop,
                                      int order);

EstimatorResult empirical_moment(const WeightModel& model, int n_pop,
                                 int order, std::uint64_t replicates,
                                 SplitMix64& rng);

// Limiting pair-coalescence scale: N^2 E[W_1^2] -> rho^2.
// WrightFisher -> 1, SymmetricDirichlet(a) -> 1 + 1/a,
// Dirichlet-type -> E[Y^2]/E[Y]^2 from the catalog law's moments.
double rho_squared(const WeightModel& model);

// Population-level parameters of one Cannings model with selection.
struct PopulationParams {
  int n_pop = 2;
  double s = 0.0;
  WeightModel weights = WrightFisher{};

  // Selection exponent b with s = N^{-b}; requires s > 0.
  double selection_exponent() const;
  double rho2() const { return rho_squared(weights); }
};

void validate_params(const PopulationParams& params);

// Per-N diagnostics for the moment conditions. h_n = ceil(ln ln N), and
// moment_bound_ok checks E[W_1^n] <= (K h_N / N)^n for all n <= 2 h_N.
struct ConditionRow {
  int n_pop = 0;
  double m2_scaled = 0.0;  // N^2 E[W_1^2]
  double m3_scaled = 0.0;  // N^3 E[W_1^3]
  double mohle = 0.0;      // N E[W_1^2]
  int h_n = 0;
  bool moment_bound_ok = false;
  double k_min_admissible = 0.0;  // smallest K that would pass on this row
};

struct ConditionReport {
  double k_const = 8.0;
  std::vector<ConditionRow> rows;
};

ConditionReport check_regularity(const WeightModel& model,
                                 const std::vector<int>& n_grid,
                                 double k_const = 8.0,
                                 std::uint64_t seed = 1,
                                 std::uint64_t empirical_replicates = 100000);

// Law of the wildtype mass S = sum_{i<=k} W_i. Exchangeability collapses
// this to a one-dimensional draw for every catalog model, which keeps the
// forward chain O(1) per generation where a closed aggregate law exists.
double sample_prefix_mass(const WeightModel& model, int n_pop, int k,
                          SplitMix64& rng);

// Samples the number of distinct boxes hit by h independent throws whose
// box probabilities are a fresh paintbox draw. Marginalizes the weights
// exactly: uniform throws for WrightFisher, the Polya urn for symmetric
// Dirichlet, and materialized weights for general Dirichlet-type laws.
// Keeps reusable buffers, so one instance per chain/thread.
class OccupancySampler {
 public:
  OccupancySampler(const WeightModel& model, int n_pop);

  int sample(std::int64_t h, SplitMix64& rng);
  int n_pop() const { return n_pop_; }

 private:
  int distinct_of_uniform_throws(std::int64_t h, SplitMix64& rng);
  int distinct_of_weighted_throws(std::int64_t h, SplitMix64& rng);

  WeightModel model_;
  int n_pop_;
  enum class Mode { Uniform, PolyaUrn, Materialize } mode_;
  double alpha_ = 0.0;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<double> cumulative_;
};

// Number of distinct boxes hit by h throws with an explicit weight vector.
int distinct_boxes(std::int64_t h, const WeightVector& w, SplitMix64& rng);

}  // namespace cannings
