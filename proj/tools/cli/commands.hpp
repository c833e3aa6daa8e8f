#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cannings/paintbox.hpp"

namespace cannings {
namespace cli {

// exit code 2
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// exit code 3 (a property the model guarantees failed empirically)
struct PropertyFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOpts {
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
  std::string out = "-";
  std::string format = "csv";
  bool strict = false;
  bool timing = false;  // off by default so outputs are byte-reproducible

  unsigned effective_threads() const;
};

struct ModelOpts {
  int n = 0;
  double s = -1.0;           // negative: not given
  double s_exponent = -1.0;  // negative: not given
  std::string weights = "wf";

  PopulationParams resolve() const;
};

struct FixationOpts {
  std::string mode;  // forward | dual | exact | closed-form
  double gamma = -1.0;
  std::uint64_t replicates = 100000;
  int k0 = -1;  // default N-1
  std::int64_t max_gens = -1;
  std::int64_t burn_in = -1;
  std::int64_t thinning = -1;
  std::int64_t samples = 10000;
};

struct DualityOpts {
  std::string kind;  // pathwise | sampling | moment | exact
  int k = -1;
  int sample = -1;
  int g = 1;
  std::uint64_t replicates = 100000;
  std::string dump_matrices;     // exact: write PREFIX.{forward,casp}.csv
  std::string dump_realization;  // pathwise: write one realization as text
};

struct EquilibriumOpts {
  std::string target;  // casp | masp
  double gamma = -1.0;
  std::int64_t burn_in = -1;
  std::int64_t thinning = -1;
  std::int64_t samples = 10000;
  std::int64_t jumps = 4000000;
  std::int64_t jump_burn_in = 10000;
  int b0 = -1;
  std::string histogram_out;  // empty: skip histogram file
};

struct TransitionsOpts {
  int k = 0;
  std::uint64_t replicates = 1000000;
  double c_err = 10.0;
};

struct ConditionsOpts {
  std::string weights = "wf";
  std::vector<int> n_grid;
  double k_const = 8.0;
  std::uint64_t replicates = 100000;
};

struct SweepOpts {
  std::vector<int> n_grid;
  std::vector<double> b_grid;
  std::vector<std::string> weights_list;
  std::string mode = "dual";
  FixationOpts fixation;
};

int cmd_fixation(const GlobalOpts& global, const ModelOpts& model,
                 const FixationOpts& opts);
int cmd_duality(const GlobalOpts& global, const ModelOpts& model,
                const DualityOpts& opts);
int cmd_equilibrium(const GlobalOpts& global, const ModelOpts& model,
                    const EquilibriumOpts& opts);
int cmd_transitions(const GlobalOpts& global, const ModelOpts& model,
                    const TransitionsOpts& opts);
int cmd_conditions(const GlobalOpts& global, const ConditionsOpts& opts);
int cmd_sweep(const GlobalOpts& global, const SweepOpts& opts);

}  // namespace cli
}  // namespace cannings
