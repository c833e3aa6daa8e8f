#include "cannings/graphical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cannings/casp.hpp"
#include "cannings/forward.hpp"
#include "cannings/mathutil.hpp"
#include "cannings/parallel.hpp"

namespace cannings {

namespace {

constexpr int kMaxPop = 1000;
constexpr int kMaxGens = 1000;

// Vertical interval lookup; ties at interval boundaries resolve to the
// lower box index.
int vertical_box(const std::vector<double>& cumulative, double y) {
  auto it = std::lower_bound(cumulative.begin(), cumulative.end(), y);
  if (it == cumulative.end()) --it;
  return static_cast<int>(it - cumulative.begin());
}

}  // namespace

GraphicalRealization simulate_graphical(const PopulationParams& params,
                                        int g_max,
                                        const std::vector<int>& initial_wildtype,
                                        SplitMix64& rng) {
  validate_params(params);
  if (g_max < 1) throw std::invalid_argument("simulate_graphical: g_max < 1");
  if (params.n_pop > kMaxPop || g_max > kMaxGens) {
    throw std::invalid_argument(
        "simulate_graphical: realization bounds are N <= 1000, g <= 1000");
  }
  int n = params.n_pop;
  GraphicalRealization real;
  real.n_pop = n;
  real.s = params.s;
  real.g_max = g_max;
  real.wildtype.assign(g_max + 1, std::vector<char>(n, 0));
  for (int i : initial_wildtype) {
    if (i < 1 || i > n) {
      throw std::invalid_argument("simulate_graphical: wildtype index");
    }
    real.wildtype[0][i - 1] = 1;
  }
  real.individuals.resize(g_max);
  real.weights.resize(g_max);

  double threshold = 1.0 - params.s;
  std::vector<double> cumulative(n);
  for (int g = 1; g <= g_max; ++g) {
    real.weights[g - 1] = sample_weights(params.weights, n, rng);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += real.weights[g - 1].w[i];
      cumulative[i] = acc;
    }
    cumulative[n - 1] = 1.0;
    const auto& parent_types = real.wildtype[g - 1];
    auto& children = real.individuals[g - 1];
    children.resize(n);
    for (int j = 0; j < n; ++j) {
      PickHistory& hist = children[j];
      hist.picks.clear();
      // Draw until the first pick with x <= 1-s; resolve the parent on the
      // way: a beneficial row captures any pick, a wildtype row only picks
      // left of the selection line.
      bool resolved = false;
      for (;;) {
        Pick p;
        p.x = rng.uniform();
        p.y = rng.uniform();
        p.box = vertical_box(cumulative, p.y);
        hist.picks.push_back(p);
        bool final_pick = p.x <= threshold;
        if (!resolved) {
          bool parent_wild = parent_types[p.box] != 0;
          if (!parent_wild || final_pick) {
            hist.parent = p.box + 1;
            hist.gamma = static_cast<int>(hist.picks.size());
            hist.wildtype = parent_wild;
            resolved = true;
          }
        }
        if (final_pick) break;
      }
      real.wildtype[g][j] = hist.wildtype ? 1 : 0;
    }
  }
  return real;
}

std::vector<std::vector<int>> extract_ancestors(const GraphicalRealization& real,
                                                const std::vector<int>& sample,
                                                int g) {
  if (sample.empty()) throw std::invalid_argument("extract_ancestors: empty J");
  if (g < 0 || g > real.g_max) {
    throw std::invalid_argument("extract_ancestors: g out of range");
  }
  std::vector<std::vector<int>> levels;
  std::vector<char> current(real.n_pop, 0);
  for (int i : sample) {
    if (i < 1 || i > real.n_pop) {
      throw std::invalid_argument("extract_ancestors: index out of range");
    }
    current[i - 1] = 1;
  }
  auto collect = [&](const std::vector<char>& mask) {
    std::vector<int> out;
    for (int i = 0; i < real.n_pop; ++i) {
      if (mask[i]) out.push_back(i + 1);
    }
    return out;
  };
  levels.push_back(collect(current));
  std::vector<char> next(real.n_pop, 0);
  for (int m = 0; m < g; ++m) {
    int child_gen = g - m;  // members of A_m live in this generation
    std::fill(next.begin(), next.end(), 0);
    const auto& children = real.individuals[child_gen - 1];
    for (int j = 0; j < real.n_pop; ++j) {
      if (!current[j]) continue;
      for (const Pick& p : children[j].picks) next[p.box] = 1;
    }
    levels.push_back(collect(next));
    current.swap(next);
  }
  return levels;
}

bool pathwise_duality_assert(const GraphicalRealization& real,
                             const std::vector<int>& sample, int g) {
  auto levels = extract_ancestors(real, sample, g);
  bool sample_all_wild = true;
  for (int i : sample) {
    if (!real.wildtype[g][i - 1]) {
      sample_all_wild = false;
      break;
    }
  }
  bool ancestors_all_wild = true;
  for (int i : levels[g]) {
    if (!real.wildtype[0][i - 1]) {
      ancestors_all_wild = false;
      break;
    }
  }
  return sample_all_wild == ancestors_all_wild;
}

std::string realization_to_text(const GraphicalRealization& real) {
  std::ostringstream out;
  out << "n_pop " << real.n_pop << " s " << real.s << " g_max " << real.g_max
      << "\n";
  auto types = [&](int g) {
    std::string t;
    for (char c : real.wildtype[g]) t += c ? 'w' : 'b';
    return t;
  };
  out << "gen 0 types " << types(0) << "\n";
  for (int g = 1; g <= real.g_max; ++g) {
    out << "gen " << g << " types " << types(g) << "\n";
    out << "  weights";
    for (double w : real.weights[g - 1].w) out << ' ' << w;
    out << "\n";
    for (int j = 0; j < real.n_pop; ++j) {
      const PickHistory& h = real.individuals[g - 1][j];
      out << "  child " << (j + 1) << " parent " << h.parent << " gamma "
          << h.gamma << " picks";
      for (const Pick& p : h.picks) {
        out << " (" << p.x << ',' << p.y << "->" << (p.box + 1) << ')';
      }
      out << "\n";
    }
  }
  return out.str();
}

namespace {

// Uniform n-subset of [N] by partial Fisher-Yates over a scratch array.
void uniform_subset(int n_pop, int n, std::vector<int>& scratch,
                    std::vector<int>& out, SplitMix64& rng) {
  scratch.resize(n_pop);
  for (int i = 0; i < n_pop; ++i) scratch[i] = i + 1;
  out.clear();
  for (int i = 0; i < n; ++i) {
    auto j = i + static_cast<int>(rng.uniform_below(n_pop - i));
    std::swap(scratch[i], scratch[j]);
    out.push_back(scratch[i]);
  }
}

struct MomentAccumulator {
  KahanSum sum, sumsq;
  void add(double v) {
    sum.add(v);
    sumsq.add(v * v);
  }
};

EstimatorResult finalize_mean(const std::vector<MomentAccumulator>& chunks,
                              std::uint64_t replicates, std::uint64_t seed) {
  KahanSum sum, sumsq;
  for (const auto& c : chunks) {
    sum.add(c.sum.value());
    sumsq.add(c.sumsq.value());
  }
  double n = static_cast<double>(replicates);
  EstimatorResult r;
  r.point = sum.value() / n;
  double var = std::max(0.0, sumsq.value() / n - r.point * r.point);
  r.stderr_ = replicates > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  r.ci_lo = r.point - 1.959963984540054 * r.stderr_;
  r.ci_hi = r.point + 1.959963984540054 * r.stderr_;
  r.replicates = replicates;
  r.seed = seed;
  r.method = "normal";
  return r;
}

constexpr std::uint64_t kChunk = 16384;

}  // namespace

DualityEstimates sampling_duality_mc(const PopulationParams& params, int k,
                                     int n, int g, std::uint64_t replicates,
                                     std::uint64_t seed, unsigned n_threads) {
  validate_params(params);
  if (k < 1 || k > params.n_pop || n < 1 || n > params.n_pop || g < 0) {
    throw std::invalid_argument("sampling_duality_mc: bad arguments");
  }
  std::size_t n_chunks =
      static_cast<std::size_t>((replicates + kChunk - 1) / kChunk);
  std::vector<std::uint64_t> lhs_hits(n_chunks, 0);
  std::vector<MomentAccumulator> rhs_chunks(n_chunks);
  parallel_tasks(n_chunks, n_threads, [&](std::size_t c) {
    auto rng = derive_stream(seed, c);
    OccupancySampler occupancy(params.weights, params.n_pop);
    std::vector<int> scratch, subset;
    std::uint64_t begin = c * kChunk;
    std::uint64_t end = std::min(replicates, begin + kChunk);
    for (std::uint64_t r = begin; r < end; ++r) {
      int freq = k;
      for (int step = 0; step < g; ++step) {
        freq = step_frequency(freq, params, rng);
      }
      uniform_subset(params.n_pop, n, scratch, subset, rng);
      bool inside = true;
      for (int i : subset) {
        if (i > freq) {
          inside = false;
          break;
        }
      }
      if (inside) ++lhs_hits[c];

      int a = n;
      for (int step = 0; step < g; ++step) {
        a = step_casp(a, params, rng, occupancy);
      }
      rhs_chunks[c].add(falling_ratio(k, params.n_pop, a));
    }
  });
  std::uint64_t hits = 0;
  for (auto h : lhs_hits) hits += h;
  DualityEstimates est;
  est.lhs = wilson_interval(hits, replicates);
  est.lhs.seed = seed;
  est.rhs = finalize_mean(rhs_chunks, replicates, seed);
  return est;
}

DualityEstimates moment_duality_mc(const PopulationParams& params, int k,
                                   int n, int g, std::uint64_t replicates,
                                   std::uint64_t seed, unsigned n_threads) {
  validate_params(params);
  if (g < 1) throw std::invalid_argument("moment_duality_mc: g < 1");
  if (k < 0 || k > params.n_pop || n < 1 || n > params.n_pop) {
    throw std::invalid_argument("moment_duality_mc: bad arguments");
  }
  std::size_t n_chunks =
      static_cast<std::size_t>((replicates + kChunk - 1) / kChunk);
  std::vector<MomentAccumulator> lhs_chunks(n_chunks), rhs_chunks(n_chunks);
  parallel_tasks(n_chunks, n_threads, [&](std::size_t c) {
    auto rng = derive_stream(seed, c);
    OccupancySampler occupancy(params.weights, params.n_pop);
    std::uint64_t begin = c * kChunk;
    std::uint64_t end = std::min(replicates, begin + kChunk);
    for (std::uint64_t r = begin; r < end; ++r) {
      int freq = k;
      for (int step = 0; step < g - 1; ++step) {
        freq = step_frequency(freq, params, rng);
      }
      double mass = sample_prefix_mass(params.weights, params.n_pop, freq, rng);
      std::int64_t h = branching_step(n, params.s, rng);
      lhs_chunks[c].add(std::pow(mass, static_cast<double>(h)));

      int a = n;
      for (int step = 0; step < g - 1; ++step) {
        a = step_casp(a, params, rng, occupancy);
      }
      double mass_k = sample_prefix_mass(params.weights, params.n_pop, k, rng);
      std::int64_t h_dual = branching_step(a, params.s, rng);
      rhs_chunks[c].add(std::pow(mass_k, static_cast<double>(h_dual)));
    }
  });
  DualityEstimates est;
  est.lhs = finalize_mean(lhs_chunks, replicates, seed);
  est.rhs = finalize_mean(rhs_chunks, replicates, seed);
  return est;
}

}  // namespace cannings
