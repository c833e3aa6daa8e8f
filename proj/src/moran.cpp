#include "cannings/moran.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cannings/mathutil.hpp"

namespace cannings {

void validate_moran(const MoranParams& p) {
  if (p.n_pop < 1) throw std::invalid_argument("moran: n_pop < 1");
  if (!(p.gamma > 0.0)) throw std::invalid_argument("moran: gamma <= 0");
  if (!(p.s >= 0.0)) throw std::invalid_argument("moran: s < 0");
}

MaspRates masp_rates(int k, const MoranParams& p) {
  validate_moran(p);
  if (k < 1 || k > p.n_pop) {
    throw std::invalid_argument("masp_rates: k out of range");
  }
  MaspRates r;
  double n = p.n_pop;
  r.up = k * p.s * (n - k) / n;
  r.down = p.gamma / n * 0.5 * k * (k - 1.0);
  return r;
}

std::vector<double> masp_equilibrium_pmf(const MoranParams& p) {
  validate_moran(p);
  if (!(p.s > 0.0)) {
    throw std::invalid_argument("masp_equilibrium_pmf: needs s > 0");
  }
  int n = p.n_pop;
  double prob = 2.0 * p.s / (2.0 * p.s + p.gamma);
  double lp = std::log(prob);
  double lq = std::log1p(-prob);
  std::vector<double> logterm(n);
  double peak = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= n; ++k) {
    logterm[k - 1] = log_binomial(n, k) + k * lp + (n - k) * lq;
    peak = std::max(peak, logterm[k - 1]);
  }
  std::vector<double> pmf(n);
  KahanSum total;
  for (int k = 1; k <= n; ++k) {
    pmf[k - 1] = std::exp(logterm[k - 1] - peak);
    total.add(pmf[k - 1]);
  }
  for (auto& x : pmf) x /= total.value();
  return pmf;
}

double moran_fixation_exact(const MoranParams& p) {
  validate_moran(p);
  if (!(p.s > 0.0)) {
    throw std::invalid_argument("moran_fixation_exact: needs s > 0");
  }
  double prob = 2.0 * p.s / (2.0 * p.s + p.gamma);
  double tail = std::exp(p.n_pop * std::log1p(-prob));  // (1-p)^N
  return prob / (1.0 - tail);
}

double haldane_approx(double s, double rho2) {
  if (!(s >= 0.0) || !(rho2 >= 1.0)) {
    throw std::invalid_argument("haldane_approx: bad arguments");
  }
  return 2.0 * s / rho2;
}

double kimura_approx(double alpha, double gamma, int n_pop) {
  if (!(alpha > 0.0) || !(gamma > 0.0) || n_pop < 1) {
    throw std::invalid_argument("kimura_approx: bad arguments");
  }
  return 2.0 * alpha / (n_pop * gamma) / (1.0 - std::exp(-2.0 * alpha / gamma));
}

double strong_selection_approx(double s, double gamma) {
  if (!(s > 0.0) || !(gamma > 0.0)) {
    throw std::invalid_argument("strong_selection_approx: bad arguments");
  }
  return 2.0 * s / (2.0 * s + gamma);
}

std::vector<int> simulate_masp_embedded(const MoranParams& p, int b0,
                                        std::int64_t n_jumps,
                                        SplitMix64& rng) {
  validate_moran(p);
  if (b0 < 1 || b0 > p.n_pop) {
    throw std::invalid_argument("simulate_masp_embedded: b0 out of range");
  }
  std::vector<int> traj;
  traj.reserve(static_cast<std::size_t>(n_jumps) + 1);
  int k = b0;
  traj.push_back(k);
  for (std::int64_t i = 0; i < n_jumps; ++i) {
    MaspRates r = masp_rates(k, p);
    double total = r.up + r.down;
    if (total <= 0.0) {
      traj.push_back(k);  // absorbing (k = 1 with s = 0)
      continue;
    }
    k += (rng.uniform() * total < r.up) ? 1 : -1;
    traj.push_back(k);
  }
  return traj;
}

std::vector<double> masp_stationary_histogram(const MoranParams& p, int b0,
                                              std::int64_t n_jumps,
                                              std::int64_t burn_in,
                                              SplitMix64& rng) {
  validate_moran(p);
  if (!(p.s > 0.0)) {
    throw std::invalid_argument("masp_stationary_histogram: needs s > 0");
  }
  if (b0 < 1 || b0 > p.n_pop) {
    throw std::invalid_argument("masp_stationary_histogram: b0 out of range");
  }
  int k = b0;
  for (std::int64_t i = 0; i < burn_in; ++i) {
    MaspRates r = masp_rates(k, p);
    k += (rng.uniform() * (r.up + r.down) < r.up) ? 1 : -1;
  }
  // pi_ct(k) is proportional to jump-chain occupation divided by the total
  // jump rate at k.
  std::vector<double> weight(p.n_pop, 0.0);
  for (std::int64_t i = 0; i < n_jumps; ++i) {
    MaspRates r = masp_rates(k, p);
    weight[k - 1] += 1.0 / (r.up + r.down);
    k += (rng.uniform() * (r.up + r.down) < r.up) ? 1 : -1;
  }
  KahanSum total;
  for (double w : weight) total.add(w);
  for (auto& w : weight) w /= total.value();
  return weight;
}

}  // namespace cannings
