#include "cannings/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "cannings/mathutil.hpp"

namespace cannings {
namespace exact {

namespace {

constexpr int kOccupancyCap = 200;
constexpr int kDenseCap = 200;

double logsumexp2(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Binomial(n, p) pmf row by log-space recurrence.
void binomial_row(int n, double p, std::vector<double>& out) {
  out.assign(n + 1, 0.0);
  if (p <= 0.0) {
    out[0] = 1.0;
    return;
  }
  if (p >= 1.0) {
    out[n] = 1.0;
    return;
  }
  double lr = std::log(p) - std::log1p(-p);
  double lg = n * std::log1p(-p);
  for (int j = 0; j <= n; ++j) {
    out[j] = std::exp(lg);
    lg += lr + std::log(static_cast<double>(n - j) / (j + 1));
  }
}

// Negative binomial pmf of H = trials for a successes, success prob 1-s,
// truncated at the smallest h_max with tail mass < tail_tol. Returns pmf
// over h = a..h_max and the final tail.
struct NegBinTruncation {
  int h_min = 0;
  std::vector<double> pmf;
  double tail = 0.0;
};

NegBinTruncation negbin_truncated(int a, double s, double tail_tol, int cap) {
  NegBinTruncation t;
  t.h_min = a;
  long double p = std::pow(static_cast<long double>(1.0 - s), a);
  long double cum = 0.0;
  for (int h = a;; ++h) {
    t.pmf.push_back(static_cast<double>(p));
    cum += p;
    long double tail = 1.0L - cum;
    if (tail < tail_tol) {
      t.tail = static_cast<double>(std::max<long double>(tail, 0.0L));
      return t;
    }
    if (h >= cap) {
      char msg[160];
      std::snprintf(msg, sizeof(msg),
                    "casp matrix: branching tail %.3g above %.3g at the h=%d "
                    "cap; a larger cap is required",
                    static_cast<double>(tail), static_cast<double>(tail_tol),
                    cap);
      throw std::runtime_error(msg);
    }
    p *= s * static_cast<long double>(h) / (h + 1 - a);
  }
}

void require_wright_fisher(const PopulationParams& params, const char* who) {
  if (!is_degenerate_uniform(params.weights)) {
    throw std::invalid_argument(std::string(who) +
                                ": only Wright-Fisher weights are supported");
  }
}

}  // namespace

std::string to_csv(const TransitionMatrix& m) {
  std::string out = "dim,state_offset\n";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%d,%d\n", m.dim, m.state_offset);
  out += buf;
  for (int i = 0; i < m.dim; ++i) {
    for (int j = 0; j < m.dim; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m.at(i, j));
      out += buf;
      out += (j + 1 == m.dim) ? '\n' : ',';
    }
  }
  return out;
}

std::vector<double> occupancy_pmf_uniform(int h, int n_pop) {
  if (h < 1) throw std::invalid_argument("occupancy_pmf_uniform: h < 1");
  if (h > kOccupancyCap) {
    throw std::invalid_argument("occupancy_pmf_uniform: h above cap 200");
  }
  if (n_pop < 1) throw std::invalid_argument("occupancy_pmf_uniform: N < 1");
  const double neg_inf = -std::numeric_limits<double>::infinity();
  // log S2(row, b), rolled row by row.
  std::vector<double> log_s2(h + 1, neg_inf), next(h + 1, neg_inf);
  log_s2[1] = 0.0;
  for (int row = 2; row <= h; ++row) {
    std::fill(next.begin(), next.end(), neg_inf);
    for (int b = 1; b <= row; ++b) {
      double keep = (log_s2[b] == neg_inf) ? neg_inf : std::log(b) + log_s2[b];
      next[b] = logsumexp2(keep, log_s2[b - 1]);
    }
    std::swap(log_s2, next);
  }
  int b_max = std::min(h, n_pop);
  std::vector<double> pmf(b_max);
  double log_n = std::log(static_cast<double>(n_pop));
  double log_fall = 0.0;
  for (int b = 1; b <= b_max; ++b) {
    log_fall += std::log(static_cast<double>(n_pop - b + 1));
    pmf[b - 1] = std::exp(log_s2[b] + log_fall - h * log_n);
  }
  KahanSum total;
  for (double x : pmf) total.add(x);
  if (std::fabs(total.value() - 1.0) > 1e-12) {
    throw std::runtime_error("occupancy_pmf_uniform: pmf does not sum to 1");
  }
  return pmf;
}

TransitionMatrix forward_transition_matrix(const PopulationParams& params,
                                           int quadrature_nodes) {
  validate_params(params);
  int n = params.n_pop;
  if (n > kDenseCap) {
    throw std::invalid_argument("forward_transition_matrix: N above cap 200");
  }
  bool uniform = is_degenerate_uniform(params.weights);
  const auto* dirichlet = std::get_if<SymmetricDirichlet>(&params.weights);
  if (!uniform && dirichlet == nullptr) {
    throw std::invalid_argument(
        "forward_transition_matrix: unsupported weight model");
  }
  TransitionMatrix m;
  m.dim = n + 1;
  m.state_offset = 0;
  m.entries.assign(static_cast<std::size_t>(m.dim) * m.dim, 0.0);
  m.at(0, 0) = 1.0;
  m.at(n, n) = 1.0;

  std::vector<double> row(n + 1);
  auto success_prob = [&](double mass) {
    double wild = (1.0 - params.s) * mass;
    return wild / (wild + (1.0 - mass));
  };
  if (uniform) {
    for (int k = 1; k < n; ++k) {
      binomial_row(n, success_prob(static_cast<double>(k) / n), row);
      for (int j = 0; j <= n; ++j) m.at(k, j) = row[j];
    }
    return m;
  }

  Quadrature q = gauss_legendre01(quadrature_nodes);
  double alpha = dirichlet->alpha;
  std::vector<double> acc(n + 1);
  for (int k = 1; k < n; ++k) {
    double a = k * alpha;
    double b = (n - k) * alpha;
    double log_beta =
        std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int t = 0; t < quadrature_nodes; ++t) {
      double x = q.nodes[t];
      double density = std::exp((a - 1.0) * std::log(x) +
                                (b - 1.0) * std::log1p(-x) - log_beta);
      double wq = q.weights[t] * density;
      binomial_row(n, success_prob(x), row);
      for (int j = 0; j <= n; ++j) acc[j] += wq * row[j];
    }
    KahanSum sum;
    for (double v : acc) sum.add(v);
    double residual = std::fabs(sum.value() - 1.0);
    if (residual > 1e-9) {
      throw std::runtime_error(
          "forward_transition_matrix: quadrature residual above 1e-9");
    }
    m.truncation_residual = std::max(m.truncation_residual, residual);
    for (int j = 0; j <= n; ++j) m.at(k, j) = acc[j] / sum.value();
  }
  return m;
}

TransitionMatrix casp_transition_matrix(const PopulationParams& params,
                                        double tail_tol) {
  validate_params(params);
  require_wright_fisher(params, "casp_transition_matrix");
  int n = params.n_pop;
  if (n > 50) throw std::invalid_argument("casp_transition_matrix: N above 50");
  if (!(tail_tol <= 1e-12 && tail_tol > 0.0)) {
    throw std::invalid_argument("casp_transition_matrix: tail_tol above 1e-12");
  }
  TransitionMatrix m;
  m.dim = n;
  m.state_offset = 1;
  m.entries.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int a = 1; a <= n; ++a) {
    NegBinTruncation nb = negbin_truncated(a, params.s, tail_tol, kOccupancyCap);
    std::vector<double> acc(n, 0.0);
    for (std::size_t i = 0; i < nb.pmf.size(); ++i) {
      int h = nb.h_min + static_cast<int>(i);
      std::vector<double> occ = occupancy_pmf_uniform(h, n);
      for (std::size_t b = 0; b < occ.size(); ++b) {
        acc[b] += nb.pmf[i] * occ[b];
      }
    }
    KahanSum sum;
    for (double v : acc) sum.add(v);
    for (int b = 0; b < n; ++b) m.at(a - 1, b) = acc[b] / sum.value();
    m.truncation_residual = std::max(m.truncation_residual, nb.tail);
  }
  return m;
}

double absorption_probability(const TransitionMatrix& m, int k0, int target) {
  if (m.state_offset != 0) {
    throw std::invalid_argument("absorption_probability: needs a {0..N} chain");
  }
  int n = m.dim - 1;
  if (k0 < 0 || k0 > n || (target != 0 && target != n)) {
    throw std::invalid_argument("absorption_probability: bad states");
  }
  auto is_absorbing = [&](int state) {
    for (int j = 0; j <= n; ++j) {
      double want = (j == state) ? 1.0 : 0.0;
      if (std::fabs(m.at(state, j) - want) > 1e-12) return false;
    }
    return true;
  };
  if (!is_absorbing(0) || !is_absorbing(n)) {
    throw std::invalid_argument(
        "absorption_probability: states 0 and N must be absorbing");
  }
  if (k0 == target) return 1.0;
  if (k0 == 0 || k0 == n) return 0.0;
  std::size_t dim = static_cast<std::size_t>(n) - 1;
  std::vector<double> a(dim * dim, 0.0);
  std::vector<double> b(dim, 0.0);
  for (int i = 1; i < n; ++i) {
    for (int j = 1; j < n; ++j) {
      a[(i - 1) * dim + (j - 1)] = ((i == j) ? 1.0 : 0.0) - m.at(i, j);
    }
    b[i - 1] = m.at(i, target);
  }
  if (!solve_dense(a, b, dim)) {
    throw std::runtime_error("absorption_probability: singular system");
  }
  return std::clamp(b[k0 - 1], 0.0, 1.0);
}

namespace {

std::vector<double> power_iterate(const TransitionMatrix& m, double residual,
                                  std::int64_t max_iters) {
  int n = m.dim;
  std::vector<double> pi(n, 1.0 / n), next(n);
  for (std::int64_t it = 0; it < max_iters; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      double p = pi[i];
      if (p == 0.0) continue;
      const double* row = &m.entries[static_cast<std::size_t>(i) * n];
      for (int j = 0; j < n; ++j) next[j] += p * row[j];
    }
    double total = 0.0;
    for (double v : next) total += v;
    for (auto& v : next) v /= total;
    double diff = 0.0;
    for (int j = 0; j < n; ++j) diff = std::max(diff, std::fabs(next[j] - pi[j]));
    pi.swap(next);
    if (diff <= residual) return pi;
  }
  throw std::runtime_error("stationary_distribution: no convergence in cap");
}

}  // namespace

std::vector<double> stationary_distribution(const TransitionMatrix& m) {
  if (m.state_offset != 1) {
    throw std::invalid_argument("stationary_distribution: needs a {1..N} chain");
  }
  return power_iterate(m, 1e-13, 1000000);
}

DualityCheck exact_duality_check(const PopulationParams& params, int k, int n,
                                 int g) {
  validate_params(params);
  require_wright_fisher(params, "exact_duality_check");
  int n_pop = params.n_pop;
  if (n_pop > 20) throw std::invalid_argument("exact_duality_check: N above 20");
  if (k < 1 || k > n_pop || n < 1 || n > n_pop || g < 0) {
    throw std::invalid_argument("exact_duality_check: bad arguments");
  }
  TransitionMatrix fwd = forward_transition_matrix(params);
  TransitionMatrix backward = casp_transition_matrix(params);

  std::vector<double> v(n_pop + 1, 0.0);
  v[k] = 1.0;
  std::vector<double> tmp(n_pop + 1);
  for (int step = 0; step < g; ++step) {
    std::fill(tmp.begin(), tmp.end(), 0.0);
    for (int i = 0; i <= n_pop; ++i) {
      if (v[i] == 0.0) continue;
      for (int j = 0; j <= n_pop; ++j) tmp[j] += v[i] * fwd.at(i, j);
    }
    v.swap(tmp);
  }
  std::vector<double> u(n_pop, 0.0);
  u[n - 1] = 1.0;
  std::vector<double> tmp2(n_pop);
  for (int step = 0; step < g; ++step) {
    std::fill(tmp2.begin(), tmp2.end(), 0.0);
    for (int i = 0; i < n_pop; ++i) {
      if (u[i] == 0.0) continue;
      for (int j = 0; j < n_pop; ++j) tmp2[j] += u[i] * backward.at(i, j);
    }
    u.swap(tmp2);
  }
  DualityCheck d;
  KahanSum lhs, rhs;
  for (int j = 0; j <= n_pop; ++j) {
    if (v[j] != 0.0) lhs.add(v[j] * falling_ratio(j, n_pop, n));
  }
  for (int a = 1; a <= n_pop; ++a) {
    if (u[a - 1] != 0.0) rhs.add(u[a - 1] * falling_ratio(k, n_pop, a));
  }
  d.lhs = lhs.value();
  d.rhs = rhs.value();
  d.gap = std::fabs(d.lhs - d.rhs);
  return d;
}

std::vector<double> casp_truncated_stationary(const PopulationParams& params,
                                              int k_max, double tail_tol) {
  validate_params(params);
  require_wright_fisher(params, "casp_truncated_stationary");
  if (k_max < 2 || k_max > params.n_pop) {
    throw std::invalid_argument("casp_truncated_stationary: bad k_max");
  }
  if (k_max > kOccupancyCap - 20) {
    throw std::invalid_argument("casp_truncated_stationary: k_max too large");
  }
  int n = params.n_pop;
  TransitionMatrix m;
  m.dim = k_max;
  m.state_offset = 1;
  m.entries.assign(static_cast<std::size_t>(k_max) * k_max, 0.0);
  for (int a = 1; a <= k_max; ++a) {
    NegBinTruncation nb = negbin_truncated(a, params.s, tail_tol, kOccupancyCap);
    std::vector<double> acc(k_max, 0.0);
    for (std::size_t i = 0; i < nb.pmf.size(); ++i) {
      int h = nb.h_min + static_cast<int>(i);
      std::vector<double> occ = occupancy_pmf_uniform(h, n);
      for (int b = 1; b <= static_cast<int>(occ.size()); ++b) {
        acc[std::min(b, k_max) - 1] += nb.pmf[i] * occ[b - 1];
      }
    }
    KahanSum sum;
    for (double v : acc) sum.add(v);
    for (int b = 0; b < k_max; ++b) m.at(a - 1, b) = acc[b] / sum.value();
  }
  return power_iterate(m, 1e-13, 1000000);
}

}  // namespace exact
}  // namespace cannings
