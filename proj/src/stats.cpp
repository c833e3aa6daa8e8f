#include "cannings/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cannings/mathutil.hpp"

namespace cannings {

EstimatorResult wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                double level) {
  if (trials == 0 || successes > trials) {
    throw std::invalid_argument("wilson_interval: bad counts");
  }
  double n = static_cast<double>(trials);
  double p = static_cast<double>(successes) / n;
  double z = normal_quantile(0.5 + level / 2.0);
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  EstimatorResult r;
  r.point = p;
  r.stderr_ = std::sqrt(p * (1.0 - p) / n);
  r.ci_lo = std::max(0.0, center - half);
  r.ci_hi = std::min(1.0, center + half);
  r.replicates = trials;
  r.method = "wilson";
  return r;
}

double sample_mean(const std::vector<double>& samples) {
  KahanSum s;
  for (double x : samples) s.add(x);
  return s.value() / static_cast<double>(samples.size());
}

double sample_variance(const std::vector<double>& samples) {
  double m = sample_mean(samples);
  KahanSum s;
  for (double x : samples) s.add((x - m) * (x - m));
  return s.value() / static_cast<double>(samples.size() - 1);
}

double batch_means_stderr(const std::vector<double>& samples, int n_batches) {
  if (n_batches < 2) throw std::invalid_argument("batch_means: n_batches < 2");
  if (samples.size() < 2 * static_cast<std::size_t>(n_batches)) {
    throw std::invalid_argument("batch_means: too few samples");
  }
  std::size_t m = samples.size() / n_batches;
  std::vector<double> means(n_batches);
  for (int b = 0; b < n_batches; ++b) {
    KahanSum s;
    for (std::size_t i = 0; i < m; ++i) s.add(samples[b * m + i]);
    means[b] = s.value() / static_cast<double>(m);
  }
  double var = sample_variance(means);
  return std::sqrt(var / n_batches);
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& reference_cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty");
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = reference_cdf(samples[i]);
    d = std::max(d, std::fabs((i + 1) / n - f));
    d = std::max(d, std::fabs(i / n - f));
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  return d;
}

double tv_distance(const std::vector<double>& pmf_a,
                   const std::vector<double>& pmf_b) {
  if (pmf_a.size() != pmf_b.size()) {
    throw std::invalid_argument("tv_distance: dimension mismatch");
  }
  KahanSum sa, sb, diff;
  for (std::size_t i = 0; i < pmf_a.size(); ++i) {
    sa.add(pmf_a[i]);
    sb.add(pmf_b[i]);
    diff.add(std::fabs(pmf_a[i] - pmf_b[i]));
  }
  if (std::fabs(sa.value() - 1.0) > 1e-9 || std::fabs(sb.value() - 1.0) > 1e-9) {
    throw std::invalid_argument("tv_distance: inputs must sum to 1");
  }
  return 0.5 * diff.value();
}

NormalityCheck normality_check_casp(const std::vector<double>& samples,
                                    int n_pop, double s, double rho2,
                                    double threshold) {
  double p = s / (rho2 / 2.0 + s);
  NormalityCheck c;
  c.mu = n_pop * p;
  c.sigma = std::sqrt(n_pop * p * (1.0 - p));
  std::vector<double> z(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    z[i] = (samples[i] - c.mu) / c.sigma;
  }
  c.ks = ks_statistic(std::move(z), [](double x) { return normal_cdf(x); });
  c.pass = c.ks < threshold;
  return c;
}

double chi_square_gof_pvalue(const std::vector<double>& observed,
                             const std::vector<double>& expected) {
  if (observed.size() != expected.size() || observed.size() < 2) {
    throw std::invalid_argument("chi_square_gof: bad inputs");
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) {
      throw std::invalid_argument("chi_square_gof: nonpositive expected cell");
    }
    double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  return chi_square_sf(stat, static_cast<int>(observed.size()) - 1);
}

}  // namespace cannings
