#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cannings/rng.hpp"

namespace cannings {

// Monte Carlo point estimate with uncertainty. `method` records how the
// interval was formed: "wilson", "normal" or "batch-means".
struct EstimatorResult {
  double point = 0.0;
  double stderr_ = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  std::string method;
};

// Wilson score interval for a binomial proportion.
EstimatorResult wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                double level = 0.95);

// Standard error of the grand mean from batch means; handles positively
// autocorrelated chains such as thinned CASP equilibrium samples.
double batch_means_stderr(const std::vector<double>& samples,
                          int n_batches = 32);

double sample_mean(const std::vector<double>& samples);
double sample_variance(const std::vector<double>& samples);

// One-sample Kolmogorov-Smirnov statistic against a reference CDF.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& reference_cdf);

// Two-sample KS statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Total variation distance between two pmfs on the same support.
double tv_distance(const std::vector<double>& pmf_a,
                   const std::vector<double>& pmf_b);

struct NormalityCheck {
  double ks = 0.0;
  bool pass = false;
  double mu = 0.0;
  double sigma = 0.0;
};

// Standardizes CASP equilibrium samples with the parameters of the
// limiting normal (p = s/(rho2/2+s), mu = N p, sigma^2 = N p (1-p)) and
// measures the KS distance to the standard normal.
NormalityCheck normality_check_casp(const std::vector<double>& samples,
                                    int n_pop, double s, double rho2,
                                    double threshold = 0.05);

// Chi-square goodness-of-fit p-value for observed counts against expected
// counts (cells with expected < 5 should be merged by the caller).
double chi_square_gof_pvalue(const std::vector<double>& observed,
                             const std::vector<double>& expected);

}  // namespace cannings
