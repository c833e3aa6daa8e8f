#pragma once

#include <cstddef>
#include <vector>

namespace cannings {

double log_binomial(double n, double k);

// log of the falling factorial x(x-1)...(x-m+1); requires x >= m-1.
double log_falling(double x, int m);

// Falling-factorial ratio x(x-1)...(x-m+1) / n(n-1)...(n-m+1).
// Zero when m > x (integer x), as in the hypergeometric sampling weights.
double falling_ratio(int x, int n, int m);

double normal_cdf(double x);

// Inverse standard normal CDF (Acklam's rational approximation with one
// Halley refinement); |error| < 1e-13 on (0,1).
double normal_quantile(double p);

// Regularized upper incomplete gamma Q(a, x); series / continued fraction.
double regularized_gamma_q(double a, double x);

// Chi-square upper tail P(X >= x) with df degrees of freedom.
double chi_square_sf(double x, int df);

// Gauss-Legendre nodes and weights on (0,1).
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_legendre01(int n);

// Compensated (Kahan) summation.
class KahanSum {
 public:
  void add(double x) {
    double y = x - carry_;
    double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// Dense row-major linear solve A x = b by Gaussian elimination with
// partial pivoting. A is overwritten. Returns false if singular.
bool solve_dense(std::vector<double>& a, std::vector<double>& b,
                 std::size_t n);

}  // namespace cannings
