#include <cmath>
#include <vector>

#include "cannings/paintbox.hpp"
#include "cannings/stats.hpp"
#include "doctest.h"

using namespace cannings;

namespace {

// Mean and standard error of f(W) over replicated paintbox draws.
template <typename F>
std::pair<double, double> mc_mean(const WeightModel& model, int n_pop,
                                  int reps, std::uint64_t seed, F&& f) {
  auto rng = derive_stream(seed, 0);
  double sum = 0, sumsq = 0;
  for (int r = 0; r < reps; ++r) {
    double v = f(sample_weights(model, n_pop, rng));
    sum += v;
    sumsq += v * v;
  }
  double mean = sum / reps;
  double var = std::max(0.0, sumsq / reps - mean * mean);
  return {mean, std::sqrt(var / reps)};
}

}  // namespace

TEST_CASE("weight model grammar round-trips") {
  for (const char* text :
       {"wf", "dirichlet:1.5", "dirichlet-type:gamma:2:1",
        "dirichlet-type:uniform:1:3", "dirichlet-type:const:3"}) {
    CHECK(weight_model_label(parse_weight_model(text)) == text);
  }
  CHECK_THROWS(parse_weight_model("dirichlet"));
  CHECK_THROWS(parse_weight_model("dirichlet:-1"));
  CHECK_THROWS(parse_weight_model("dirichlet-type:uniform:3:1"));
  CHECK_THROWS(parse_weight_model("dirichlet-type:const:0"));
  CHECK_THROWS(parse_weight_model("nonsense"));
  CHECK_THROWS(parse_weight_model("dirichlet:1x"));
}

TEST_CASE("degenerate models return the uniform vector") {
  auto rng = derive_stream(1, 0);
  auto wf = sample_weights(WrightFisher{}, 4, rng);
  REQUIRE(wf.n() == 4);
  for (double w : wf.w) CHECK(w == doctest::Approx(0.25).epsilon(1e-15));

  auto cst = sample_weights(DirichletType{YLawConstant{3.0}}, 5, rng);
  for (double w : cst.w) CHECK(w == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("sampled weight vectors satisfy the simplex invariants") {
  std::vector<WeightModel> models = {
      SymmetricDirichlet{0.5}, SymmetricDirichlet{1.0},
      DirichletType{YLawGamma{2.0, 1.0}}, DirichletType{YLawUniform{1.0, 3.0}}};
  const int n_pop = 7, reps = 100000;
  std::uint64_t seed = 100;
  for (const auto& model : models) {
    auto rng = derive_stream(seed++, 0);
    double sum1 = 0, sum1sq = 0;
    double diff_sum = 0, diff_sumsq = 0;  // W1^2 - W2^2, exchangeability probe
    for (int r = 0; r < reps; ++r) {
      auto wv = sample_weights(model, n_pop, rng);
      validate_weight_vector(wv);  // throws on any violation
      sum1 += wv.w[0];
      sum1sq += wv.w[0] * wv.w[0];
      double d = wv.w[0] * wv.w[0] - wv.w[1] * wv.w[1];
      diff_sum += d;
      diff_sumsq += d * d;
    }
    double mean = sum1 / reps;
    double var = std::max(0.0, sum1sq / reps - mean * mean);
    CHECK(std::fabs(mean - 1.0 / n_pop) < 4.0 * std::sqrt(var / reps));
    double dmean = diff_sum / reps;
    double dvar = std::max(0.0, diff_sumsq / reps - dmean * dmean);
    CHECK(std::fabs(dmean) < 4.0 * std::sqrt(dvar / reps) + 1e-12);
  }
}

TEST_CASE("dirichlet(1) at N=2 has a uniform first coordinate") {
  SymmetricDirichlet model{1.0};
  auto [mean, se] =
      mc_mean(WeightModel{model}, 2, 100000, 2,
              [](const WeightVector& w) { return w.w[0]; });
  CHECK(std::fabs(mean - 0.5) < 3.0 * se);

  auto rng = derive_stream(3, 0);
  std::vector<double> first(20000);
  for (auto& v : first) v = sample_weights(WeightModel{model}, 2, rng).w[0];
  double d = ks_statistic(first, [](double x) {
    return x < 0 ? 0.0 : (x > 1 ? 1.0 : x);
  });
  CHECK(d < 0.02);
}

TEST_CASE("analytic moments") {
  CHECK(*analytic_moment(WrightFisher{}, 10, 2) == doctest::Approx(0.01));
  CHECK(*analytic_moment(SymmetricDirichlet{1.0}, 2, 2) ==
        doctest::Approx(1.0 / 3.0));
  // order-2 closed form (alpha+1)/(N (N alpha + 1))
  double alpha = 2.5;
  int n = 8;
  CHECK(*analytic_moment(SymmetricDirichlet{alpha}, n, 2) ==
        doctest::Approx((alpha + 1) / (n * (n * alpha + 1))));
  CHECK(!analytic_moment(DirichletType{YLawGamma{2, 1}}, 10, 2).has_value());
  CHECK(*analytic_moment(DirichletType{YLawConstant{3}}, 10, 3) ==
        doctest::Approx(1e-3));
  CHECK_THROWS(analytic_moment(WrightFisher{}, 10, 0));
}

TEST_CASE("empirical moments agree with analytic values") {
  SUBCASE("deterministic weights have zero spread") {
    auto rng = derive_stream(4, 0);
    auto r = empirical_moment(WrightFisher{}, 10, 3, 100, rng);
    CHECK(r.point == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(r.stderr_ == 0.0);
  }
  SUBCASE("dirichlet second moment") {
    auto rng = derive_stream(5, 0);
    auto r = empirical_moment(SymmetricDirichlet{1.0}, 2, 2, 200000, rng);
    CHECK(std::fabs(r.point - 1.0 / 3.0) < 3.0 * r.stderr_);
  }
  SUBCASE("dirichlet-type gamma mean is 1/N by exchangeability") {
    auto rng = derive_stream(6, 0);
    auto r = empirical_moment(DirichletType{YLawGamma{2, 1}}, 100, 1, 10000, rng);
    CHECK(std::fabs(r.point - 0.01) < 3.0 * r.stderr_);
  }
  SUBCASE("gamma-aggregation shortcut matches the full-vector route") {
    WeightModel model = DirichletType{YLawGamma{2.0, 1.0}};
    auto rng = derive_stream(7, 0);
    auto shortcut = empirical_moment(model, 5, 2, 100000, rng);
    auto [full, full_se] = mc_mean(model, 5, 50000, 8, [](const WeightVector& w) {
      return w.w[0] * w.w[0];
    });
    double se = std::hypot(shortcut.stderr_, full_se);
    CHECK(std::fabs(shortcut.point - full) < 4.0 * se);
  }
  SUBCASE("uniform-Y empirical moment matches analytic-free MC") {
    WeightModel model = DirichletType{YLawUniform{1.0, 3.0}};
    auto rng = derive_stream(9, 0);
    auto a = empirical_moment(model, 6, 2, 50000, rng);
    auto [b, b_se] = mc_mean(model, 6, 50000, 10, [](const WeightVector& w) {
      return w.w[0] * w.w[0];
    });
    CHECK(std::fabs(a.point - b) < 4.0 * std::hypot(a.stderr_, b_se));
  }
}

TEST_CASE("rho squared catalog") {
  CHECK(rho_squared(WrightFisher{}) == 1.0);
  CHECK(rho_squared(SymmetricDirichlet{1.0}) == doctest::Approx(2.0));
  CHECK(rho_squared(DirichletType{YLawGamma{2.0, 1.0}}) == doctest::Approx(1.5));
  CHECK(rho_squared(DirichletType{YLawConstant{5.0}}) == doctest::Approx(1.0));
  // Uniform(1,3): E=2, E[Y^2]=13/3, rho2 = 13/12
  CHECK(rho_squared(DirichletType{YLawUniform{1.0, 3.0}}) ==
        doctest::Approx(13.0 / 12.0));
}

TEST_CASE("N^2 E[W1^2] approaches rho^2 from below at rate 1/N") {
  // |N^2 E[W1^2] - rho2| <= C/N with C fitted on the smallest grid point.
  double alpha = 1.0;
  double rho2 = rho_squared(SymmetricDirichlet{alpha});
  double c_fit = 0.0;
  for (int n : {100, 1000, 10000}) {
    double m2 = *analytic_moment(SymmetricDirichlet{alpha}, n, 2);
    double gap = std::fabs(n * static_cast<double>(n) * m2 - rho2);
    if (c_fit == 0.0) c_fit = gap * n * 1.05;
    CHECK(gap <= c_fit / n);
  }
}

TEST_CASE("regularity report") {
  SUBCASE("wright-fisher scaled second moment is exactly 1") {
    auto rep = check_regularity(WrightFisher{}, {100, 1000}, 8.0, 1);
    REQUIRE(rep.rows.size() == 2);
    for (const auto& row : rep.rows) {
      CHECK(row.m2_scaled == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(row.moment_bound_ok);
      CHECK(row.k_min_admissible <= 1.0);
      CHECK(row.m3_scaled == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("dirichlet(1) second moment at N=1000") {
    auto rep = check_regularity(SymmetricDirichlet{1.0}, {1000}, 8.0, 1);
    CHECK(rep.rows[0].m2_scaled == doctest::Approx(2000.0 / 1001.0).epsilon(1e-12));
    CHECK(rep.rows[0].moment_bound_ok);
  }
  SUBCASE("moehle column decreases toward zero") {
    auto rep = check_regularity(SymmetricDirichlet{1.0}, {100, 1000, 10000}, 8.0, 1);
    CHECK(rep.rows[0].mohle > rep.rows[1].mohle);
    CHECK(rep.rows[1].mohle > rep.rows[2].mohle);
    CHECK(rep.rows[2].mohle < 0.001);
  }
  SUBCASE("empirical fallback fills dirichlet-type rows") {
    auto rep = check_regularity(DirichletType{YLawGamma{2.0, 1.0}}, {50}, 8.0, 1,
                                100000);
    CHECK(rep.rows[0].m2_scaled == doctest::Approx(1.5).epsilon(0.05));
    CHECK(std::isfinite(rep.rows[0].m3_scaled));
    CHECK(rep.rows[0].m3_scaled >= 0.0);
  }
  CHECK_THROWS(check_regularity(WrightFisher{}, {}, 8.0, 1));
  CHECK_THROWS(check_regularity(WrightFisher{}, {1}, 8.0, 1));
}

TEST_CASE("prefix mass law matches the materialized prefix sums") {
  auto beta_moments = [](double a, double b) {
    double m1 = a / (a + b);
    double m2 = a * (a + 1) / ((a + b) * (a + b + 1));
    return std::pair{m1, m2};
  };
  const int n_pop = 6, k = 2, reps = 100000;
  std::vector<WeightModel> models = {SymmetricDirichlet{1.3},
                                     DirichletType{YLawGamma{2.0, 1.5}},
                                     DirichletType{YLawUniform{1.0, 3.0}}};
  std::uint64_t seed = 40;
  for (const auto& model : models) {
    auto rng = derive_stream(seed++, 0);
    double sum = 0, sumsq = 0;
    for (int r = 0; r < reps; ++r) {
      double s = sample_prefix_mass(model, n_pop, k, rng);
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
      sum += s;
      sumsq += s * s;
    }
    double mean = sum / reps;
    double m2 = sumsq / reps;
    double se = std::sqrt(std::max(0.0, m2 - mean * mean) / reps);
    CHECK(std::fabs(mean - static_cast<double>(k) / n_pop) < 4.0 * se);
    // Against the Beta aggregate law where it applies exactly.
    if (const auto* d = std::get_if<SymmetricDirichlet>(&model)) {
      auto [m1_ref, m2_ref] = beta_moments(k * d->alpha, (n_pop - k) * d->alpha);
      CHECK(std::fabs(mean - m1_ref) < 4.0 * se);
      CHECK(m2 == doctest::Approx(m2_ref).epsilon(0.02));
    }
  }
  auto rng = derive_stream(1, 0);
  CHECK(sample_prefix_mass(WrightFisher{}, 10, 3, rng) == doctest::Approx(0.3));
  CHECK(sample_prefix_mass(WrightFisher{}, 10, 0, rng) == 0.0);
  CHECK(sample_prefix_mass(WrightFisher{}, 10, 10, rng) == 1.0);
}

TEST_CASE("occupancy sampler matches the exact marginal law") {
  // Exact pmf of the distinct-box count under a symmetric Dirichlet
  // paintbox via the urn recursion, used as an independent oracle.
  const int n_pop = 6, h = 4;
  const double alpha = 1.0;
  std::vector<std::vector<double>> f(h + 1, std::vector<double>(h + 1, 0.0));
  f[0][0] = 1.0;
  for (int m = 0; m < h; ++m) {
    for (int d = 0; d <= m; ++d) {
      if (f[m][d] == 0.0) continue;
      double p_new = (n_pop - d) * alpha / (n_pop * alpha + m);
      f[m + 1][d + 1] += f[m][d] * p_new;
      f[m + 1][d] += f[m][d] * (1.0 - p_new);
    }
  }
  std::vector<double> exact_pmf(h);
  for (int d = 1; d <= h; ++d) exact_pmf[d - 1] = f[h][d];

  const int reps = 200000;
  WeightModel model = SymmetricDirichlet{alpha};

  SUBCASE("urn fast path") {
    OccupancySampler sampler(model, n_pop);
    auto rng = derive_stream(50, 0);
    std::vector<double> freq(h, 0.0);
    for (int r = 0; r < reps; ++r) freq[sampler.sample(h, rng) - 1] += 1.0;
    for (auto& x : freq) x /= reps;
    CHECK(tv_distance(freq, exact_pmf) < 0.01);
  }
  SUBCASE("materialized throws against sampled weights") {
    auto rng = derive_stream(51, 0);
    std::vector<double> freq(h, 0.0);
    const int reps_small = reps / 4;
    for (int r = 0; r < reps_small; ++r) {
      auto wv = sample_weights(model, n_pop, rng);
      freq[distinct_boxes(h, wv, rng) - 1] += 1.0;
    }
    for (auto& x : freq) x /= reps_small;
    CHECK(tv_distance(freq, exact_pmf) < 0.02);
  }
}
