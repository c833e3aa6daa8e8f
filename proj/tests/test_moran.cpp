#include <cmath>

#include "cannings/mathutil.hpp"
#include "cannings/moran.hpp"
#include "cannings/stats.hpp"
#include "doctest.h"

using namespace cannings;

TEST_CASE("masp rates") {
  MoranParams p{10, 0.1, 1.0};
  auto r1 = masp_rates(1, p);
  CHECK(r1.down == 0.0);
  auto rn = masp_rates(10, p);
  CHECK(rn.up == 0.0);
  auto r2 = masp_rates(2, p);
  CHECK(r2.up == doctest::Approx(0.16));
  CHECK(r2.down == doctest::Approx(0.1));
  CHECK_THROWS(masp_rates(0, p));
  CHECK_THROWS(masp_rates(11, p));
}

TEST_CASE("masp equilibrium pmf") {
  SUBCASE("N=1 is a point mass") {
    auto pmf = masp_equilibrium_pmf({1, 0.3, 2.0});
    REQUIRE(pmf.size() == 1);
    CHECK(pmf[0] == doctest::Approx(1.0));
  }
  SUBCASE("N=2, s=gamma=1 is (1/2, 1/2)") {
    auto pmf = masp_equilibrium_pmf({2, 1.0, 1.0});
    CHECK(pmf[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pmf[1] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("sums to one and mean matches the closed form") {
    for (int n : {3, 17, 100, 2000}) {
      for (double s : {0.001, 0.05, 0.7}) {
        MoranParams p{n, s, 1.3};
        auto pmf = masp_equilibrium_pmf(p);
        KahanSum total, mean;
        for (int k = 1; k <= n; ++k) {
          total.add(pmf[k - 1]);
          mean.add(k * pmf[k - 1]);
        }
        CHECK(std::fabs(total.value() - 1.0) < 1e-12);
        CHECK(std::fabs(mean.value() / n - moran_fixation_exact(p)) < 1e-12);
      }
    }
  }
  CHECK_THROWS(masp_equilibrium_pmf({10, 0.0, 1.0}));
}

TEST_CASE("moran fixation closed forms") {
  CHECK(moran_fixation_exact({1, 0.4, 1.0}) == doctest::Approx(1.0));
  CHECK(moran_fixation_exact({2, 1.0, 1.0}) == doctest::Approx(0.75));
  // N=1e4, s=1e-2, gamma=1: tail term is negligible
  CHECK(moran_fixation_exact({10000, 0.01, 1.0}) ==
        doctest::Approx(0.0196078431).epsilon(1e-6));
}

TEST_CASE("haldane, kimura and strong-selection specializations") {
  CHECK(haldane_approx(0.0, 1.0) == 0.0);
  CHECK(haldane_approx(0.01, 2.0) == doctest::Approx(0.01));
  CHECK(haldane_approx(0.001, 1.0) == doctest::Approx(0.002));

  CHECK(kimura_approx(1.0, 1.0, 100) ==
        doctest::Approx(0.02 / (1.0 - std::exp(-2.0))).epsilon(1e-12));
  // alpha = gamma/2: (1/N) / (1 - e^{-1})
  CHECK(kimura_approx(0.5, 1.0, 50) ==
        doctest::Approx(1.0 / 50.0 / (1.0 - std::exp(-1.0))).epsilon(1e-12));

  CHECK(strong_selection_approx(0.5, 1.0) == doctest::Approx(0.5));
  CHECK(strong_selection_approx(1.0, 1.0) == doctest::Approx(2.0 / 3.0));
  // small-s limit recovers Haldane
  CHECK(strong_selection_approx(1e-6, 1.0) ==
        doctest::Approx(2e-6).epsilon(1e-4));
}

TEST_CASE("generator stationarity of the conditioned binomial") {
  // pi Q = 0 with Q the MASP generator; detailed balance makes this exact.
  for (int n : {5, 50, 200}) {
    for (double s : {0.01, 0.1, 0.6}) {
      for (double gamma : {0.8, 1.0, 2.5}) {
        MoranParams p{n, s, gamma};
        auto pi = masp_equilibrium_pmf(p);
        double worst = 0.0;
        for (int j = 1; j <= n; ++j) {
          double flow = 0.0;
          if (j > 1) flow += pi[j - 2] * masp_rates(j - 1, p).up;
          if (j < n) flow += pi[j] * masp_rates(j + 1, p).down;
          auto rj = masp_rates(j, p);
          flow -= pi[j - 1] * (rj.up + rj.down);
          worst = std::max(worst, std::fabs(flow));
        }
        CHECK(worst <= 1e-9);
      }
    }
  }
}

TEST_CASE("embedded chain") {
  SUBCASE("absorbing at one lineage when neutral") {
    auto rng = derive_stream(1, 0);
    auto traj = simulate_masp_embedded({20, 0.0, 1.0}, 1, 50, rng);
    for (int v : traj) CHECK(v == 1);
  }
  SUBCASE("stays in range and moves by one") {
    auto rng = derive_stream(2, 0);
    auto traj = simulate_masp_embedded({30, 0.05, 1.0}, 15, 5000, rng);
    for (std::size_t i = 1; i < traj.size(); ++i) {
      CHECK(traj[i] >= 1);
      CHECK(traj[i] <= 30);
      CHECK(std::abs(traj[i] - traj[i - 1]) <= 1);
    }
  }
  SUBCASE("started at N it reaches the central region") {
    MoranParams p{200, 0.05, 1.0};
    double center = 200 * 2 * 0.05 / (2 * 0.05 + 1.0);
    auto rng = derive_stream(3, 0);
    auto traj = simulate_masp_embedded(p, 200, 20000, rng);
    bool entered = false;
    for (int v : traj) {
      if (v <= center * 1.25 && v >= center * 0.75) {
        entered = true;
        break;
      }
    }
    CHECK(entered);
  }
}

TEST_CASE("holding-time reweighted histogram matches the equilibrium") {
  MoranParams p{50, 0.1, 1.0};
  auto rng = derive_stream(4, 0);
  auto hist = masp_stationary_histogram(p, 5, 1000000, 10000, rng);
  auto pmf = masp_equilibrium_pmf(p);
  CHECK(tv_distance(hist, pmf) < 0.03);
}
