#include <cmath>
#include <sstream>

#include "cannings/exact.hpp"
#include "cannings/mathutil.hpp"
#include "doctest.h"

using namespace cannings;
using namespace cannings::exact;

namespace {

// Brute-force occupancy law by enumerating all N^h throw assignments.
std::vector<double> occupancy_by_enumeration(int h, int n) {
  int b_max = std::min(h, n);
  std::vector<double> pmf(b_max, 0.0);
  std::vector<int> assign(h, 0);
  std::int64_t total = 1;
  for (int i = 0; i < h; ++i) total *= n;
  for (std::int64_t code = 0; code < total; ++code) {
    std::int64_t c = code;
    std::vector<char> seen(n, 0);
    int distinct = 0;
    for (int i = 0; i < h; ++i) {
      int box = static_cast<int>(c % n);
      c /= n;
      if (!seen[box]) {
        seen[box] = 1;
        ++distinct;
      }
    }
    pmf[distinct - 1] += 1.0;
  }
  for (auto& x : pmf) x /= static_cast<double>(total);
  return pmf;
}

}  // namespace

TEST_CASE("occupancy pmf for uniform boxes") {
  SUBCASE("single ball") {
    auto pmf = occupancy_pmf_uniform(1, 7);
    REQUIRE(pmf.size() == 1);
    CHECK(pmf[0] == doctest::Approx(1.0));
  }
  SUBCASE("hand values") {
    auto two = occupancy_pmf_uniform(2, 2);
    CHECK(two[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(two[1] == doctest::Approx(0.5).epsilon(1e-12));
    auto three = occupancy_pmf_uniform(3, 3);
    CHECK(three[0] == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
    CHECK(three[1] == doctest::Approx(6.0 / 9.0).epsilon(1e-12));
    CHECK(three[2] == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
  }
  SUBCASE("enumeration oracle") {
    for (auto [h, n] : {std::pair{3, 2}, {4, 3}, {5, 4}, {6, 5}, {2, 5}}) {
      auto fast = occupancy_pmf_uniform(h, n);
      auto slow = occupancy_by_enumeration(h, n);
      REQUIRE(fast.size() == slow.size());
      for (std::size_t i = 0; i < fast.size(); ++i) {
        CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-10));
      }
    }
  }
  SUBCASE("large h stays normalized in log space") {
    auto pmf = occupancy_pmf_uniform(200, 50);
    KahanSum sum;
    for (double x : pmf) sum.add(x);
    CHECK(std::fabs(sum.value() - 1.0) < 1e-12);
  }
  CHECK_THROWS(occupancy_pmf_uniform(201, 10));
  CHECK_THROWS(occupancy_pmf_uniform(0, 10));
}

TEST_CASE("forward transition matrix") {
  SUBCASE("wright-fisher N=2, s=0.5 row") {
    PopulationParams p{2, 0.5, WrightFisher{}};
    auto m = forward_transition_matrix(p);
    CHECK(m.at(1, 0) == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    CHECK(m.at(1, 1) == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    CHECK(m.at(1, 2) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
    CHECK(m.at(0, 0) == 1.0);
    CHECK(m.at(2, 2) == 1.0);
  }
  SUBCASE("neutral rows preserve the mean exactly") {
    PopulationParams p{40, 0.0, WrightFisher{}};
    auto m = forward_transition_matrix(p);
    for (int k = 0; k <= 40; ++k) {
      KahanSum mean, total;
      for (int j = 0; j <= 40; ++j) {
        total.add(m.at(k, j));
        mean.add(j * m.at(k, j));
      }
      CHECK(std::fabs(total.value() - 1.0) < 1e-12);
      CHECK(std::fabs(mean.value() - k) < 1e-9);
    }
  }
  SUBCASE("dirichlet(1) N=2 neutral row is the discrete uniform") {
    // Mixing Binomial(2, x) over x ~ U(0,1) gives (1/3, 1/3, 1/3).
    PopulationParams p{2, 0.0, SymmetricDirichlet{1.0}};
    auto m = forward_transition_matrix(p);
    for (int j = 0; j <= 2; ++j) {
      CHECK(m.at(1, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
  }
  SUBCASE("dirichlet rows are stochastic within the quadrature gate") {
    PopulationParams p{3, 0.1, SymmetricDirichlet{1.0}};
    auto m = forward_transition_matrix(p);
    for (int k = 0; k <= 3; ++k) {
      KahanSum total;
      for (int j = 0; j <= 3; ++j) total.add(m.at(k, j));
      CHECK(std::fabs(total.value() - 1.0) < 1e-10);
    }
  }
  SUBCASE("unsupported weights error out") {
    PopulationParams p{5, 0.1, DirichletType{YLawGamma{2, 1}}};
    CHECK_THROWS(forward_transition_matrix(p));
    PopulationParams big{300, 0.1, WrightFisher{}};
    CHECK_THROWS(forward_transition_matrix(big));
  }
}

TEST_CASE("casp transition matrix") {
  PopulationParams p{2, 0.5, WrightFisher{}};
  auto m = casp_transition_matrix(p);
  CHECK(m.at(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m.at(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(m.at(1, 0) == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
  CHECK(m.at(1, 1) == doctest::Approx(7.0 / 9.0).epsilon(1e-12));

  SUBCASE("small s is almost lower-triangular") {
    PopulationParams ps{6, 1e-9, WrightFisher{}};
    auto ms = casp_transition_matrix(ps);
    for (int a = 1; a <= 6; ++a) {
      for (int b = a + 1; b <= 6; ++b) CHECK(ms.at(a - 1, b - 1) < 1e-8);
    }
  }
  SUBCASE("rows sum to one after renormalization") {
    PopulationParams p5{5, 0.3, WrightFisher{}};
    auto m5 = casp_transition_matrix(p5, 1e-13);
    for (int a = 0; a < 5; ++a) {
      KahanSum total;
      for (int b = 0; b < 5; ++b) total.add(m5.at(a, b));
      CHECK(std::fabs(total.value() - 1.0) < 1e-12);
    }
    CHECK(m5.truncation_residual < 1e-12);
  }
  SUBCASE("neutral matrix is exactly lower-triangular") {
    PopulationParams zero{5, 0.0, WrightFisher{}};
    auto mz = casp_transition_matrix(zero);
    for (int a = 1; a <= 5; ++a) {
      for (int b = a + 1; b <= 5; ++b) CHECK(mz.at(a - 1, b - 1) == 0.0);
    }
  }
  SUBCASE("preconditions") {
    PopulationParams dir{5, 0.3, SymmetricDirichlet{1.0}};
    CHECK_THROWS(casp_transition_matrix(dir));
    PopulationParams fine{5, 0.3, WrightFisher{}};
    CHECK_THROWS(casp_transition_matrix(fine, 1e-6));
  }
}

TEST_CASE("absorption probabilities") {
  PopulationParams p{2, 0.5, WrightFisher{}};
  auto m = forward_transition_matrix(p);
  CHECK(absorption_probability(m, 0, 0) == 1.0);
  CHECK(absorption_probability(m, 2, 0) == 0.0);
  CHECK(absorption_probability(m, 1, 0) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(absorption_probability(m, 1, 2) == doctest::Approx(0.2).epsilon(1e-12));

  SUBCASE("neutral fixation equals the initial frequency") {
    PopulationParams pn{12, 0.0, WrightFisher{}};
    auto mn = forward_transition_matrix(pn);
    for (int k0 = 0; k0 <= 12; ++k0) {
      CHECK(absorption_probability(mn, k0, 0) ==
            doctest::Approx(1.0 - k0 / 12.0).epsilon(1e-9));
    }
  }
  SUBCASE("rejects non-absorbing chains") {
    PopulationParams p2{3, 0.2, WrightFisher{}};
    auto casp = casp_transition_matrix(p2);
    CHECK_THROWS(absorption_probability(casp, 1, 0));
  }
}

TEST_CASE("stationary distribution of the casp") {
  PopulationParams p{2, 0.5, WrightFisher{}};
  auto m = casp_transition_matrix(p);
  auto pi = stationary_distribution(m);
  CHECK(pi[0] == doctest::Approx(0.4).epsilon(1e-10));
  CHECK(pi[1] == doctest::Approx(0.6).epsilon(1e-10));

  SUBCASE("residual criterion holds at N=3") {
    PopulationParams p3{3, 0.2, WrightFisher{}};
    auto m3 = casp_transition_matrix(p3);
    auto pi3 = stationary_distribution(m3);
    for (int j = 0; j < 3; ++j) {
      double flow = 0;
      for (int i = 0; i < 3; ++i) flow += pi3[i] * m3.at(i, j);
      CHECK(std::fabs(flow - pi3[j]) <= 1e-12);
    }
  }
  SUBCASE("identity: stationary mean over N equals the absorption solve") {
    for (int n : {2, 3, 4, 5}) {
      for (double s : {0.1, 0.3}) {
        PopulationParams pp{n, s, WrightFisher{}};
        auto fwd = forward_transition_matrix(pp);
        auto bwd = casp_transition_matrix(pp);
        auto pi_n = stationary_distribution(bwd);
        double mean = 0;
        for (int a = 1; a <= n; ++a) mean += a * pi_n[a - 1];
        double fix = absorption_probability(fwd, n - 1, 0);
        CHECK(std::fabs(mean / n - fix) <= 1e-8);
      }
    }
  }
}

TEST_CASE("exact duality identity") {
  SUBCASE("zero generations is the hypergeometric identity") {
    PopulationParams p{5, 0.3, WrightFisher{}};
    auto d = exact_duality_check(p, 3, 2, 0);
    CHECK(d.lhs == doctest::Approx(falling_ratio(3, 5, 2)).epsilon(1e-14));
    CHECK(d.gap < 1e-14);
  }
  SUBCASE("hand anchor at N=2") {
    PopulationParams p{2, 0.5, WrightFisher{}};
    auto d = exact_duality_check(p, 1, 2, 1);
    CHECK(d.lhs == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
    CHECK(d.rhs == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
    CHECK(d.gap < 1e-14);
  }
  SUBCASE("neutral single lineage gives k/N for every g") {
    PopulationParams p{6, 0.0, WrightFisher{}};
    for (int g : {0, 1, 3}) {
      auto d = exact_duality_check(p, 4, 1, g);
      CHECK(d.lhs == doctest::Approx(4.0 / 6.0).epsilon(1e-10));
      CHECK(d.gap < 1e-10);
    }
  }
  SUBCASE("spot checks across the small grid") {
    for (int n : {3, 5}) {
      for (double s : {0.1, 0.5}) {
        PopulationParams p{n, s, WrightFisher{}};
        for (int g : {1, 3}) {
          for (int k = 1; k <= n; ++k) {
            for (int sample = 1; sample <= n; ++sample) {
              CHECK(exact_duality_check(p, k, sample, g).gap <= 1e-10);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("truncated stationary law agrees with the full solve") {
  PopulationParams p{30, 0.2, WrightFisher{}};
  auto full = stationary_distribution(casp_transition_matrix(p));
  auto truncated = casp_truncated_stationary(p, 30);
  REQUIRE(truncated.size() == 30);
  for (int i = 0; i < 30; ++i) {
    CHECK(std::fabs(full[i] - truncated[i]) < 1e-10);
  }
  auto shorter = casp_truncated_stationary(p, 25);
  for (int i = 0; i < 20; ++i) {
    CHECK(std::fabs(full[i] - shorter[i]) < 1e-8);
  }
}

TEST_CASE("matrix csv export") {
  PopulationParams p{2, 0.5, WrightFisher{}};
  auto m = casp_transition_matrix(p);
  std::string csv = to_csv(m);
  std::istringstream in(csv);
  std::string header, dims, row;
  std::getline(in, header);
  std::getline(in, dims);
  CHECK(header == "dim,state_offset");
  CHECK(dims == "2,1");
  std::getline(in, row);
  double a = std::stod(row.substr(0, row.find(',')));
  CHECK(a == doctest::Approx(2.0 / 3.0));
}
