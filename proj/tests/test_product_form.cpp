#include <doctest.h>

#include <cmath>

#include "qnet/product_form.hpp"
#include "test_support.hpp"

using namespace qnet;
using qnet::testing::TestRng;
using qnet::testing::two_node_demo;

TEST_CASE("normalizer: constant rate is the geometric closed form") {
  const double lam = 3.0, mu = 5.0;
  const double rho = lam / mu;
  CHECK(normalizer(lam, RateFunction::constant(mu)) ==
        doctest::Approx(1.0 / (1.0 - rho)).epsilon(1e-13));
}

TEST_CASE("normalizer: demo node 1 reproduces the published pi(0)") {
  const double c1 = normalizer(48.0 / 7.0, RateFunction::geometric_approach(20.0, 1.0, 0.5));
  CHECK(std::abs(1.0 / c1 - 0.6502) < 5e-4);
}

TEST_CASE("normalizer: linear rates match a factorial-series oracle") {
  // mu(n) = n * mu encoded as a long table; pi should be Poisson(lam/mu)
  const double lam = 2.0, mu = 1.5;
  std::vector<double> table;
  for (int n = 1; n <= 80; ++n) table.push_back(n * mu);
  const auto rate = RateFunction::table_with_tail(table, 80 * mu);
  const double c = normalizer(lam, rate);

  // brute force: sum_{n} (lam/mu)^n / n!
  double oracle = 0.0, term = 1.0;
  for (int n = 0; n <= 60; ++n) {
    oracle += term;
    term *= (lam / mu) / (n + 1);
  }
  CHECK(c == doctest::Approx(oracle).epsilon(1e-12));

  MarginalDistribution m(lam, rate);
  const double x = lam / mu;
  for (int n = 0; n <= 20; ++n) {
    double fact = 1.0;
    for (int k = 2; k <= n; ++k) fact *= k;
    CHECK(m.pmf(n) == doctest::Approx(std::exp(-x) * std::pow(x, n) / fact).epsilon(1e-10));
  }
}

TEST_CASE("normalizer rejects non-ergodic input") {
  CHECK_THROWS_AS(normalizer(5.0, RateFunction::constant(5.0)), NonErgodicError);
  CHECK_THROWS_AS(normalizer(6.0, RateFunction::constant(5.0)), NonErgodicError);
}

TEST_CASE("normalizer near criticality against extended summation") {
  const double mu = 4.0;
  const double lam = 0.999 * mu;
  const double c = normalizer(lam, RateFunction::constant(mu));
  CHECK(c == doctest::Approx(1.0 / (1.0 - 0.999)).epsilon(1e-10));
}

TEST_CASE("marginal pmf: constant rate is geometric") {
  MarginalDistribution m(1.0, RateFunction::constant(2.0));
  for (int n = 0; n < 30; ++n) {
    CHECK(m.pmf(n) == doctest::Approx(0.5 * std::pow(0.5, n)).epsilon(1e-13));
  }
}

TEST_CASE("marginal pmf recurrence and log-space tail") {
  MarginalDistribution m(48.0 / 7.0, RateFunction::geometric_approach(20.0, 1.0, 0.5));
  CHECK(std::abs(m.pmf(0) - 0.6502) < 5e-4);
  for (int n = 0; n <= 100; ++n) {
    const double ratio = m.pmf(n + 1) / m.pmf(n);
    CHECK(ratio == doctest::Approx((48.0 / 7.0) / m.rate()(n + 1)).epsilon(1e-11));
  }
  // far tail stays finite and consistent in log space
  CHECK(std::isfinite(m.log_pmf(5000)));
  CHECK(m.log_pmf(5000) < m.log_pmf(100));
}

TEST_CASE("marginal distribution sums to one with certified error") {
  MarginalDistribution m(48.0 / 7.0, RateFunction::geometric_approach(20.0, 1.0, 0.5));
  const double q = m.tail_ratio();
  int n_stop = 0;
  double bound = 1.0;
  // find N where the certified geometric remainder drops below 1e-10
  for (int n = 0; n < 4000; ++n) {
    bound = m.pmf(n) * q / (1.0 - q);
    if (bound < 1e-10) {
      n_stop = n;
      break;
    }
  }
  REQUIRE(bound < 1e-10);
  double sum = 0.0;
  for (int n = 0; n <= n_stop; ++n) sum += m.pmf(n);
  CHECK(std::abs(1.0 - sum) <= bound + 1e-12);
}

TEST_CASE("availability distribution basics") {
  SUBCASE("reliable network puts all mass on the empty set") {
    const auto dist = availability_dist(AvailabilityModel());
    REQUIRE(dist.sets.size() == 1);
    CHECK(dist.prob[0] == 1.0);
  }

  SUBCASE("single unreliable node with 2:1 odds") {
    AvailabilityModel avail({{0b0, 1.0, 1.0}, {0b1, 2.0, 4.0}});
    const auto dist = availability_dist(avail);
    CHECK(dist(0b0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(dist(0b1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }

  SUBCASE("random weights match the standalone chain solved numerically") {
    // m = 2, all four subsets; the availability marginal is autonomous, solve
    // its 4-state balance equations densely as the oracle
    TestRng rng(99);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<AvailabilityEntry> entries;
      for (DownSet d = 0; d < 4; ++d) {
        entries.push_back({d, rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)});
      }
      AvailabilityModel avail(entries);
      const auto dist = availability_dist(avail);
      double total = 0.0;
      for (double p : dist.prob) total += p;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-13));

      Eigen::MatrixXd q = Eigen::MatrixXd::Zero(4, 4);
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          if (a == b) continue;
          const DownSet da = static_cast<DownSet>(a), db = static_cast<DownSet>(b);
          double rate = 0.0;
          if ((da & db) == da) rate = avail.breakdown_rate(da, db);
          if ((da & db) == db) rate = avail.repair_rate(da, db);
          q(a, b) = rate;
          q(a, a) -= rate;
        }
      }
      Eigen::MatrixXd sys = q.transpose();
      sys.row(3).setOnes();
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(4);
      rhs(3) = 1.0;
      const Eigen::VectorXd pi = sys.fullPivLu().solve(rhs);
      for (int a = 0; a < 4; ++a) {
        CHECK(dist(static_cast<DownSet>(a)) == doctest::Approx(pi(a)).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("stationary pmf factorizes") {
  const auto spec = two_node_demo();
  const auto net = stationary_distribution(spec, solve_traffic(spec));

  SUBCASE("reliable single-state availability factor") {
    const std::int64_t zero[2] = {0, 0};
    CHECK(net.pmf(0, zero) ==
          doctest::Approx(net.marginals[0].pmf(0) * net.marginals[1].pmf(0)).epsilon(1e-13));
  }

  SUBCASE("ratio factorization") {
    const std::int64_t s[2] = {3, 5};
    const std::int64_t zero[2] = {0, 0};
    const double lhs = net.pmf(0, s) / net.pmf(0, zero);
    const double rhs = net.marginals[0].pmf(3) / net.marginals[0].pmf(0) *
                       net.marginals[1].pmf(5) / net.marginals[1].pmf(0);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("single reliable constant-rate node is the M/M/1 law") {
  Eigen::MatrixXd r(2, 2);
  r << 0.0, 1.0,
       1.0, 0.0;
  NetworkSpec spec{1.0, RoutingMatrix(r), {RateFunction::constant(2.0)},
                   AvailabilityModel()};
  const auto net = stationary_distribution(spec, solve_traffic(spec));
  for (std::int64_t n = 0; n < 20; ++n) {
    const std::int64_t s[1] = {n};
    CHECK(net.pmf(0, s) == doctest::Approx(0.5 * std::pow(0.5, static_cast<double>(n)))
                               .epsilon(1e-13));
  }
}

TEST_CASE("ergodicity verdicts") {
  const auto spec = two_node_demo();
  const auto verdicts = ergodicity_check(spec, solve_traffic(spec));
  REQUIRE(verdicts.size() == 2);
  CHECK(verdicts[0].ergodic);
  CHECK(verdicts[1].ergodic);
  CHECK(verdicts[0].tail_ratio == doctest::Approx(48.0 / 140.0).epsilon(1e-12));
  CHECK(verdicts[1].tail_ratio == doctest::Approx((80.0 / 7.0) / 16.0).epsilon(1e-12));

  // pushing one service to the traffic rate kills ergodicity
  auto bad = spec;
  bad.services[0] = RateFunction::constant(48.0 / 7.0);
  const auto v2 = ergodicity_check(bad, solve_traffic(bad));
  CHECK_FALSE(v2[0].ergodic);
}

TEST_CASE("detailed balance of the marginal") {
  MarginalDistribution m(48.0 / 7.0, RateFunction::geometric_approach(20.0, 1.0, 0.5));
  for (std::int64_t n = 0; n < 60; ++n) {
    CHECK(m.pmf(n + 1) * m.rate()(n + 1) ==
          doctest::Approx(m.pmf(n) * m.traffic()).epsilon(1e-12));
  }
}

TEST_CASE("pi ratio check on neighbor states") {
  const auto spec = two_node_demo();
  const auto net = stationary_distribution(spec, solve_traffic(spec));
  const double d = 49.0 / 12.0;

  SUBCASE("equal states always pass") {
    const std::int64_t s[2] = {4, 9};
    CHECK(pi_ratio_check(net, d, 0, s, s));
  }

  SUBCASE("exhaustive neighbors on a 30x30 box") {
    for (std::int64_t a = 0; a < 30; ++a) {
      for (std::int64_t b = 0; b < 30; ++b) {
        for (int da = -1; da <= 1; ++da) {
          for (int db = -1; db <= 1; ++db) {
            const std::int64_t s[2] = {a, b};
            const std::int64_t o[2] = {a + da, b + db};
            if (o[0] < 0 || o[1] < 0) continue;
            CHECK(pi_ratio_check(net, d, 0, s, o));
          }
        }
      }
    }
  }

  SUBCASE("coordinate jump of 2 violates the precondition") {
    const std::int64_t s[2] = {4, 9};
    const std::int64_t o[2] = {6, 9};
    CHECK_THROWS_AS(pi_ratio_check(net, d, 0, s, o), std::invalid_argument);
  }
}
