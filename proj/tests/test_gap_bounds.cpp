#include <doctest.h>

#include <cmath>

#include "qnet/gap_bounds.hpp"
#include "test_support.hpp"

using namespace qnet;
using qnet::testing::TestRng;
using qnet::testing::two_node_demo;

TEST_CASE("liggett bound closed forms") {
  const auto b1 = liggett_bound(1.0, 1.0);
  CHECK(b1.bound_sqrt == doctest::Approx(std::pow(std::sqrt(2.0) - 1.0, 2)).epsilon(1e-14));
  CHECK(b1.bound_simple == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(b1.bound_sqrt >= b1.bound_simple);

  // b -> 0 pushes the sqrt form toward 1/c
  const auto b0 = liggett_bound(1e-12, 2.0);
  CHECK(b0.bound_sqrt == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("bound_sqrt dominates bound_simple across random parameters") {
  TestRng rng(7);
  for (int rep = 0; rep < 10000; ++rep) {
    const double b = std::exp(rng.uniform(-6.0, 6.0));
    const double c = std::exp(rng.uniform(-6.0, 6.0));
    const auto bd = liggett_bound(b, c);
    CHECK(bd.bound_sqrt >= bd.bound_simple * (1.0 - 1e-12));
  }
}

TEST_CASE("bd_gap_lower closed form and clamping") {
  CHECK(bd_gap_lower(1.0, 0.5) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(bd_gap_lower(48.0 / 7.0, 0.6502) == doctest::Approx(3.0698).epsilon(1e-3));

  bool clamped = false;
  const double v = bd_gap_lower(1.0, 1.0 - 1e-15, &clamped);
  CHECK(clamped);
  CHECK(std::isfinite(v));
  CHECK(v == doctest::Approx(bd_gap_lower(1.0, 1.0 - 1e-9)).epsilon(1e-12));
}

TEST_CASE("bd_gap_lower coincides with liggett bound_simple derived from eps") {
  TestRng rng(8);
  for (int rep = 0; rep < 200; ++rep) {
    const double lam = rng.uniform(0.2, 8.0);
    const double eps = rng.uniform(1e-4, 1.0 - 1e-4);
    const double b = (1.0 - eps) / eps;
    const auto lb = liggett_bound(b, b / lam);
    CHECK(lb.bound_simple == doctest::Approx(bd_gap_lower(lam, eps)).epsilon(1e-14));
  }
}

TEST_CASE("eps_from_pi0 on the demo nodes") {
  const auto spec = two_node_demo();
  const auto traffic = solve_traffic(spec);
  MarginalDistribution m1(traffic[1], spec.services[0]);
  MarginalDistribution m2(traffic[2], spec.services[1]);
  CHECK(std::abs(eps_from_pi0(m1) - 0.6502) < 5e-4);
  CHECK(std::abs(eps_from_pi0(m2) - 0.2818) < 5e-4);

  // constant rate: eps = 1 - rho exactly
  MarginalDistribution mm1(1.0, RateFunction::constant(2.0));
  CHECK(eps_from_pi0(mm1) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("eps_from_pi0 rejects non-monotone rates") {
  MarginalDistribution m(1.0, RateFunction::table_with_tail({3.0, 2.0}, 4.0));
  CHECK_THROWS_AS(eps_from_pi0(m), std::domain_error);
}

TEST_CASE("product gap is the minimum") {
  const double gaps[] = {3.07, 0.78};
  CHECK(product_gap(gaps) == 0.78);
  const double one[] = {0.4};
  CHECK(product_gap(one) == 0.4);
}

TEST_CASE("compute_d on the demo matches the published factors") {
  const auto spec = two_node_demo();
  const auto d = compute_d(spec, solve_traffic(spec));
  REQUIRE(d.d_i.size() == 2);
  CHECK(std::abs(d.d_i[0] - 35.0 / 12.0) < 1e-12);
  CHECK(std::abs(d.d_i[1] - 7.0 / 5.0) < 1e-12);
  CHECK(std::abs(d.d - 49.0 / 12.0) < 1e-12);
}

TEST_CASE("d_i is 1 when traffic equals both extrema, and always >= 1") {
  Eigen::MatrixXd r(2, 2);
  r << 0.0, 1.0,
       1.0, 0.0;
  NetworkSpec spec{2.0, RoutingMatrix(r), {RateFunction::constant(2.0)},
                   AvailabilityModel()};
  // lambda_1 = 2 = mu everywhere: all four ratios are 1 (the spec is not
  // ergodic, but compute_d only looks at extrema)
  const auto d = compute_d(spec, solve_traffic(spec));
  CHECK(d.d_i[0] == doctest::Approx(1.0).epsilon(1e-14));

  TestRng rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    const auto random = qnet::testing::random_spec(rng, 1 + rng.pick(3), false, false);
    const auto factors = compute_d(random, solve_traffic(random));
    for (double di : factors.d_i) CHECK(di >= 1.0 - 1e-14);
  }
}

TEST_CASE("network gap bound pipeline on the demo") {
  const auto spec = two_node_demo();
  const auto traffic = solve_traffic(spec);
  ReplayInputs replay;
  const auto report = network_gap_lower(spec, traffic, &replay);

  CHECK(report.generator_norm == doctest::Approx(48.0).epsilon(1e-14));
  CHECK(report.q_hat_max == doctest::Approx(20.0).epsilon(1e-13));
  // per-transition minimum positive intensity: inf mu_2 * r_21 = 15/4
  CHECK(report.q_tilde_min == doctest::Approx(3.75).epsilon(1e-13));
  CHECK(report.availability_trivial);
  CHECK(report.hypotheses_met);
  CHECK(report.v1 ==
        doctest::Approx((3.75 / 20.0) / (1.0 + 49.0 / 12.0)).epsilon(1e-13));

  REQUIRE(report.node_bounds.size() == 2);
  CHECK(report.node_bounds[0].eps_source == "pi0");
  CHECK(std::abs(report.node_bounds[0].eps - 0.6502) < 5e-4);
  CHECK(report.node_bounds[0].bound_simple == doctest::Approx(3.0698).epsilon(2e-3));
  CHECK(report.min_bd_bound == doctest::Approx(report.node_bounds[1].bound_simple));

  // replay of the published arithmetic
  REQUIRE(report.replay.has_value());
  CHECK(report.replay->value == doctest::Approx(0.001544667932).epsilon(1e-9));
  CHECK(report.replay->formula_v1 ==
        doctest::Approx((4.0 / 20.0) * (12.0 / 61.0)).epsilon(1e-13));

  // certified bound assembles exactly from its parts
  CHECK(report.certified_bound ==
        doctest::Approx(report.v1 * report.v1 / (8.0 * 48.0) * report.min_bd_bound *
                        report.min_bd_bound)
            .epsilon(1e-13));
}

TEST_CASE("network bound flags unmet hypotheses") {
  // nontrivial availability + non-reversible routing
  auto spec = two_node_demo();
  spec.availability = AvailabilityModel(
      {{0b00, 1.0, 1.0}, {0b01, 0.5, 1.0}, {0b10, 0.5, 1.0}, {0b11, 0.25, 1.0}});
  const auto report = network_gap_lower(spec, solve_traffic(spec), nullptr);
  CHECK_FALSE(report.hypotheses_met);
  CHECK(report.certified_bound > 0.0);

  const auto rev = qnet::testing::reversible_unreliable_demo();
  const auto report2 = network_gap_lower(rev, solve_traffic(rev), nullptr);
  CHECK(report2.hypotheses_met);
  CHECK_FALSE(report2.availability_trivial);
}

TEST_CASE("network bound rejects non-ergodic specs") {
  auto spec = two_node_demo();
  spec.services[1] = RateFunction::constant(80.0 / 7.0);
  CHECK_THROWS_AS(network_gap_lower(spec, solve_traffic(spec), nullptr), NonErgodicError);
}
