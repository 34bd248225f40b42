#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qnet/generator.hpp"
#include "qnet/product_form.hpp"
#include "test_support.hpp"

using namespace qnet;
using qnet::testing::TestRng;
using qnet::testing::reversible_unreliable_demo;
using qnet::testing::two_node_demo;

namespace {

TruncatedGenerator two_state_chain(double a, double b) {
  std::vector<Eigen::Triplet<double>> trip{{0, 1, a}, {1, 0, b}};
  return TruncatedGenerator::from_triplets(2, trip);
}

/// Kronecker sum of two BD generators: states (i, j), coordinates move
/// independently. Oracle for gaps of product processes.
TruncatedGenerator kronecker_sum_bd(double lam_a, std::span<const double> mu_a,
                                    double lam_b, std::span<const double> mu_b,
                                    std::int64_t box) {
  std::vector<Eigen::Triplet<double>> trip;
  const auto idx = [box](std::int64_t i, std::int64_t j) { return i * (box + 1) + j; };
  for (std::int64_t i = 0; i <= box; ++i) {
    for (std::int64_t j = 0; j <= box; ++j) {
      if (i < box) trip.emplace_back(idx(i, j), idx(i + 1, j), lam_a);
      if (i > 0) trip.emplace_back(idx(i, j), idx(i - 1, j), mu_a[i - 1]);
      if (j < box) trip.emplace_back(idx(i, j), idx(i, j + 1), lam_b);
      if (j > 0) trip.emplace_back(idx(i, j), idx(i, j - 1), mu_b[j - 1]);
    }
  }
  return TruncatedGenerator::from_triplets((box + 1) * (box + 1), trip);
}

}  // namespace

TEST_CASE("smallest network generator: m=1 reliable, box=1") {
  Eigen::MatrixXd r(2, 2);
  r << 0.0, 1.0,
       1.0, 0.0;
  NetworkSpec spec{1.5, RoutingMatrix(r), {RateFunction::constant(4.0)},
                   AvailabilityModel()};
  const auto gen = TruncatedGenerator::network(spec, 1);
  REQUIRE(gen.size() == 2);
  CHECK(gen.matrix().coeff(0, 1) == doctest::Approx(1.5));
  CHECK(gen.matrix().coeff(1, 0) == doctest::Approx(4.0));
  CHECK(gen.matrix().coeff(0, 0) == doctest::Approx(-1.5));
}

TEST_CASE("generator row sums vanish and |Q| matches the norm bound") {
  const auto spec = two_node_demo();
  const auto gen = TruncatedGenerator::network(spec, 20);
  const Eigen::VectorXd row_sums = gen.matrix() * Eigen::VectorXd::Ones(gen.size());
  CHECK(row_sums.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(gen.max_exit_rate() <= 48.0 + 1e-12);
}

TEST_CASE("transition families on a 3x3 box with full availability") {
  // m = 2, all four subsets usable: counts per family match hand enumeration
  const auto spec = reversible_unreliable_demo();
  const std::int64_t box = 2;
  const auto gen = TruncatedGenerator::network(spec, box);
  REQUIRE(gen.layout().has_value());
  const auto& space = *gen.layout();
  REQUIRE(space.down_sets.size() == 4);
  REQUIRE(gen.size() == 4 * 9);

  std::int64_t arrivals = 0, migrations = 0, departures = 0, avail_moves = 0;
  std::vector<std::int64_t> n_from, n_to;
  int d_from = 0, d_to = 0;
  const auto& q = gen.matrix();
  for (int k = 0; k < q.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(q, k); it; ++it) {
      if (it.row() == it.col() || it.value() <= 0.0) continue;
      space.decode(it.row(), d_from, n_from);
      space.decode(it.col(), d_to, n_to);
      if (d_from != d_to) {
        ++avail_moves;
        CHECK(n_from == n_to);
        continue;
      }
      const std::int64_t delta = (n_to[0] - n_from[0]) + (n_to[1] - n_from[1]);
      if (delta == 1) ++arrivals;
      else if (delta == -1) ++departures;
      else ++migrations;
    }
  }

  // hand enumeration: arrivals into node j need n_j < 2 and j up; per down
  // set D the up nodes contribute 6 arrival edges each (3 states of the
  // other coordinate x 2 source levels), etc.
  std::int64_t expect_arrivals = 0, expect_departures = 0, expect_migrations = 0,
               expect_avail = 0;
  for (DownSet d : space.down_sets) {
    const int up = 2 - ((d & 1) != 0) - ((d & 2) != 0);
    expect_arrivals += up * 6;
    expect_departures += up * 6;
    if (up == 2) expect_migrations += 2 * 2 * 2;  // i->j, 2 источника levels, 2 targets
    // breakdown/repair moves: to every other usable subset related by
    // inclusion; all 4 subsets are mutually reachable through the lattice
  }
  // availability edges: per queue state (9), ordered pairs related by strict
  // inclusion: (00,01),(00,10),(00,11),(01,11),(10,11) in both directions = 10
  expect_avail = 9 * 10;
  CHECK(arrivals == expect_arrivals);
  CHECK(departures == expect_departures);
  CHECK(migrations == expect_migrations);
  CHECK(avail_moves == expect_avail);
}

TEST_CASE("state-space cap is enforced") {
  const auto spec = two_node_demo();
  CHECK_THROWS_AS(TruncatedGenerator::network(spec, 800), std::invalid_argument);
}

TEST_CASE("stationary vector of a BD chain matches the balance products") {
  const auto gen = TruncatedGenerator::birth_death(1.0, RateFunction::constant(2.0), 60);
  const Eigen::VectorXd pi = stationary_of(gen);
  double w = 1.0, total = 1.0;
  std::vector<double> expect{1.0};
  for (int k = 1; k <= 60; ++k) {
    w *= 0.5;
    expect.push_back(w);
    total += w;
  }
  for (int k = 0; k <= 60; ++k) {
    CHECK(pi(k) == doctest::Approx(expect[k] / total).epsilon(1e-11));
  }
}

TEST_CASE("stationary vector of a 2-state chain") {
  const auto gen = two_state_chain(0.3, 0.7);
  const Eigen::VectorXd pi = stationary_of(gen);
  CHECK(pi(0) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(pi(1) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("reversible unreliable network: truncated stationary is the product form") {
  const auto spec = reversible_unreliable_demo();
  const auto traffic = solve_traffic(spec);
  REQUIRE(check_routing_reversible(spec, traffic).reversible);
  const auto net = stationary_distribution(spec, traffic);

  const std::int64_t box = 8;
  const auto gen = TruncatedGenerator::network(spec, box);
  const Eigen::VectorXd pi = stationary_of(gen);

  // box-normalized product form
  const auto& space = *gen.layout();
  Eigen::VectorXd expect(gen.size());
  std::vector<std::int64_t> n;
  int d_idx = 0;
  for (std::int64_t id = 0; id < gen.size(); ++id) {
    space.decode(id, d_idx, n);
    expect(id) = net.pmf(space.down_sets[static_cast<std::size_t>(d_idx)], n);
  }
  expect /= expect.sum();

  const double tv = 0.5 * (pi - expect).cwiseAbs().sum();
  CHECK(tv < 1e-10);

  CHECK(detailed_balance_check(gen, pi) < 1e-10);
}

TEST_CASE("demo network is not in detailed balance") {
  const auto gen = TruncatedGenerator::network(two_node_demo(), 8);
  const Eigen::VectorXd pi = stationary_of(gen);
  CHECK(detailed_balance_check(gen, pi) > 0.01);
}

TEST_CASE("numeric gap of a 2-state chain is the rate sum") {
  const auto gen = two_state_chain(0.6, 1.1);
  const auto result = numeric_gap(gen);
  CHECK(result.gap == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(std::abs(result.zero_eigenvalue) < 1e-12);
}

TEST_CASE("truncated M/M/1 gap approaches the closed form") {
  // (sqrt(mu) - sqrt(lambda))^2 for lambda=1, mu=2
  const double closed = std::pow(std::sqrt(2.0) - 1.0, 2);
  double previous_error = 1.0;
  for (const std::int64_t box : {100, 200, 400}) {
    const auto gen = TruncatedGenerator::birth_death(1.0, RateFunction::constant(2.0), box);
    const auto result = numeric_gap(gen);
    const double error = std::abs(result.gap - closed);
    CHECK(error < previous_error + 1e-12);  // truncation error shrinks
    previous_error = error;
    if (box == 400) CHECK(error < 1e-3);
  }
}

TEST_CASE("kronecker sum gap equals the coordinate minimum") {
  // two different BD chains, box 100: product gap = min of coordinate gaps
  const std::int64_t box = 100;
  std::vector<double> mu_a(box), mu_b(box);
  const auto rate_b = RateFunction::geometric_approach(2.5, 0.5, 0.6);
  for (std::int64_t k = 1; k <= box; ++k) {
    mu_a[k - 1] = 2.0;
    mu_b[k - 1] = rate_b(k);
  }
  const double lam_a = 1.0, lam_b = 1.2;

  const auto gen_a = TruncatedGenerator::birth_death(lam_a, mu_a, box);
  const auto gen_b = TruncatedGenerator::birth_death(lam_b, mu_b, box);
  const double gap_a = numeric_gap(gen_a).gap;
  const double gap_b = numeric_gap(gen_b).gap;

  const auto prod = kronecker_sum_bd(lam_a, mu_a, lam_b, mu_b, box);
  // exact product stationary law as the oracle route
  const Eigen::VectorXd pi_a = stationary_of(gen_a);
  const Eigen::VectorXd pi_b = stationary_of(gen_b);
  Eigen::VectorXd pi(prod.size());
  for (std::int64_t i = 0; i <= box; ++i) {
    for (std::int64_t j = 0; j <= box; ++j) pi(i * (box + 1) + j) = pi_a(i) * pi_b(j);
  }
  const auto result = numeric_gap(prod, &pi);
  CHECK(result.method == "lanczos");
  CHECK(std::abs(result.gap - std::min(gap_a, gap_b)) < 1e-9);

  const double gaps[] = {gap_a, gap_b};
  CHECK(product_gap(gaps) == std::min(gap_a, gap_b));
}

TEST_CASE("numeric gap is invariant under state relabeling") {
  const auto spec = two_node_demo();
  const auto gen = TruncatedGenerator::network(spec, 6);
  const double gap = numeric_gap(gen).gap;

  // permute states by a fixed stride map
  const std::int64_t s = gen.size();
  std::vector<std::int64_t> perm(static_cast<std::size_t>(s));
  for (std::int64_t i = 0; i < s; ++i) perm[static_cast<std::size_t>(i)] = (i * 17 + 5) % s;
  std::vector<Eigen::Triplet<double>> trip;
  const auto& q = gen.matrix();
  for (int k = 0; k < q.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(q, k); it; ++it) {
      if (it.row() == it.col()) continue;
      trip.emplace_back(perm[static_cast<std::size_t>(it.row())],
                        perm[static_cast<std::size_t>(it.col())], it.value());
    }
  }
  const auto permuted = TruncatedGenerator::from_triplets(s, trip);
  CHECK(std::abs(numeric_gap(permuted).gap - gap) < 1e-9);
}

TEST_CASE("two eigensolve routes agree on a reversible instance") {
  const auto spec = reversible_unreliable_demo();
  const auto gen = TruncatedGenerator::network(spec, 3);
  const auto result = numeric_gap(gen);

  // independent route: full nonsymmetric spectrum of -Q
  Eigen::MatrixXd minus_q = -Eigen::MatrixXd(gen.matrix());
  Eigen::EigenSolver<Eigen::MatrixXd> es(minus_q);
  std::vector<double> real_parts;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    CHECK(std::abs(es.eigenvalues()(i).imag()) < 1e-9);  // reversible: real
    real_parts.push_back(es.eigenvalues()(i).real());
  }
  std::sort(real_parts.begin(), real_parts.end());
  CHECK(std::abs(real_parts[0]) < 1e-9);
  CHECK(result.gap == doctest::Approx(real_parts[1]).epsilon(1e-9));
}

TEST_CASE("gap truncation trend is monotone for an ergodic BD family") {
  double prev_change = 1.0;
  double prev_gap = 0.0;
  bool first = true;
  for (const std::int64_t box : {25, 50, 100, 200}) {
    const auto gen =
        TruncatedGenerator::birth_death(1.0, RateFunction::geometric_approach(3.0, 1.0, 0.5), box);
    const double gap = numeric_gap(gen).gap;
    if (!first) {
      const double change = std::abs(gap - prev_gap);
      CHECK(change <= prev_change + 1e-12);
      prev_change = change;
    }
    prev_gap = gap;
    first = false;
  }
}

TEST_CASE("triplet export round-trips") {
  const auto gen = TruncatedGenerator::birth_death(1.0, RateFunction::constant(2.0), 3);
  std::ostringstream os;
  gen.export_triplets(os);
  std::istringstream is(os.str());
  std::vector<Eigen::Triplet<double>> trip;
  std::int64_t row, col;
  double rate;
  while (is >> row >> col >> rate) trip.emplace_back(row, col, rate);
  const auto rebuilt = TruncatedGenerator::from_triplets(4, trip);
  CHECK((Eigen::MatrixXd(rebuilt.matrix()) - Eigen::MatrixXd(gen.matrix()))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}
