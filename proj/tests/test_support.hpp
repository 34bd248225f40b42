#pragma once

#include <cstdint>
#include <vector>

#include "qnet/network.hpp"

namespace qnet::testing {

/// Two-node demo network used across the suites: lambda = 12, routing
/// [[0,1/3,2/3],[1/2,0,1/2],[3/4,1/4,0]], mu1(n) = 20 - 2^-n,
/// mu2(n) = 16 - 4^-n, reliable. Traffic solves to (48/7, 80/7).
inline NetworkSpec two_node_demo() {
  Eigen::MatrixXd r(3, 3);
  r << 0.0, 1.0 / 3.0, 2.0 / 3.0,
       0.5, 0.0, 0.5,
       0.75, 0.25, 0.0;
  return NetworkSpec{12.0,
                     RoutingMatrix(r),
                     {RateFunction::geometric_approach(20.0, 1.0, 0.5),
                      RateFunction::geometric_approach(16.0, 1.0, 0.25)},
                     AvailabilityModel()};
}

/// Reversible two-node network: symmetric routing weights make the traffic
/// products balance; all four availability subsets are usable.
inline NetworkSpec reversible_unreliable_demo() {
  // symmetric weight matrix on {0,1,2} row-normalized; reversibility of the
  // embedded routing follows from the symmetry
  Eigen::MatrixXd w(3, 3);
  w << 0.0, 1.0, 1.0,
       1.0, 0.4, 0.6,
       1.0, 0.6, 0.8;
  Eigen::MatrixXd r(3, 3);
  for (int i = 0; i < 3; ++i) r.row(i) = w.row(i) / w.row(i).sum();
  std::vector<AvailabilityEntry> avail = {
      {0b00, 1.0, 1.0}, {0b01, 0.8, 2.0}, {0b10, 0.5, 1.5}, {0b11, 0.3, 2.5}};
  // traffic lambda_i = arrival * W_i / W_0; service limits keep both nodes
  // well inside the ergodic region
  return NetworkSpec{2.0,
                     RoutingMatrix(r),
                     {RateFunction::geometric_approach(5.0, 1.0, 0.5),
                      RateFunction::table_with_tail({4.0, 4.5, 5.5}, 6.0)},
                     AvailabilityModel(avail)};
}

/// splitmix64 for reproducible test randomness.
class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int pick(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

 private:
  std::uint64_t state_;
};

/// Random service rate with tail limit mu_inf, mixing the three kinds.
inline RateFunction random_rate(TestRng& rng, double mu_inf) {
  switch (rng.pick(3)) {
    case 0:
      return RateFunction::constant(mu_inf);
    case 1: {
      const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
      const double b = sign * rng.uniform(0.05, 0.3) * mu_inf;
      return RateFunction::geometric_approach(mu_inf, b, rng.uniform(0.2, 0.8));
    }
    default: {
      std::vector<double> values;
      const int k = 1 + rng.pick(6);
      for (int i = 0; i < k; ++i) values.push_back(mu_inf * rng.uniform(0.6, 1.6));
      return RateFunction::table_with_tail(std::move(values), mu_inf);
    }
  }
}

/// Random ergodic spec: reversible routing via symmetric weights when asked,
/// otherwise a dense positive routing; service tails sized from the solved
/// traffic so every node is ergodic.
inline NetworkSpec random_spec(TestRng& rng, int m, bool reversible, bool unreliable) {
  Eigen::MatrixXd r(m + 1, m + 1);
  if (reversible) {
    Eigen::MatrixXd w(m + 1, m + 1);
    for (int i = 0; i <= m; ++i) {
      for (int j = i; j <= m; ++j) {
        double v = rng.uniform(0.2, 1.0);
        if (i == j) v = (i == 0) ? 0.0 : rng.uniform(0.0, 0.3);
        w(i, j) = v;
        w(j, i) = v;
      }
    }
    for (int i = 0; i <= m; ++i) r.row(i) = w.row(i) / w.row(i).sum();
  } else {
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j <= m; ++j) r(i, j) = rng.uniform(0.05, 1.0);
      r(i, i) = (i == 0) ? 0.0 : rng.uniform(0.0, 0.2);
      r.row(i) /= r.row(i).sum();
    }
    // row 0 may leak mass (lost arrivals)
    r.row(0) *= rng.uniform(0.7, 1.0);
  }

  std::vector<AvailabilityEntry> avail;
  if (unreliable) {
    for (DownSet d = 0; d < (1u << m); ++d) {
      avail.push_back(AvailabilityEntry{d, rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)});
    }
  } else {
    avail.push_back(AvailabilityEntry{0, 1.0, 1.0});
  }

  NetworkSpec spec{rng.uniform(1.0, 5.0), RoutingMatrix(r),
                   std::vector<RateFunction>(static_cast<std::size_t>(m),
                                             RateFunction::constant(1.0)),
                   AvailabilityModel(std::move(avail))};
  const TrafficVector traffic = solve_traffic(spec);
  for (int i = 1; i <= m; ++i) {
    const double mu_inf = traffic[i] / rng.uniform(0.3, 0.85);
    spec.services[i - 1] = random_rate(rng, mu_inf);
  }
  return spec;
}

}  // namespace qnet::testing
