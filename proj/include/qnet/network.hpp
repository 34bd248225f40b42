#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qnet/availability.hpp"
#include "qnet/rate_function.hpp"
#include "qnet/routing.hpp"

namespace qnet {

/// Open network of m unreliable exponential single-server queues with
/// Markovian routing, Poisson arrivals and RS-RD blocking while down.
struct NetworkSpec {
  double arrival_rate = 0.0;
  RoutingMatrix routing;
  std::vector<RateFunction> services;  // services[i] serves node i+1
  AvailabilityModel availability;

  int nodes() const { return static_cast<int>(services.size()); }
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Per-node effective arrival intensities, the unique fixed point of
/// lambda_i = lambda r_{0i} + sum_j lambda_j r_{ji}.
struct TrafficVector {
  std::vector<double> rates;  // rates[i] is lambda_{i+1}

  double operator[](int node) const { return rates[node - 1]; }  // 1-based
  int nodes() const { return static_cast<int>(rates.size()); }
};

struct TrafficError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Collects every type-invariant violation plus irreducibility of the
/// routing graph; an empty list means the spec is usable downstream.
ValidationReport validate_spec(const NetworkSpec& spec);

/// Solves the traffic equation. Throws TrafficError("no unique traffic
/// solution") when the linear system is singular. Relative residual of the
/// returned solution is below 1e-10.
TrafficVector solve_traffic(const NetworkSpec& spec);

struct ReversibilityCheck {
  bool reversible = false;
  double max_violation = 0.0;  // max |lambda_j r_ji - lambda_i r_ij| over {0..m}
};

/// Detailed balance of the routing-level traffic products, with the
/// convention lambda_0 = lambda for the outside node.
ReversibilityCheck check_routing_reversible(const NetworkSpec& spec,
                                            const TrafficVector& traffic);

}  // namespace qnet
