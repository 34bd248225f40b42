#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "qnet/network.hpp"

namespace qnet {

struct NonErgodicError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Certified summation of C = 1 + sum_{n>=1} lambda^n / prod_{k<=n} mu(k);
/// stops once the geometric tail bound drops below 1e-14 of the partial sum.
/// Throws NonErgodicError when lambda >= mu_infinity ("non-ergodic node").
double normalizer(double lambda, const RateFunction& rate);

/// One coordinate's stationary law pi(n) = lambda^n / (C prod_{k<=n} mu(k)).
/// Immutable after construction; the log-weight cache is filled eagerly so
/// instances can be shared across threads without synchronization.
class MarginalDistribution {
 public:
  static constexpr std::int64_t kDefaultCache = 1024;

  MarginalDistribution(double lambda, RateFunction rate,
                       std::int64_t cache_size = kDefaultCache);

  double traffic() const { return lambda_; }
  const RateFunction& rate() const { return rate_; }
  double normalizer() const { return normalizer_; }
  /// lambda / mu_infinity; ergodic iff < 1 for the three rate kinds.
  double tail_ratio() const { return tail_ratio_; }

  /// pi(n); evaluated in log space for n > 50.
  double pmf(std::int64_t n) const;
  double log_pmf(std::int64_t n) const;
  /// P(X > n), summed with a certified geometric tail bound.
  double tail(std::int64_t n) const;
  /// Discrete hazard pi(k) / P(X >= k).
  double hazard(std::int64_t k) const;
  /// Equilibrium rate pi(k-1)/pi(k) = mu(k)/lambda, exact; 0 at k = 0.
  double equilibrium_rate(std::int64_t k) const;

 private:
  double log_weight(std::int64_t n) const;  // log(lambda^n / prod mu)

  double lambda_ = 0.0;
  RateFunction rate_;
  double normalizer_ = 0.0;
  double tail_ratio_ = 0.0;
  std::vector<double> log_weights_;  // n = 0..cache
};

/// Availability factor pi0(D) proportional to psi(D)/phi(D) over usable sets.
struct AvailabilityDist {
  std::vector<DownSet> sets;
  std::vector<double> prob;
  double normalizer = 0.0;  // C = sum psi/phi

  double operator()(DownSet d) const;
};

AvailabilityDist availability_dist(const AvailabilityModel& avail);

/// Product-form stationary law of the whole network.
struct NetworkStationary {
  std::vector<MarginalDistribution> marginals;
  AvailabilityDist availability;

  double pmf(DownSet down, std::span<const std::int64_t> n) const;
  double log_pmf(DownSet down, std::span<const std::int64_t> n) const;
};

NetworkStationary stationary_distribution(const NetworkSpec& spec,
                                          const TrafficVector& traffic);

struct NodeErgodicity {
  int node = 0;
  double tail_ratio = 0.0;
  bool ergodic = false;
};

/// Per node: ergodic iff lambda_i / mu_infinity < 1 (exact per rate kind).
std::vector<NodeErgodicity> ergodicity_check(const NetworkSpec& spec,
                                             const TrafficVector& traffic);

/// Checks (1/d) pi(s') <= pi(s) <= d pi(s') for states sharing the same down
/// set and differing by at most one per queue coordinate. Throws
/// std::invalid_argument on precondition violations.
bool pi_ratio_check(const NetworkStationary& net, double d, DownSet down,
                    std::span<const std::int64_t> state,
                    std::span<const std::int64_t> other);

}  // namespace qnet
