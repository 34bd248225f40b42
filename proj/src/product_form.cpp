#include "qnet/product_form.hpp"

#include <algorithm>
#include <cmath>

namespace qnet {

double normalizer(double lambda, const RateFunction& rate) {
  const double mu_inf = rate.tail_limit();
  if (!(lambda > 0.0)) throw std::invalid_argument("normalizer: lambda must be positive");
  if (lambda >= mu_inf) throw NonErgodicError("non-ergodic node");

  double sum = 1.0;
  double term = 1.0;
  for (std::int64_t n = 1;; ++n) {
    term *= lambda / rate(n);
    sum += term;
    const double q = lambda / rate.tail_inf_after(n);
    if (q < 1.0) {
      const double bound = term * q / (1.0 - q);
      if (bound < 1e-14 * sum) break;
    }
    if (n > 1000000) throw NonErgodicError("non-ergodic node");  // cannot happen when q < 1
  }
  return sum;
}

MarginalDistribution::MarginalDistribution(double lambda, RateFunction rate,
                                           std::int64_t cache_size)
    : lambda_(lambda), rate_(std::move(rate)) {
  normalizer_ = qnet::normalizer(lambda_, rate_);
  tail_ratio_ = lambda_ / rate_.tail_limit();
  log_weights_.resize(static_cast<std::size_t>(std::max<std::int64_t>(cache_size, 1)) + 1);
  log_weights_[0] = 0.0;
  const double log_lambda = std::log(lambda_);
  for (std::size_t n = 1; n < log_weights_.size(); ++n) {
    log_weights_[n] = log_weights_[n - 1] + log_lambda - std::log(rate_(static_cast<std::int64_t>(n)));
  }
}

double MarginalDistribution::log_weight(std::int64_t n) const {
  if (n < static_cast<std::int64_t>(log_weights_.size())) {
    return log_weights_[static_cast<std::size_t>(n)];
  }
  double w = log_weights_.back();
  const double log_lambda = std::log(lambda_);
  for (std::int64_t k = static_cast<std::int64_t>(log_weights_.size()); k <= n; ++k) {
    w += log_lambda - std::log(rate_(k));
  }
  return w;
}

double MarginalDistribution::log_pmf(std::int64_t n) const {
  if (n < 0) return -std::numeric_limits<double>::infinity();
  return log_weight(n) - std::log(normalizer_);
}

double MarginalDistribution::pmf(std::int64_t n) const {
  if (n < 0) return 0.0;
  if (n <= 50) {
    double w = 1.0;
    for (std::int64_t k = 1; k <= n; ++k) w *= lambda_ / rate_(k);
    return w / normalizer_;
  }
  return std::exp(log_pmf(n));
}

double MarginalDistribution::tail(std::int64_t n) const {
  if (n < 0) return 1.0;
  // sum pi(j) for j > n until the geometric bound certifies the remainder
  double sum = 0.0;
  double term = pmf(n);
  for (std::int64_t j = n + 1;; ++j) {
    term *= lambda_ / rate_(j);
    sum += term;
    const double q = lambda_ / rate_.tail_inf_after(j);
    if (q < 1.0 && term * q / (1.0 - q) < 1e-16 * (sum + 1e-300)) break;
  }
  return sum;
}

double MarginalDistribution::hazard(std::int64_t k) const {
  // pi(k) / P(X >= k); both sides share the 1/C factor
  const double p = pmf(k);
  const double survivor = p + tail(k);
  return p / survivor;
}

double MarginalDistribution::equilibrium_rate(std::int64_t k) const {
  if (k <= 0) return 0.0;
  return rate_(k) / lambda_;
}

AvailabilityDist availability_dist(const AvailabilityModel& avail) {
  AvailabilityDist dist;
  dist.sets = avail.usable_sets();
  dist.prob.reserve(dist.sets.size());
  double c = 0.0;
  for (DownSet d : dist.sets) {
    const double w = avail.psi(d) / avail.phi(d);
    dist.prob.push_back(w);
    c += w;
  }
  for (double& p : dist.prob) p /= c;
  dist.normalizer = c;
  return dist;
}

double AvailabilityDist::operator()(DownSet d) const {
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i] == d) return prob[i];
  }
  return 0.0;
}

double NetworkStationary::pmf(DownSet down, std::span<const std::int64_t> n) const {
  double p = availability(down);
  for (std::size_t i = 0; i < marginals.size(); ++i) p *= marginals[i].pmf(n[i]);
  return p;
}

double NetworkStationary::log_pmf(DownSet down, std::span<const std::int64_t> n) const {
  double lp = std::log(availability(down));
  for (std::size_t i = 0; i < marginals.size(); ++i) lp += marginals[i].log_pmf(n[i]);
  return lp;
}

NetworkStationary stationary_distribution(const NetworkSpec& spec,
                                          const TrafficVector& traffic) {
  NetworkStationary net;
  net.marginals.reserve(spec.nodes());
  for (int i = 1; i <= spec.nodes(); ++i) {
    net.marginals.emplace_back(traffic[i], spec.services[i - 1]);
  }
  net.availability = availability_dist(spec.availability);
  return net;
}

std::vector<NodeErgodicity> ergodicity_check(const NetworkSpec& spec,
                                             const TrafficVector& traffic) {
  std::vector<NodeErgodicity> verdicts;
  verdicts.reserve(spec.nodes());
  for (int i = 1; i <= spec.nodes(); ++i) {
    NodeErgodicity v;
    v.node = i;
    v.tail_ratio = traffic[i] / spec.services[i - 1].tail_limit();
    v.ergodic = v.tail_ratio < 1.0;
    verdicts.push_back(v);
  }
  return verdicts;
}

bool pi_ratio_check(const NetworkStationary& net, double d, DownSet down,
                    std::span<const std::int64_t> state,
                    std::span<const std::int64_t> other) {
  if (state.size() != net.marginals.size() || other.size() != net.marginals.size()) {
    throw std::invalid_argument("pi_ratio_check: state dimension mismatch");
  }
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (std::abs(state[i] - other[i]) > 1) {
      throw std::invalid_argument(
          "pi_ratio_check: states must differ by at most 1 per coordinate");
    }
    if (state[i] < 0 || other[i] < 0) {
      throw std::invalid_argument("pi_ratio_check: negative queue length");
    }
  }
  if (net.availability(down) <= 0.0) {
    throw std::invalid_argument("pi_ratio_check: down set not usable");
  }
  const double a = net.log_pmf(down, state);
  const double b = net.log_pmf(down, other);
  const double log_d = std::log(d) + 1e-12;  // tolerance for equal states, d >= 1
  return a - b <= log_d && b - a <= log_d;
}

}  // namespace qnet
