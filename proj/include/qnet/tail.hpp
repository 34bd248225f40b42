#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qnet/product_form.hpp"

namespace qnet {

/// Discrete distribution on Z+ with p(k) > 0 everywhere, from one of three
/// sources: an explicit pmf prefix with an optional geometric tail rule, a
/// product-form marginal, or a hazard-rule pattern. Tail information is only
/// reported when the source certifies it exactly.
class DiscreteDist {
 public:
  static DiscreteDist from_pmf_prefix(std::vector<double> pmf,
                                      std::optional<double> geometric_tail_ratio);
  static DiscreteDist from_marginal(MarginalDistribution marginal);
  /// Built-in pattern: h(k) = 1/2 on even k and k = 1, h(k) = 1/k on odd
  /// k >= 3. Light-tailed but its hazard infimum is 0.
  static DiscreteDist example4();

  double pmf(std::int64_t k) const;
  /// P(X > k).
  double tail(std::int64_t k) const;
  double hazard(std::int64_t k) const;
  double equilibrium_rate(std::int64_t k) const;

  /// Exact equilibrium-rate tail limit, when the source provides one.
  std::optional<double> equilibrium_limit() const;
  /// Exact hazard tail limit 1 - 1/e_inf when e_inf in (1, inf).
  std::optional<double> hazard_limit() const;

  /// Index K with e(k) exactly constant for k > K (so h(k) = hazard_limit
  /// exactly for k >= K); nullopt when no such K is certified.
  std::optional<std::int64_t> exact_constant_tail_from() const;
  /// True when the source certifies a subsequence h(k_j) -> 0.
  bool certifies_vanishing_hazard() const;
  /// True when the hazard is certified monotone beyond scanned range
  /// (product-form marginals with monotone rates).
  bool hazard_monotone() const;

  /// Largest k with exact pmf information when no tail rule exists
  /// (pmf prefix without rule); nullopt when unrestricted.
  std::optional<std::int64_t> prefix_end() const;

 private:
  DiscreteDist() = default;

  enum class Source { pmf_prefix, marginal, hazard_rule } source_ = Source::pmf_prefix;

  // pmf_prefix
  std::vector<double> pmf_;
  std::vector<double> suffix_;  // suffix_[k] = sum_{j>=k} pmf_[j]
  std::optional<double> ratio_;

  // marginal
  std::optional<MarginalDistribution> marginal_;

  // hazard_rule
  std::function<double(std::int64_t)> hazard_fn_;
  bool vanishing_hazard_ = false;
};

enum class TailVerdict { strongly_light, not_strongly_light, inconclusive };

std::string_view to_string(TailVerdict v);

struct TailReport {
  std::int64_t horizon = 0;
  double inf_hazard_observed = 0.0;   // min h(k) over k <= horizon
  std::int64_t argmin = 0;
  std::optional<double> hazard_tail_limit;
  std::optional<double> equilibrium_tail_limit;
  /// Certified infimum over all k (observed scan + exact tail), present only
  /// when the verdict is strongly_light.
  std::optional<double> certified_infimum;
  TailVerdict verdict = TailVerdict::inconclusive;
};

/// Three-valued verdict: strongly_light / not_strongly_light only when an
/// exact tail rule certifies the infimum or a vanishing subsequence.
TailReport strong_light_tail_check(const DiscreteDist& dist, std::int64_t horizon = 512);

/// e(k+1) = (h(k)/h(k+1)) / (1 - h(k)). Input h(0..L-1) in (0,1); output
/// e(0..L-1) with e(0) = 0.
std::vector<double> hazard_to_equilibrium(std::span<const double> h);

/// h(k) = 1 / (1 + sum_{j>k} 1/(e(k+1)...e(j))). Input e(1..L) as a span
/// starting at k = 1, continued by the exactly-constant value e_limit > 1
/// beyond the span (which makes the inner series a closed form). Output
/// h(0..L-1).
std::vector<double> equilibrium_to_hazard(std::span<const double> e, double e_limit);

/// Total hazard H(x) = sum_{j<=floor(x)} log(1/(1-h(j))) = -log P(X > x).
double total_hazard(const DiscreteDist& dist, double x);

/// Birth-death process with constant birth rate and deaths mu(k) =
/// lambda * e_p(k); its stationary law is the generating distribution.
struct BirthDeathSpec {
  double birth = 0.0;
  DiscreteDist dist;

  double death(std::int64_t k) const {
    return k <= 0 ? 0.0 : birth * dist.equilibrium_rate(k);
  }
};

BirthDeathSpec bd_from_distribution(DiscreteDist dist, double lambda);

}  // namespace qnet
