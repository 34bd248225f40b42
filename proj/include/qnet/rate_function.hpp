#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qnet {

/// State-dependent service rate mu(n) in one of three closed forms chosen so
/// that the infimum, supremum and tail limit over n >= 1 are exact numbers,
/// not sampled estimates. mu(0) = 0 by convention.
class RateFunction {
 public:
  enum class Kind { constant, table_with_tail, geometric_approach };

  /// mu(n) = mu for all n >= 1.
  static RateFunction constant(double mu);

  /// mu(n) = values[n-1] for 1 <= n <= K, mu(n) = tail_value for n > K.
  static RateFunction table_with_tail(std::vector<double> values, double tail_value);

  /// mu(n) = a - b * ratio^n, monotone toward the limit a (increasing for
  /// b > 0, decreasing for b < 0, constant for b = 0). Requires 0 < ratio < 1
  /// and a - b*ratio > 0 to be valid.
  static RateFunction geometric_approach(double a, double b, double ratio);

  double operator()(std::int64_t n) const;

  Kind kind() const { return kind_; }

  /// inf_{n>=1} mu(n), exact per kind.
  double inf() const;
  /// sup_{n>=1} mu(n), exact per kind (the limit when not attained).
  double sup() const;
  /// lim_{n->inf} mu(n).
  double tail_limit() const;
  /// inf_{k>n} mu(k); drives certified truncation of tail series.
  double tail_inf_after(std::int64_t n) const;
  /// True when mu is nondecreasing in n, decided analytically per kind.
  bool nondecreasing() const;
  /// True when mu is nonincreasing in n, decided analytically per kind.
  bool nonincreasing() const;
  /// Index K such that mu(n) is exactly constant for all n > K
  /// (0 for constant rates, table length for tables); -1 when never constant.
  std::int64_t exactly_constant_after() const;

  /// Appends invariant violations (positivity, finite extrema) to `out`,
  /// prefixing each with `where`.
  void append_violations(std::vector<std::string>& out, std::string_view where) const;

  // serialization accessors
  double constant_mu() const { return a_; }
  const std::vector<double>& table_values() const { return table_; }
  double table_tail() const { return tail_; }
  double geo_a() const { return a_; }
  double geo_b() const { return b_; }
  double geo_ratio() const { return ratio_; }

 private:
  RateFunction() = default;

  Kind kind_ = Kind::constant;
  double a_ = 0.0;      // constant mu, or geometric limit
  double b_ = 0.0;      // geometric offset
  double ratio_ = 0.0;  // geometric ratio
  std::vector<double> table_;
  double tail_ = 0.0;   // table tail value
};

std::string_view to_string(RateFunction::Kind kind);

}  // namespace qnet
