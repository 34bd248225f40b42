#include "qnet/tail.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qnet {

// ---------------------------------------------------------------------------
// DiscreteDist
// ---------------------------------------------------------------------------

DiscreteDist DiscreteDist::from_pmf_prefix(std::vector<double> pmf,
                                           std::optional<double> geometric_tail_ratio) {
  if (pmf.empty()) throw std::invalid_argument("pmf prefix must be nonempty");
  for (double p : pmf) {
    if (!(p > 0.0)) throw std::invalid_argument("pmf values must be positive");
  }
  if (geometric_tail_ratio && !(*geometric_tail_ratio > 0.0 && *geometric_tail_ratio < 1.0)) {
    throw std::invalid_argument("geometric tail ratio must lie in (0,1)");
  }

  DiscreteDist d;
  d.source_ = Source::pmf_prefix;
  d.pmf_ = std::move(pmf);
  d.ratio_ = geometric_tail_ratio;

  double total = 0.0;
  for (double p : d.pmf_) total += p;
  if (d.ratio_) {
    // the prefix plus the closed-form geometric tail carries all the mass;
    // inputs are treated as relative weights
    total += d.pmf_.back() * *d.ratio_ / (1.0 - *d.ratio_);
    for (double& p : d.pmf_) p /= total;
  } else if (total > 1.0 + 1e-12) {
    throw std::invalid_argument("pmf prefix without tail rule must sum to at most 1");
  }
  // without a tail rule the deficit 1 - total is real but unlocated mass
  // beyond the prefix; F̄ inside the prefix is still exact

  d.suffix_.assign(d.pmf_.size() + 1, 0.0);
  for (std::size_t k = d.pmf_.size(); k-- > 0;) {
    d.suffix_[k] = d.suffix_[k + 1] + d.pmf_[k];
  }
  return d;
}

DiscreteDist DiscreteDist::from_marginal(MarginalDistribution marginal) {
  DiscreteDist d;
  d.source_ = Source::marginal;
  d.marginal_ = std::move(marginal);
  return d;
}

DiscreteDist DiscreteDist::example4() {
  DiscreteDist d;
  d.source_ = Source::hazard_rule;
  d.hazard_fn_ = [](std::int64_t k) {
    if (k == 1) return 0.5;
    if (k % 2 == 1) return 1.0 / static_cast<double>(k);
    return 0.5;
  };
  d.vanishing_hazard_ = true;  // h(2n+1) = 1/(2n+1) -> 0
  return d;
}

double DiscreteDist::pmf(std::int64_t k) const {
  if (k < 0) return 0.0;
  switch (source_) {
    case Source::pmf_prefix: {
      const auto K = static_cast<std::int64_t>(pmf_.size()) - 1;
      if (k <= K) return pmf_[static_cast<std::size_t>(k)];
      if (!ratio_) throw std::domain_error("pmf prefix has no tail rule beyond its range");
      return pmf_.back() * std::pow(*ratio_, static_cast<double>(k - K));
    }
    case Source::marginal:
      return marginal_->pmf(k);
    case Source::hazard_rule:
      return hazard_fn_(k) * (k == 0 ? 1.0 : tail(k - 1));
  }
  return 0.0;
}

double DiscreteDist::tail(std::int64_t k) const {
  if (k < 0) return 1.0;
  switch (source_) {
    case Source::pmf_prefix: {
      const auto K = static_cast<std::int64_t>(pmf_.size()) - 1;
      if (k <= K) {
        double t = suffix_[static_cast<std::size_t>(k + 1)];
        if (ratio_) {
          t += pmf_.back() * *ratio_ / (1.0 - *ratio_);
        } else {
          t += 1.0 - suffix_[0];  // unlocated mass beyond the prefix
        }
        return t;
      }
      if (!ratio_) throw std::domain_error("pmf prefix has no tail rule beyond its range");
      return pmf(k) * *ratio_ / (1.0 - *ratio_);
    }
    case Source::marginal:
      return marginal_->tail(k);
    case Source::hazard_rule: {
      double t = 1.0;
      for (std::int64_t j = 0; j <= k; ++j) t *= 1.0 - hazard_fn_(j);
      return t;
    }
  }
  return 0.0;
}

double DiscreteDist::hazard(std::int64_t k) const {
  if (k < 0) throw std::invalid_argument("hazard: k must be nonnegative");
  if (source_ == Source::hazard_rule) return hazard_fn_(k);
  const double p = pmf(k);
  const double survivor = k == 0 ? 1.0 : tail(k - 1);
  return p / survivor;
}

double DiscreteDist::equilibrium_rate(std::int64_t k) const {
  if (k <= 0) return 0.0;
  if (source_ == Source::marginal) return marginal_->equilibrium_rate(k);
  return pmf(k - 1) / pmf(k);
}

std::optional<double> DiscreteDist::equilibrium_limit() const {
  switch (source_) {
    case Source::pmf_prefix:
      if (ratio_) return 1.0 / *ratio_;
      return std::nullopt;
    case Source::marginal:
      return marginal_->rate().tail_limit() / marginal_->traffic();
    case Source::hazard_rule:
      return std::nullopt;  // e oscillates for the built-in pattern
  }
  return std::nullopt;
}

std::optional<double> DiscreteDist::hazard_limit() const {
  const auto e = equilibrium_limit();
  if (!e || !(*e > 1.0)) return std::nullopt;
  return 1.0 - 1.0 / *e;
}

std::optional<std::int64_t> DiscreteDist::exact_constant_tail_from() const {
  switch (source_) {
    case Source::pmf_prefix:
      if (ratio_) return static_cast<std::int64_t>(pmf_.size());
      return std::nullopt;
    case Source::marginal: {
      const auto k = marginal_->rate().exactly_constant_after();
      if (k >= 0) return k;
      return std::nullopt;
    }
    case Source::hazard_rule:
      return std::nullopt;
  }
  return std::nullopt;
}

bool DiscreteDist::certifies_vanishing_hazard() const { return vanishing_hazard_; }

bool DiscreteDist::hazard_monotone() const {
  // nondecreasing service rates give a nondecreasing hazard, nonincreasing
  // rates a nonincreasing one; either way min(scan, limit) is the exact
  // infimum over all k
  if (source_ != Source::marginal) return false;
  return marginal_->rate().nondecreasing() || marginal_->rate().nonincreasing();
}

std::optional<std::int64_t> DiscreteDist::prefix_end() const {
  if (source_ == Source::pmf_prefix && !ratio_) {
    return static_cast<std::int64_t>(pmf_.size()) - 1;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Sequence calculus
// ---------------------------------------------------------------------------

std::vector<double> hazard_to_equilibrium(std::span<const double> h) {
  for (double v : h) {
    if (!(v > 0.0 && v < 1.0)) {
      throw std::invalid_argument("hazard_to_equilibrium: values must lie in (0,1)");
    }
  }
  std::vector<double> e(h.size(), 0.0);
  for (std::size_t k = 0; k + 1 < h.size(); ++k) {
    e[k + 1] = (h[k] / h[k + 1]) / (1.0 - h[k]);
  }
  return e;
}

std::vector<double> equilibrium_to_hazard(std::span<const double> e, double e_limit) {
  if (!(e_limit > 1.0)) {
    throw std::domain_error("tail series not summable with certified bound");
  }
  const std::int64_t L = static_cast<std::int64_t>(e.size());
  for (double v : e) {
    if (!(v > 0.0)) throw std::invalid_argument("equilibrium rates must be positive");
  }
  // S(k) = sum_{j>k} prod_{t=k+1..j} 1/e(t) satisfies S(k) = (1+S(k+1))/e(k+1);
  // beyond the span the rates are exactly e_limit, so S(L) = 1/(e_limit - 1)
  std::vector<double> h(static_cast<std::size_t>(L), 0.0);
  double s = 1.0 / (e_limit - 1.0);
  for (std::int64_t k = L - 1; k >= 0; --k) {
    s = (1.0 + s) / e[static_cast<std::size_t>(k)];
    h[static_cast<std::size_t>(k)] = 1.0 / (1.0 + s);
  }
  return h;
}

double total_hazard(const DiscreteDist& dist, double x) {
  if (x < 0.0) throw std::invalid_argument("total_hazard: x must be nonnegative");
  const auto top = static_cast<std::int64_t>(std::floor(x));
  double sum = 0.0;
  for (std::int64_t j = 0; j <= top; ++j) {
    sum += -std::log1p(-dist.hazard(j));
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Strong light tail verdict
// ---------------------------------------------------------------------------

TailReport strong_light_tail_check(const DiscreteDist& dist, std::int64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");

  TailReport report;
  report.horizon = horizon;
  report.equilibrium_tail_limit = dist.equilibrium_limit();
  report.hazard_tail_limit = dist.hazard_limit();

  std::int64_t scan_end = horizon;
  if (const auto pe = dist.prefix_end()) scan_end = std::min(scan_end, *pe);

  double inf_observed = 1.0;
  std::int64_t argmin = 0;
  for (std::int64_t k = 0; k <= scan_end; ++k) {
    const double h = dist.hazard(k);
    if (h < inf_observed) {
      inf_observed = h;
      argmin = k;
    }
  }
  report.inf_hazard_observed = inf_observed;
  report.argmin = argmin;

  if (dist.certifies_vanishing_hazard()) {
    report.verdict = TailVerdict::not_strongly_light;
    return report;
  }

  // certified infimum over all k: the scan must cover any non-monotone range
  // before the exact tail takes over
  const auto constant_from = dist.exact_constant_tail_from();
  const bool tail_certified =
      report.hazard_tail_limit &&
      ((constant_from && scan_end >= *constant_from) || dist.hazard_monotone());
  if (tail_certified) {
    const double inf_all = std::min(inf_observed, *report.hazard_tail_limit) * (1.0 - 1e-9);
    if (inf_all > 0.0) {
      report.verdict = TailVerdict::strongly_light;
      report.certified_infimum = inf_all;
      return report;
    }
  }

  report.verdict = TailVerdict::inconclusive;
  return report;
}

BirthDeathSpec bd_from_distribution(DiscreteDist dist, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("bd_from_distribution: lambda must be positive");
  return BirthDeathSpec{lambda, std::move(dist)};
}

std::string_view to_string(TailVerdict v) {
  switch (v) {
    case TailVerdict::strongly_light: return "strongly_light";
    case TailVerdict::not_strongly_light: return "not_strongly_light";
    case TailVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

}  // namespace qnet
