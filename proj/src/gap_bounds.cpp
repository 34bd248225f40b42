#include "qnet/gap_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qnet {

LiggettBound liggett_bound(double b, double c) {
  if (!(b > 0.0) || !(c > 0.0)) {
    throw std::invalid_argument("liggett_bound: b and c must be positive");
  }
  LiggettBound out;
  out.bound_sqrt = std::pow(std::sqrt(b + 1.0) - std::sqrt(b), 2.0) / c;
  out.bound_simple = 1.0 / (2.0 * c * (1.0 + 2.0 * b));
  return out;
}

double bd_gap_lower(double lambda, double eps, bool* clamped) {
  if (!(lambda > 0.0)) throw std::invalid_argument("bd_gap_lower: lambda must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("bd_gap_lower: eps must be positive");
  const double cap = 1.0 - 1e-9;
  if (clamped) *clamped = eps > cap;
  eps = std::min(eps, cap);
  return lambda * eps * eps / (2.0 * (1.0 - eps) * (2.0 - eps));
}

double eps_from_pi0(const MarginalDistribution& marginal) {
  if (!marginal.rate().nondecreasing()) {
    throw std::domain_error("pi(0) not certified as hazard infimum");
  }
  return 1.0 / marginal.normalizer();
}

double product_gap(std::span<const double> gaps) {
  if (gaps.empty()) throw std::invalid_argument("product_gap: empty list");
  return *std::min_element(gaps.begin(), gaps.end());
}

DFactors compute_d(const NetworkSpec& spec, const TrafficVector& traffic) {
  DFactors out;
  out.d_i.reserve(spec.nodes());
  out.d = 1.0;
  for (int i = 1; i <= spec.nodes(); ++i) {
    const double lam = traffic[i];
    const double hi = spec.services[i - 1].sup();
    const double lo = spec.services[i - 1].inf();
    const double di = std::max({lam / hi, hi / lam, lam / lo, lo / lam});
    out.d_i.push_back(di);
    out.d *= di;
  }
  return out;
}

namespace {

// smallest positive single-transition intensity of the network generator,
// scanned over usable down sets
double scan_q_tilde_min(const NetworkSpec& spec) {
  double q_min = std::numeric_limits<double>::infinity();
  auto feed = [&](double v) {
    if (v > 0.0) q_min = std::min(q_min, v);
  };

  const int m = spec.nodes();
  const auto& avail = spec.availability;
  for (DownSet d : avail.usable_sets()) {
    const RoutingMatrix r = spec.routing.modified(d);
    for (int j = 1; j <= m; ++j) {
      if (!down_contains(d, j)) feed(spec.arrival_rate * r(0, j));
    }
    for (int i = 1; i <= m; ++i) {
      if (down_contains(d, i)) continue;
      const double lo = spec.services[i - 1].inf();
      feed(lo * r(i, 0));
      for (int j = 1; j <= m; ++j) {
        if (j == i || down_contains(d, j)) continue;
        feed(lo * r(i, j));
      }
    }
    for (DownSet d2 : avail.usable_sets()) {
      if ((d & d2) == d && d2 != d) feed(avail.breakdown_rate(d, d2));
      if ((d & d2) == d2 && d2 != d) feed(avail.repair_rate(d, d2));
    }
  }
  return q_min;
}

// largest single-transition intensity of the coordinate processes: births
// lambda_i, deaths up to sup mu_i, and the availability moves
double scan_q_hat_max(const NetworkSpec& spec, const TrafficVector& traffic) {
  double q_max = 0.0;
  for (int i = 1; i <= spec.nodes(); ++i) {
    q_max = std::max({q_max, traffic[i], spec.services[i - 1].sup()});
  }
  const auto& avail = spec.availability;
  for (DownSet d : avail.usable_sets()) {
    for (DownSet d2 : avail.usable_sets()) {
      if ((d & d2) == d && d2 != d) q_max = std::max(q_max, avail.breakdown_rate(d, d2));
      if ((d & d2) == d2 && d2 != d) q_max = std::max(q_max, avail.repair_rate(d, d2));
    }
  }
  return q_max;
}

// |Q| = lambda + sum_i sup mu_i + max_D (total breakdown + repair exit)
double generator_norm_bound(const NetworkSpec& spec) {
  double norm = spec.arrival_rate;
  for (const auto& s : spec.services) norm += s.sup();
  const auto& avail = spec.availability;
  double worst = 0.0;
  for (DownSet d : avail.usable_sets()) {
    double exit = 0.0;
    for (DownSet d2 : avail.usable_sets()) {
      if ((d & d2) == d && d2 != d) exit += avail.breakdown_rate(d, d2);
      if ((d & d2) == d2 && d2 != d) exit += avail.repair_rate(d, d2);
    }
    worst = std::max(worst, exit);
  }
  return norm + worst;
}

}  // namespace

GapBoundReport network_gap_lower(const NetworkSpec& spec, const TrafficVector& traffic,
                                 const ReplayInputs* replay) {
  GapBoundReport report;
  report.traffic = traffic.rates;

  for (const auto& verdict : ergodicity_check(spec, traffic)) {
    if (!verdict.ergodic) {
      throw NonErgodicError("non-ergodic node " + std::to_string(verdict.node));
    }
  }

  const DFactors d = compute_d(spec, traffic);
  report.d_i = d.d_i;
  report.d = d.d;

  report.q_tilde_min = scan_q_tilde_min(spec);
  report.q_hat_max = scan_q_hat_max(spec, traffic);
  report.generator_norm = generator_norm_bound(spec);
  report.v1 = (report.q_tilde_min / report.q_hat_max) / (d.d + 1.0);

  report.availability_trivial = spec.availability.trivial();
  report.routing_reversible = check_routing_reversible(spec, traffic).reversible;
  report.hypotheses_met = report.availability_trivial || report.routing_reversible;
  if (!report.hypotheses_met) {
    report.notes.push_back(
        "hypothesis unmet: nontrivial availability requires reversible routing");
  }
  report.notes.push_back(
      "q_tilde_min/q_hat_max are extrema over single-transition intensities");

  double min_bound = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= spec.nodes(); ++i) {
    NodeGapBound nb;
    nb.node = i;
    nb.lambda = traffic[i];
    MarginalDistribution marginal(traffic[i], spec.services[i - 1]);
    if (spec.services[i - 1].nondecreasing()) {
      nb.eps = eps_from_pi0(marginal);
      nb.eps_source = "pi0";
    } else {
      // certified hazard infimum: scan past any non-monotone range, then the
      // exact tail limit takes over
      const auto report_i =
          strong_light_tail_check(DiscreteDist::from_marginal(marginal),
                                  std::max<std::int64_t>(
                                      512, spec.services[i - 1].exactly_constant_after() + 1));
      if (!report_i.certified_infimum) {
        throw std::domain_error("no certified hazard infimum for node " + std::to_string(i));
      }
      nb.eps = *report_i.certified_infimum;
      nb.eps_source = "hazard_scan";
    }
    nb.bound_simple = bd_gap_lower(nb.lambda, nb.eps, &nb.eps_clamped);
    const double b = (1.0 - std::min(nb.eps, 1.0 - 1e-9)) / std::min(nb.eps, 1.0 - 1e-9);
    nb.bound_sqrt = liggett_bound(b, b / nb.lambda).bound_sqrt;
    min_bound = std::min(min_bound, nb.bound_simple);
    report.node_bounds.push_back(std::move(nb));
  }
  report.min_bd_bound = min_bound;
  report.certified_bound =
      report.v1 * report.v1 / (8.0 * report.generator_norm) * min_bound * min_bound;

  if (replay) {
    ReplaySection rs;
    rs.inputs = *replay;
    rs.formula_v1 = replay->printed_q_ratio / (1.0 + d.d);
    rs.value = replay->printed_v1 * replay->printed_v1 / (8.0 * report.generator_norm) *
               replay->printed_min_bound * replay->printed_min_bound;
    report.replay = rs;
    report.notes.push_back("replay section reproduces published arithmetic; not certified");
  }
  return report;
}

}  // namespace qnet
