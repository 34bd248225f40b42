#include "qnet/report.hpp"

#include <cmath>
#include <sstream>

namespace qnet {

namespace {

OrderedJson method_tag(const char* method, double tolerance) {
  return OrderedJson{{"method", method}, {"tolerance", tolerance}};
}

}  // namespace

OrderedJson gap_bound_report_to_json(const GapBoundReport& report) {
  OrderedJson doc;
  doc["meta"] = method_tag("analytic", 1e-12);
  doc["traffic"] = report.traffic;
  OrderedJson nodes = OrderedJson::array();
  for (const auto& nb : report.node_bounds) {
    nodes.push_back(OrderedJson{{"node", nb.node},
                                {"lambda", nb.lambda},
                                {"eps", nb.eps},
                                {"eps_source", nb.eps_source},
                                {"eps_clamped", nb.eps_clamped},
                                {"bound_simple", nb.bound_simple},
                                {"bound_sqrt", nb.bound_sqrt}});
  }
  doc["node_bounds"] = nodes;
  doc["d_i"] = report.d_i;
  doc["d"] = report.d;
  doc["q_tilde_min"] = report.q_tilde_min;
  doc["q_hat_max"] = report.q_hat_max;
  doc["generator_norm"] = report.generator_norm;
  doc["v1"] = report.v1;
  doc["min_bd_bound"] = report.min_bd_bound;
  doc["certified_bound"] = report.certified_bound;
  doc["availability_trivial"] = report.availability_trivial;
  doc["routing_reversible"] = report.routing_reversible;
  doc["hypotheses_met"] = report.hypotheses_met;
  doc["notes"] = report.notes;
  if (report.replay) {
    const auto& r = *report.replay;
    doc["replay"] = OrderedJson{{"certified", false},
                                {"printed_v1", r.inputs.printed_v1},
                                {"printed_q_ratio", r.inputs.printed_q_ratio},
                                {"printed_min_bound", r.inputs.printed_min_bound},
                                {"formula_v1_from_printed_ratio", r.formula_v1},
                                {"value", r.value}};
  }
  return doc;
}

OrderedJson spectral_result_to_json(const SpectralResult& result,
                                    std::optional<double> halved_gap) {
  OrderedJson doc;
  doc["meta"] = method_tag("truncated-numeric", 1e-9);
  doc["gap"] = result.gap;
  doc["method"] = result.method;
  doc["truncation"] = result.truncation;
  doc["zero_eigenvalue"] = result.zero_eigenvalue;
  doc["detailed_balance_residual"] = result.detailed_balance_residual;
  if (result.iterations > 0) doc["iterations"] = result.iterations;
  if (halved_gap) {
    doc["convergence"] = OrderedJson{
        {"gap_at_half_truncation", *halved_gap},
        {"doubling_difference", std::abs(result.gap - *halved_gap)},
        {"note", "difference between half and full truncation; shrinks as the box grows"}};
  }
  return doc;
}

OrderedJson tail_report_to_json(const TailReport& report) {
  OrderedJson doc;
  doc["meta"] = method_tag("analytic", 1e-10);
  doc["horizon"] = report.horizon;
  doc["inf_hazard_observed"] = report.inf_hazard_observed;
  doc["argmin"] = report.argmin;
  doc["hazard_tail_limit"] =
      report.hazard_tail_limit ? OrderedJson(*report.hazard_tail_limit) : OrderedJson();
  doc["equilibrium_tail_limit"] = report.equilibrium_tail_limit
                                      ? OrderedJson(*report.equilibrium_tail_limit)
                                      : OrderedJson();
  doc["certified_infimum"] =
      report.certified_infimum ? OrderedJson(*report.certified_infimum) : OrderedJson();
  doc["verdict"] = std::string(to_string(report.verdict));
  return doc;
}

OrderedJson decay_estimate_to_json(const DecayEstimate& estimate) {
  OrderedJson doc;
  doc["meta"] = method_tag("simulated", 0.0);
  doc["reps"] = estimate.reps;
  doc["noise_floor"] = estimate.noise_floor;
  doc["reference_omitted_mass"] = estimate.reference_omitted_mass;
  OrderedJson series = OrderedJson::array();
  for (std::size_t i = 0; i < estimate.t.size(); ++i) {
    series.push_back(OrderedJson{{"t", estimate.t[i]}, {"tv", estimate.tv[i]}});
  }
  doc["tv_series"] = series;
  if (estimate.alpha) {
    doc["alpha"] = *estimate.alpha;
    doc["fit"] = OrderedJson{{"begin", estimate.fit_begin},
                             {"end", estimate.fit_end},
                             {"r_squared", estimate.r_squared}};
  } else {
    doc["alpha"] = OrderedJson();
    doc["fit"] = OrderedJson();
  }
  return doc;
}

AnalyzeOutcome analyze_network(const NetworkSpec& spec, const AnalyzeOptions& options,
                               const std::string& input_digest) {
  AnalyzeOutcome outcome;
  auto& doc = outcome.report;
  doc["tool_version"] = kToolVersion;
  doc["input_digest"] = input_digest;

  const ValidationReport validation = validate_spec(spec);
  doc["validation"] = OrderedJson{{"ok", validation.ok()},
                                  {"violations", validation.violations}};
  if (!validation.ok()) {
    outcome.exit_code = kInvalidSpec;
    outcome.summary = "spec invalid: " + std::to_string(validation.violations.size()) +
                      " violation(s)";
    return outcome;
  }

  const TrafficVector traffic = solve_traffic(spec);
  doc["traffic"] = OrderedJson{{"meta", method_tag("analytic", 1e-10)},
                               {"rates", traffic.rates}};

  const auto verdicts = ergodicity_check(spec, traffic);
  OrderedJson ergodic = OrderedJson::array();
  bool all_ergodic = true;
  for (const auto& v : verdicts) {
    ergodic.push_back(OrderedJson{
        {"node", v.node}, {"tail_ratio", v.tail_ratio}, {"ergodic", v.ergodic}});
    all_ergodic = all_ergodic && v.ergodic;
  }
  doc["ergodicity"] = OrderedJson{{"meta", method_tag("analytic", 0.0)},
                                  {"nodes", ergodic},
                                  {"ergodic", all_ergodic}};
  if (!all_ergodic) {
    outcome.exit_code = kNonErgodic;
    outcome.summary = "network is not ergodic (tail_ratio >= 1 at some node)";
    return outcome;
  }

  const ReversibilityCheck reversibility = check_routing_reversible(spec, traffic);
  doc["routing"] = OrderedJson{{"meta", method_tag("analytic", 1e-10)},
                               {"reversible", reversibility.reversible},
                               {"max_violation", reversibility.max_violation},
                               {"regular", check_regular(spec.routing)}};

  OrderedJson tails = OrderedJson::array();
  for (int i = 1; i <= spec.nodes(); ++i) {
    MarginalDistribution marginal(traffic[i], spec.services[i - 1]);
    const TailReport tr =
        strong_light_tail_check(DiscreteDist::from_marginal(marginal), options.horizon);
    OrderedJson entry = tail_report_to_json(tr);
    entry["node"] = i;
    tails.push_back(entry);
  }
  doc["tails"] = tails;

  const GapBoundReport bounds = network_gap_lower(
      spec, traffic, options.replay ? &options.replay_inputs : nullptr);
  doc["gap_bounds"] = gap_bound_report_to_json(bounds);

  std::ostringstream summary;
  summary << "nodes=" << spec.nodes() << " traffic=[";
  for (std::size_t i = 0; i < traffic.rates.size(); ++i) {
    summary << (i ? "," : "") << traffic.rates[i];
  }
  summary << "] certified_bound=" << bounds.certified_bound
          << (bounds.hypotheses_met ? "" : " (hypotheses unmet)");
  outcome.summary = summary.str();
  return outcome;
}

}  // namespace qnet
