#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qnet/product_form.hpp"
#include "qnet/tail.hpp"

namespace qnet {

/// Birth-death gap lower bounds for constant birth rate lambda from the
/// comparison constants b, c (sum_{j>i} pi(j) <= b pi(i) and <= c pi(i) lambda).
struct LiggettBound {
  double bound_sqrt = 0.0;    // (sqrt(b+1) - sqrt(b))^2 / c
  double bound_simple = 0.0;  // 1 / (2c(1+2b))
};

LiggettBound liggett_bound(double b, double c);

/// lambda eps^2 / (2(1-eps)(2-eps)) for a uniform hazard lower bound eps.
/// eps is clamped to 1 - 1e-9 from above; clamped (when set) reports it.
double bd_gap_lower(double lambda, double eps, bool* clamped = nullptr);

/// eps = pi(0) = 1/C, certified as a uniform hazard lower bound only for
/// nondecreasing rate functions; throws std::domain_error otherwise.
double eps_from_pi0(const MarginalDistribution& marginal);

/// Gap of a product of independent processes = min of coordinate gaps.
double product_gap(std::span<const double> gaps);

struct DFactors {
  std::vector<double> d_i;
  double d = 1.0;  // product of d_i
};

/// d_i = max(lambda_i/mu_hi, mu_hi/lambda_i, lambda_i/mu_lo, mu_lo/lambda_i),
/// the one-step stationary ratio bound per coordinate.
DFactors compute_d(const NetworkSpec& spec, const TrafficVector& traffic);

struct NodeGapBound {
  int node = 0;
  double lambda = 0.0;
  double eps = 0.0;
  std::string eps_source;     // "pi0" or "hazard_scan"
  bool eps_clamped = false;
  double bound_simple = 0.0;  // lambda eps^2 / (2(1-eps)(2-eps))
  double bound_sqrt = 0.0;    // Liggett sqrt form with b=(1-eps)/eps, c=b/lambda
};

/// Replay of the final-bound formula from previously published intermediate
/// constants for the bundled two-node example. Not certified by this tool.
struct ReplayInputs {
  double printed_v1 = 60.0 / 61.0;
  double printed_q_ratio = 4.0 / 20.0;  // printed q_min / q_max
  double printed_min_bound = 0.7830;
};

struct ReplaySection {
  ReplayInputs inputs;
  double formula_v1 = 0.0;  // printed_q_ratio / (1 + d), from the printed extrema
  double value = 0.0;       // printed_v1^2 / (8 |Q|) * printed_min_bound^2
};

/// Every intermediate quantity of the network bound pipeline.
struct GapBoundReport {
  std::vector<double> traffic;
  std::vector<NodeGapBound> node_bounds;
  std::vector<double> d_i;
  double d = 1.0;
  double q_tilde_min = 0.0;    // min positive single-transition intensity
  double q_hat_max = 0.0;      // max single-transition intensity of coordinates
  double generator_norm = 0.0; // |Q| = lambda + sum mu_hi + max availability exit
  double v1 = 0.0;             // (q_tilde_min / q_hat_max) / (1 + d)
  double min_bd_bound = 0.0;
  double certified_bound = 0.0;  // v1^2 / (8 |Q|) * min_bd_bound^2
  bool availability_trivial = true;
  bool routing_reversible = false;
  bool hypotheses_met = false;
  std::vector<std::string> notes;
  std::optional<ReplaySection> replay;
};

/// Assembles the full analytic lower bound for the network gap. With
/// nontrivial availability and non-reversible routing the bound is still
/// emitted but flagged hypotheses_met = false.
GapBoundReport network_gap_lower(const NetworkSpec& spec, const TrafficVector& traffic,
                                 const ReplayInputs* replay = nullptr);

}  // namespace qnet
