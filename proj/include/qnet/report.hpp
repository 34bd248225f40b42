#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qnet/gap_bounds.hpp"
#include "qnet/generator.hpp"
#include "qnet/json_io.hpp"
#include "qnet/sim.hpp"

namespace qnet {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes of the CLI: 0 ok, 2 validation failure, 3 non-ergodic.
enum ExitCode : int { kOk = 0, kInvalidSpec = 2, kNonErgodic = 3 };

struct AnalyzeOptions {
  std::int64_t horizon = 512;
  bool replay = false;
  ReplayInputs replay_inputs;
};

struct AnalyzeOutcome {
  int exit_code = kOk;
  OrderedJson report;
  std::string summary;  // one-paragraph human text for stderr
};

/// validate -> traffic -> ergodicity -> reversibility/regularity -> tails ->
/// bounds. Every numeric block carries a method tag (analytic |
/// truncated-numeric | simulated) and its tolerance.
AnalyzeOutcome analyze_network(const NetworkSpec& spec, const AnalyzeOptions& options,
                               const std::string& input_digest);

OrderedJson gap_bound_report_to_json(const GapBoundReport& report);
OrderedJson spectral_result_to_json(const SpectralResult& result,
                                    std::optional<double> halved_gap);
OrderedJson tail_report_to_json(const TailReport& report);
OrderedJson decay_estimate_to_json(const DecayEstimate& estimate);

}  // namespace qnet
