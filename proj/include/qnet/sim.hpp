#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qnet/generator.hpp"
#include "qnet/network.hpp"
#include "qnet/product_form.hpp"
#include "qnet/tail.hpp"

namespace qnet {

/// Counter-based replication streams: stream i is seeded by
/// splitmix64(master ^ splitmix64(i)), each stream an independent
/// xoshiro256++ generator. Exponentials via -log(U), U in (0,1].
class RngStream {
 public:
  RngStream(std::uint64_t master, std::uint64_t stream);
  double uniform();      // (0, 1]
  double exponential(double rate);
  std::uint64_t next();

 private:
  std::uint64_t s_[4];
};

/// Network state: down set plus queue lengths.
struct NetState {
  DownSet down = 0;
  std::vector<std::int64_t> n;

  bool operator==(const NetState&) const = default;
};

struct NetworkTarget {
  NetworkSpec spec;
  NetState x0;
};

struct BirthDeathTarget {
  BirthDeathSpec bd;
  std::int64_t x0 = 0;
};

/// Explicit finite chain; x0 is a state index.
struct ChainTarget {
  TruncatedGenerator gen;
  std::int64_t x0 = 0;
};

using SimTarget = std::variant<NetworkTarget, BirthDeathTarget, ChainTarget>;

struct SimConfig {
  SimTarget target;
  std::vector<double> grid;  // strictly increasing observation times
  std::int64_t reps = 1;
  std::uint64_t seed = 0;
  int threads = 1;  // replications are independent; counts merge exactly
};

struct PathPoint {
  double t = 0.0;
  NetState state;  // BD/chain targets use n = {k}
};

/// Single trajectory of competing exponential clocks; deterministic given
/// the seed. Records the state after every jump up to the horizon.
std::vector<PathPoint> simulate_path(const SimTarget& target, double horizon,
                                     std::uint64_t seed);

struct DecayEstimate {
  std::vector<double> t;
  std::vector<double> tv;  // TV upper estimate per grid point
  double noise_floor = 0.0;
  std::optional<double> alpha;  // fitted exponential rate
  int fit_begin = 0;            // window [fit_begin, fit_end) into t when alpha set
  int fit_end = 0;
  double r_squared = 0.0;
  std::int64_t reps = 0;
  double reference_omitted_mass = 0.0;
};

/// TV(t) = 0.5 sum_box |empirical - pi| + 0.5 (mass outside box on either
/// side); alpha from least squares on log TV over the longest suffix of
/// above-floor points with >= 4 points and R^2 >= 0.9.
DecayEstimate estimate_tv_decay(const SimConfig& config);

struct MarginalCheckResult {
  std::vector<double> tv;  // per node at the final grid time
  double band = 0.0;       // sqrt(log(2/delta) / (2R)), delta = 0.01
};

/// Empirical per-node marginals at the last grid point against the
/// product-form marginals (network targets only).
MarginalCheckResult marginal_check(const SimConfig& config);

}  // namespace qnet
