#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qnet/routing.hpp"

namespace qnet {

struct AvailabilityEntry {
  DownSet down = 0;
  double psi = 0.0;
  double phi = 0.0;
};

/// Breakdown/repair weights psi, phi over subsets of {1..m}. A subset D is
/// usable iff psi(D) > 0 and phi(D) > 0; subsets with psi*phi = 0 are removed
/// from the state space rather than kept with zero rates. Breakdowns D -> D∪I
/// run at psi(D∪I)/psi(D), repairs D -> D\H at phi(D)/phi(D\H).
class AvailabilityModel {
 public:
  /// Reliable network: only the empty set, psi = phi = 1.
  AvailabilityModel();
  explicit AvailabilityModel(std::vector<AvailabilityEntry> entries);

  double psi(DownSet d) const;
  double phi(DownSet d) const;
  bool usable(DownSet d) const { return psi(d) > 0.0 && phi(d) > 0.0; }

  /// Usable subsets in increasing mask order; the empty set is first when
  /// the model is valid.
  const std::vector<DownSet>& usable_sets() const { return usable_; }

  /// True when the empty set is the only usable subset.
  bool trivial() const { return usable_.size() == 1 && usable_[0] == 0; }

  double breakdown_rate(DownSet from, DownSet to) const;  // to ⊋ from
  double repair_rate(DownSet from, DownSet to) const;     // to ⊊ from

  /// Closure (no positive-rate move leaves the usable family) and strong
  /// connectivity of the usable family under single breakdown/repair moves.
  void append_violations(std::vector<std::string>& out, int m) const;

  const std::vector<AvailabilityEntry>& entries() const { return entries_; }

 private:
  std::vector<AvailabilityEntry> entries_;
  std::vector<DownSet> usable_;
};

}  // namespace qnet
