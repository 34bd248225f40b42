#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace qnet {

/// Subset of the internal nodes {1..m}, bit i-1 <=> node i.
using DownSet = std::uint32_t;

inline bool down_contains(DownSet d, int node) { return (d >> (node - 1)) & 1u; }

/// Routing over the extended node set {0,1,..,m} where index 0 is the
/// outside. Row 0 holds the external arrival split r_{0j} (may sum to r <= 1;
/// the deficit is arrival mass that never enters), rows 1..m are stochastic.
/// Diagonal entries are allowed.
class RoutingMatrix {
 public:
  explicit RoutingMatrix(Eigen::MatrixXd entries);

  /// Number of internal nodes m.
  int nodes() const { return static_cast<int>(entries_.rows()) - 1; }

  double operator()(int i, int j) const { return entries_(i, j); }
  const Eigen::MatrixXd& matrix() const { return entries_; }

  double row_sum(int i) const { return entries_.row(i).sum(); }
  /// r = sum_j r_{0j}.
  double external_total() const { return entries_.row(0).sum(); }

  /// RS-RD blocking: entries between up nodes are kept, mass toward down
  /// nodes is folded into the diagonal of each up row, rows and columns of
  /// down nodes are zeroed (so external arrivals to down nodes vanish).
  RoutingMatrix modified(DownSet down) const;

  void append_violations(std::vector<std::string>& out) const;

 private:
  Eigen::MatrixXd entries_;
};

/// True iff the directed graph of positive entries on {0..m} is strongly
/// connected and aperiodic (structural primitivity; no matrix powers).
bool check_regular(const RoutingMatrix& routing);

}  // namespace qnet
