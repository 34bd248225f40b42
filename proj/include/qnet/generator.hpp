#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qnet/network.hpp"
#include "qnet/tail.hpp"

namespace qnet {

/// Bijection between network states (D, n_1..n_m), n_i <= box, and 0..S-1.
/// State id = down_index * (box+1)^m + sum_i n_i (box+1)^(i-1).
struct NetworkStateSpace {
  int m = 0;
  std::int64_t box = 0;
  std::vector<DownSet> down_sets;

  std::int64_t queue_states() const;
  std::int64_t states() const;
  std::int64_t index(int down_index, std::span<const std::int64_t> n) const;
  void decode(std::int64_t id, int& down_index, std::vector<std::int64_t>& n) const;
  int down_index_of(DownSet d) const;
};

/// Explicit rate matrix on a finite box with reflecting truncation
/// (transitions leaving the box are dropped). Row sums are exactly zero.
class TruncatedGenerator {
 public:
  static constexpr std::int64_t kMaxStates = 200000;

  /// All five transition families under RS-RD routing per current down set.
  static TruncatedGenerator network(const NetworkSpec& spec, std::int64_t box);

  /// Tridiagonal birth-death generator: birth lambda for n < box, death
  /// mu(n) for n >= 1.
  static TruncatedGenerator birth_death(double birth, const RateFunction& death,
                                        std::int64_t box);
  static TruncatedGenerator birth_death(double birth, std::span<const double> death,
                                        std::int64_t box);
  static TruncatedGenerator birth_death(const BirthDeathSpec& bd, std::int64_t box);

  /// Generic chain from off-diagonal triplets (row, col, rate).
  static TruncatedGenerator from_triplets(
      std::int64_t size, const std::vector<Eigen::Triplet<double>>& offdiag);

  std::int64_t size() const { return matrix_.rows(); }
  /// Off-diagonal entries q(x,y) >= 0, diagonal -sum.
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix() const { return matrix_; }
  double max_exit_rate() const { return max_exit_; }
  std::int64_t truncation() const { return truncation_; }

  const std::optional<NetworkStateSpace>& layout() const { return layout_; }

  /// Coordinate-triplet text, one "row col rate" per off-diagonal entry.
  void export_triplets(std::ostream& os) const;

 private:
  TruncatedGenerator() = default;

  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix_;
  double max_exit_ = 0.0;
  std::int64_t truncation_ = 0;
  std::optional<NetworkStateSpace> layout_;
};

/// Solves pi Q = 0, sum pi = 1 (sparse LU); residual inf-norm < 1e-11.
Eigen::VectorXd stationary_of(const TruncatedGenerator& gen);

struct SpectralResult {
  double gap = 0.0;
  Eigen::VectorXd stationary;
  double detailed_balance_residual = 0.0;
  std::string method;  // "symmetric_eigensolve" (dense) or "lanczos"
  std::int64_t truncation = 0;
  double zero_eigenvalue = 0.0;  // smallest eigenvalue, must be ~0
  int iterations = 0;
  Eigen::VectorXd gap_vector;  // eigenvector of the gap eigenvalue (sqrt(pi) scale)
};

/// Spectral gap of the pi-symmetrized generator: second-smallest eigenvalue
/// of S = Pi^{1/2} (-(Q+Q*)/2) Pi^{-1/2} with Q* the pi-adjoint. Dense
/// symmetric solve below 3000 states, deflated Lanczos above.
SpectralResult numeric_gap(const TruncatedGenerator& gen,
                           const Eigen::VectorXd* pi = nullptr);

/// max |pi(x)q(x,y) - pi(y)q(y,x)| over edges, normalized by the largest flow.
double detailed_balance_check(const TruncatedGenerator& gen, const Eigen::VectorXd& pi);

struct CheegerResult {
  double kappa = 0.0;
  std::vector<std::int64_t> min_set;
  std::int64_t states = 0;
  bool exact = false;
};

/// kappa = min over proper subsets A of pi-flow(A, A^c) / (pi(A) pi(A^c)).
/// Exact subset enumeration up to `cap` states, sweep-cut heuristic above.
CheegerResult cheeger_exact(const TruncatedGenerator& gen, const Eigen::VectorXd& pi,
                            std::int64_t cap = 20);

}  // namespace qnet
