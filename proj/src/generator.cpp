#include "qnet/generator.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace qnet {

// ---------------------------------------------------------------------------
// NetworkStateSpace
// ---------------------------------------------------------------------------

std::int64_t NetworkStateSpace::queue_states() const {
  std::int64_t s = 1;
  for (int i = 0; i < m; ++i) s *= box + 1;
  return s;
}

std::int64_t NetworkStateSpace::states() const {
  return static_cast<std::int64_t>(down_sets.size()) * queue_states();
}

std::int64_t NetworkStateSpace::index(int down_index, std::span<const std::int64_t> n) const {
  std::int64_t id = 0;
  for (int i = m - 1; i >= 0; --i) id = id * (box + 1) + n[i];
  return static_cast<std::int64_t>(down_index) * queue_states() + id;
}

void NetworkStateSpace::decode(std::int64_t id, int& down_index,
                               std::vector<std::int64_t>& n) const {
  const std::int64_t q = queue_states();
  down_index = static_cast<int>(id / q);
  std::int64_t rest = id % q;
  n.resize(m);
  for (int i = 0; i < m; ++i) {
    n[i] = rest % (box + 1);
    rest /= box + 1;
  }
}

int NetworkStateSpace::down_index_of(DownSet d) const {
  const auto it = std::lower_bound(down_sets.begin(), down_sets.end(), d);
  if (it == down_sets.end() || *it != d) return -1;
  return static_cast<int>(it - down_sets.begin());
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

TruncatedGenerator TruncatedGenerator::from_triplets(
    std::int64_t size, const std::vector<Eigen::Triplet<double>>& offdiag) {
  TruncatedGenerator gen;
  std::vector<Eigen::Triplet<double>> all = offdiag;
  std::vector<double> exit(static_cast<std::size_t>(size), 0.0);
  for (const auto& t : offdiag) {
    if (t.row() == t.col()) throw std::invalid_argument("diagonal entries are derived");
    if (t.value() < 0.0) throw std::invalid_argument("rates must be nonnegative");
    exit[static_cast<std::size_t>(t.row())] += t.value();
  }
  for (std::int64_t x = 0; x < size; ++x) {
    all.emplace_back(x, x, -exit[static_cast<std::size_t>(x)]);
  }
  gen.matrix_.resize(size, size);
  gen.matrix_.setFromTriplets(all.begin(), all.end());
  gen.max_exit_ = exit.empty() ? 0.0 : *std::max_element(exit.begin(), exit.end());
  return gen;
}

TruncatedGenerator TruncatedGenerator::network(const NetworkSpec& spec, std::int64_t box) {
  if (box < 1) throw std::invalid_argument("box must be >= 1");
  NetworkStateSpace space;
  space.m = spec.nodes();
  space.box = box;
  space.down_sets = spec.availability.usable_sets();
  if (space.states() > kMaxStates) {
    throw std::invalid_argument("state-space size exceeded (" +
                                std::to_string(space.states()) + " states)");
  }

  const int m = space.m;
  const auto& avail = spec.availability;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(space.states()) * (m * (m + 1) + 4));

  std::vector<std::int64_t> n(m);
  std::vector<std::int64_t> to(m);
  for (std::int64_t id = 0; id < space.states(); ++id) {
    int d_idx = 0;
    space.decode(id, d_idx, n);
    const DownSet down = space.down_sets[static_cast<std::size_t>(d_idx)];
    const RoutingMatrix routing = spec.routing.modified(down);

    auto add = [&](std::int64_t target, double rate) {
      if (rate > 0.0) trip.emplace_back(id, target, rate);
    };

    // external arrivals
    for (int j = 1; j <= m; ++j) {
      if (down_contains(down, j) || n[j - 1] >= box) continue;
      to = n;
      ++to[j - 1];
      add(space.index(d_idx, to), spec.arrival_rate * routing(0, j));
    }
    // service completions: migrations and departures
    for (int i = 1; i <= m; ++i) {
      if (down_contains(down, i) || n[i - 1] == 0) continue;
      const double mu = spec.services[i - 1](n[i - 1]);
      to = n;
      --to[i - 1];
      add(space.index(d_idx, to), mu * routing(i, 0));
      for (int j = 1; j <= m; ++j) {
        if (j == i || down_contains(down, j) || n[j - 1] >= box) continue;
        to = n;
        --to[i - 1];
        ++to[j - 1];
        add(space.index(d_idx, to), mu * routing(i, j));
      }
    }
    // breakdowns and repairs
    for (std::size_t k = 0; k < space.down_sets.size(); ++k) {
      const DownSet other = space.down_sets[k];
      if (other == down) continue;
      const std::int64_t target = space.index(static_cast<int>(k), n);
      if ((down & other) == down) add(target, avail.breakdown_rate(down, other));
      if ((down & other) == other) add(target, avail.repair_rate(down, other));
    }
  }

  TruncatedGenerator gen = from_triplets(space.states(), trip);
  gen.truncation_ = box;
  gen.layout_ = std::move(space);
  return gen;
}

TruncatedGenerator TruncatedGenerator::birth_death(double birth, const RateFunction& death,
                                                   std::int64_t box) {
  std::vector<double> mu(static_cast<std::size_t>(box));
  for (std::int64_t k = 1; k <= box; ++k) mu[static_cast<std::size_t>(k - 1)] = death(k);
  return birth_death(birth, mu, box);
}

TruncatedGenerator TruncatedGenerator::birth_death(double birth,
                                                   std::span<const double> death,
                                                   std::int64_t box) {
  if (box < 1) throw std::invalid_argument("box must be >= 1");
  if (static_cast<std::int64_t>(death.size()) < box) {
    throw std::invalid_argument("need death rates mu(1..box)");
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(2 * box));
  for (std::int64_t k = 0; k < box; ++k) trip.emplace_back(k, k + 1, birth);
  for (std::int64_t k = 1; k <= box; ++k) {
    trip.emplace_back(k, k - 1, death[static_cast<std::size_t>(k - 1)]);
  }
  TruncatedGenerator gen = from_triplets(box + 1, trip);
  gen.truncation_ = box;
  return gen;
}

TruncatedGenerator TruncatedGenerator::birth_death(const BirthDeathSpec& bd,
                                                   std::int64_t box) {
  std::vector<double> mu(static_cast<std::size_t>(box));
  for (std::int64_t k = 1; k <= box; ++k) mu[static_cast<std::size_t>(k - 1)] = bd.death(k);
  return birth_death(bd.birth, mu, box);
}

void TruncatedGenerator::export_triplets(std::ostream& os) const {
  for (int k = 0; k < matrix_.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(matrix_, k); it;
         ++it) {
      if (it.row() == it.col()) continue;
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Stationary vector and reversibility
// ---------------------------------------------------------------------------

Eigen::VectorXd stationary_of(const TruncatedGenerator& gen) {
  const std::int64_t s = gen.size();
  // solve Q^T x = 0 with the normalization sum x = 1 replacing one equation
  Eigen::SparseMatrix<double> a = Eigen::SparseMatrix<double>(gen.matrix().transpose());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(a.nonZeros() + static_cast<std::size_t>(s));
  for (int k = 0; k < a.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
      if (it.row() == s - 1) continue;
      trip.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (std::int64_t j = 0; j < s; ++j) trip.emplace_back(s - 1, j, 1.0);
  Eigen::SparseMatrix<double> sys(s, s);
  sys.setFromTriplets(trip.begin(), trip.end());
  sys.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(sys);
  lu.factorize(sys);
  if (lu.info() != Eigen::Success) {
    throw std::runtime_error("stationary_of: factorization failed (reducible chain?)");
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s);
  rhs(s - 1) = 1.0;
  Eigen::VectorXd pi = lu.solve(rhs);

  // one step of iterative refinement on the full system
  Eigen::VectorXd r = -(sys * pi - rhs);
  pi += lu.solve(r);

  const double min_pi = pi.minCoeff();
  if (min_pi <= 0.0) {
    throw std::runtime_error("stationary_of: nonpositive entry (reducible chain?)");
  }
  pi /= pi.sum();

  const double residual = (Eigen::RowVectorXd(pi.transpose()) * gen.matrix())
                              .cwiseAbs()
                              .maxCoeff();
  if (residual > 1e-11 * std::max(1.0, gen.max_exit_rate())) {
    throw std::runtime_error("stationary_of: residual too large");
  }
  return pi;
}

double detailed_balance_check(const TruncatedGenerator& gen, const Eigen::VectorXd& pi) {
  const auto& q = gen.matrix();
  double worst = 0.0;
  double scale = 0.0;
  // every stored directed edge; one-directional edges must be caught too
  for (int k = 0; k < q.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(q, k); it; ++it) {
      const auto x = it.row(), y = it.col();
      if (x == y) continue;
      const double fwd = pi(x) * it.value();
      const double bwd = pi(y) * q.coeff(y, x);
      worst = std::max(worst, std::abs(fwd - bwd));
      scale = std::max({scale, fwd, bwd});
    }
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

}  // namespace qnet
