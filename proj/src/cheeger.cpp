#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qnet/generator.hpp"

namespace qnet {

namespace {

struct Edge {
  std::int64_t peer = 0;
  double flow = 0.0;  // pi(x) q(x,y) of the directed edge
};

struct FlowGraph {
  std::vector<std::vector<Edge>> out;  // edges leaving x
  std::vector<std::vector<Edge>> in;   // edges entering x
};

FlowGraph flow_graph(const TruncatedGenerator& gen, const Eigen::VectorXd& pi) {
  FlowGraph g;
  g.out.resize(static_cast<std::size_t>(gen.size()));
  g.in.resize(static_cast<std::size_t>(gen.size()));
  const auto& q = gen.matrix();
  for (int k = 0; k < q.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(q, k); it; ++it) {
      if (it.row() == it.col() || it.value() <= 0.0) continue;
      const double flow = pi(it.row()) * it.value();
      g.out[static_cast<std::size_t>(it.row())].push_back(Edge{it.col(), flow});
      g.in[static_cast<std::size_t>(it.col())].push_back(Edge{it.row(), flow});
    }
  }
  return g;
}

double kappa_of(double flow, double mass) {
  return flow / (mass * (1.0 - mass));
}

}  // namespace

CheegerResult cheeger_exact(const TruncatedGenerator& gen, const Eigen::VectorXd& pi,
                            std::int64_t cap) {
  const std::int64_t s = gen.size();
  if (s < 2) throw std::invalid_argument("cheeger: need at least two states");
  CheegerResult result;
  result.states = s;
  const FlowGraph g = flow_graph(gen, pi);

  std::vector<char> in_a(static_cast<std::size_t>(s), 0);
  double mass = 0.0;
  double flow = 0.0;  // pi-flow from A to A^c

  // moves v across the boundary, updating flow in O(deg(v))
  auto toggle = [&](std::int64_t v) {
    const auto vi = static_cast<std::size_t>(v);
    if (!in_a[vi]) {
      in_a[vi] = 1;
      mass += pi(v);
      for (const auto& e : g.out[vi]) {
        if (!in_a[static_cast<std::size_t>(e.peer)]) flow += e.flow;
      }
      for (const auto& e : g.in[vi]) {
        if (in_a[static_cast<std::size_t>(e.peer)]) flow -= e.flow;
      }
    } else {
      in_a[vi] = 0;
      mass -= pi(v);
      for (const auto& e : g.out[vi]) {
        if (!in_a[static_cast<std::size_t>(e.peer)]) flow -= e.flow;
      }
      for (const auto& e : g.in[vi]) {
        if (in_a[static_cast<std::size_t>(e.peer)]) flow += e.flow;
      }
    }
  };

  if (s <= cap) {
    // exact enumeration over subsets containing state 0 (kappa(A) is
    // symmetric in A and A^c); Gray-code walk, one toggle per subset
    result.exact = true;
    const int bits = static_cast<int>(s) - 1;  // states 1..s-1 toggle
    toggle(0);

    double best = kappa_of(flow, mass);
    std::uint64_t best_code = 0;

    const std::uint64_t count = 1ull << bits;
    std::uint64_t gray = 0;
    for (std::uint64_t i = 1; i < count; ++i) {
      const std::uint64_t next_gray = i ^ (i >> 1);
      const int bit = static_cast<int>(std::countr_zero(gray ^ next_gray));
      gray = next_gray;
      toggle(static_cast<std::int64_t>(bit) + 1);
      if (mass >= 1.0 - 1e-15) continue;  // proper subsets only
      const double kappa = kappa_of(std::max(flow, 0.0), mass);
      if (kappa < best) {
        best = kappa;
        best_code = gray;
      }
    }

    result.kappa = best;
    result.min_set.push_back(0);
    for (int b = 0; b < bits; ++b) {
      if ((best_code >> b) & 1ull) result.min_set.push_back(b + 1);
    }
    return result;
  }

  // sweep cut along the gap eigenvector (heuristic, exact = false)
  result.exact = false;
  SpectralResult spectral = numeric_gap(gen, &pi);
  Eigen::VectorXd f = spectral.gap_vector.cwiseQuotient(pi.cwiseSqrt());
  std::vector<std::int64_t> order(static_cast<std::size_t>(s));
  for (std::int64_t i = 0; i < s; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](std::int64_t a, std::int64_t b) { return f(a) < f(b); });

  double best = std::numeric_limits<double>::infinity();
  std::size_t best_prefix = 0;
  for (std::size_t r = 0; r + 1 < order.size(); ++r) {
    toggle(order[r]);
    const double kappa = kappa_of(std::max(flow, 0.0), mass);
    if (kappa < best) {
      best = kappa;
      best_prefix = r + 1;
    }
  }
  result.kappa = best;
  result.min_set.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_prefix));
  std::sort(result.min_set.begin(), result.min_set.end());
  return result;
}

}  // namespace qnet
