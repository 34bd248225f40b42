#include "qnet/network.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

namespace qnet {

namespace {

std::string down_set_name(DownSet d) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (int i = 1; d != 0; ++i, d >>= 1) {
    if (d & 1u) {
      if (!first) os << ',';
      os << i;
      first = false;
    }
  }
  os << '}';
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// RoutingMatrix
// ---------------------------------------------------------------------------

RoutingMatrix::RoutingMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() < 2) {
    throw std::invalid_argument("routing matrix must be square of size m+1 >= 2");
  }
}

RoutingMatrix RoutingMatrix::modified(DownSet down) const {
  const int m = nodes();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(m + 1, m + 1);
  for (int i = 0; i <= m; ++i) {
    if (i >= 1 && down_contains(down, i)) continue;
    double folded = entries_(i, i);
    for (int j = 1; j <= m; ++j) {
      if (down_contains(down, j)) folded += entries_(i, j);
    }
    r(i, i) = folded;
    for (int j = 0; j <= m; ++j) {
      if (j == i) continue;
      if (j >= 1 && down_contains(down, j)) continue;
      r(i, j) = entries_(i, j);
    }
  }
  return RoutingMatrix(std::move(r));
}

void RoutingMatrix::append_violations(std::vector<std::string>& out) const {
  const int m = nodes();
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= m; ++j) {
      const double v = entries_(i, j);
      if (!(v >= 0.0 && v <= 1.0) || !std::isfinite(v)) {
        out.push_back("routing: entry (" + std::to_string(i) + "," + std::to_string(j) +
                      ") outside [0,1]");
      }
    }
  }
  for (int i = 1; i <= m; ++i) {
    if (std::abs(row_sum(i) - 1.0) > 1e-12) {
      out.push_back("routing: row " + std::to_string(i) + " not stochastic (sums to " +
                    std::to_string(row_sum(i)) + ")");
    }
  }
  if (external_total() > 1.0 + 1e-12) {
    out.push_back("routing: row 0 sums above 1");
  }
}

bool check_regular(const RoutingMatrix& routing) {
  const int n = routing.nodes() + 1;
  auto edge = [&](int i, int j) { return routing(i, j) > 0.0; };

  // strong connectivity: forward and backward reachability from node 0
  auto reachable = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v = 0; v < n; ++v) {
        bool has = forward ? edge(u, v) : edge(v, u);
        if (has && !seen[v]) {
          seen[v] = 1;
          q.push(v);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  if (!reachable(true) || !reachable(false)) return false;

  // aperiodicity: gcd of (d(u) + 1 - d(v)) over edges, d = BFS levels
  std::vector<int> dist(n, -1);
  std::queue<int> q;
  q.push(0);
  dist[0] = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v = 0; v < n; ++v) {
      if (edge(u, v) && dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  int g = 0;
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (edge(u, v)) g = std::gcd(g, std::abs(dist[u] + 1 - dist[v]));
    }
  }
  return g == 1;
}

// ---------------------------------------------------------------------------
// AvailabilityModel
// ---------------------------------------------------------------------------

AvailabilityModel::AvailabilityModel()
    : AvailabilityModel({AvailabilityEntry{0, 1.0, 1.0}}) {}

AvailabilityModel::AvailabilityModel(std::vector<AvailabilityEntry> entries)
    : entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (e.psi > 0.0 && e.phi > 0.0) usable_.push_back(e.down);
  }
  std::sort(usable_.begin(), usable_.end());
  usable_.erase(std::unique(usable_.begin(), usable_.end()), usable_.end());
}

double AvailabilityModel::psi(DownSet d) const {
  for (const auto& e : entries_) {
    if (e.down == d) return e.psi;
  }
  return 0.0;
}

double AvailabilityModel::phi(DownSet d) const {
  for (const auto& e : entries_) {
    if (e.down == d) return e.phi;
  }
  return 0.0;
}

double AvailabilityModel::breakdown_rate(DownSet from, DownSet to) const {
  const double p = psi(from);
  return p > 0.0 ? psi(to) / p : 0.0;
}

double AvailabilityModel::repair_rate(DownSet from, DownSet to) const {
  const double p = phi(to);
  return p > 0.0 ? phi(from) / p : 0.0;
}

void AvailabilityModel::append_violations(std::vector<std::string>& out, int m) const {
  for (const auto& e : entries_) {
    if (e.psi < 0.0 || e.phi < 0.0 || !std::isfinite(e.psi) || !std::isfinite(e.phi)) {
      out.push_back("availability: weights of " + down_set_name(e.down) +
                    " must be finite and nonnegative");
    }
    if (e.down >> m) {
      out.push_back("availability: set " + down_set_name(e.down) +
                    " references nodes beyond m");
    }
  }
  if (!usable(0)) {
    out.push_back("availability: the empty set must have psi > 0 and phi > 0");
    return;
  }

  // closure: a positive-rate move whose target is not usable
  for (DownSet d : usable_) {
    for (const auto& e : entries_) {
      if (usable(e.down)) continue;
      const bool above = (e.down & d) == d && e.down != d;
      const bool below = (e.down & d) == e.down && e.down != d;
      if (above && e.psi > 0.0) {
        out.push_back("availability: set " + down_set_name(e.down) +
                      " unusable but reachable by breakdown from " + down_set_name(d));
      }
      if (below && e.phi > 0.0) {
        out.push_back("availability: set " + down_set_name(e.down) +
                      " unusable but reachable by repair from " + down_set_name(d));
      }
    }
  }

  // strong connectivity of the usable family under single moves
  const int n = static_cast<int>(usable_.size());
  auto idx = [&](DownSet d) {
    return static_cast<int>(std::lower_bound(usable_.begin(), usable_.end(), d) -
                            usable_.begin());
  };
  auto has_edge = [&](int a, int b) {
    DownSet da = usable_[a], db = usable_[b];
    if ((da & db) == da && da != db) return breakdown_rate(da, db) > 0.0;
    if ((da & db) == db && da != db) return repair_rate(da, db) > 0.0;
    return false;
  };
  auto reach = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(idx(0));
    seen[idx(0)] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v = 0; v < n; ++v) {
        if (!seen[v] && (forward ? has_edge(u, v) : has_edge(v, u))) {
          seen[v] = 1;
          q.push(v);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  if (!reach(true) || !reach(false)) {
    out.push_back("availability: usable family not connected under breakdown/repair moves");
  }
}

// ---------------------------------------------------------------------------
// Network operations
// ---------------------------------------------------------------------------

ValidationReport validate_spec(const NetworkSpec& spec) {
  ValidationReport report;
  auto& out = report.violations;

  const int m = spec.nodes();
  if (m < 1) out.push_back("network: must have at least one node");
  if (!(spec.arrival_rate > 0.0) || !std::isfinite(spec.arrival_rate)) {
    out.push_back("network: arrival rate must be positive and finite");
  }
  if (spec.routing.nodes() != m) {
    out.push_back("network: routing dimension does not match node count");
    return report;  // dimensions broken; nothing below is meaningful
  }

  spec.routing.append_violations(out);
  for (int i = 0; i < m; ++i) {
    spec.services[i].append_violations(out, "service at node " + std::to_string(i + 1));
  }
  spec.availability.append_violations(out, m);

  // irreducibility of the extended graph; aperiodicity is a separate concern
  // handled by check_regular for callers that need it
  const int n = m + 1;
  auto connected = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v = 0; v < n; ++v) {
        double rate = forward ? spec.routing(u, v) : spec.routing(v, u);
        if (rate > 0.0 && !seen[v]) {
          seen[v] = 1;
          q.push(v);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  if (!connected(true) || !connected(false)) {
    out.push_back("routing: graph on {0..m} is not irreducible");
  }
  return report;
}

TrafficVector solve_traffic(const NetworkSpec& spec) {
  const int m = spec.nodes();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd b(m);
  for (int i = 1; i <= m; ++i) {
    b(i - 1) = spec.arrival_rate * spec.routing(0, i);
    for (int j = 1; j <= m; ++j) a(i - 1, j - 1) -= spec.routing(j, i);
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) {
    throw TrafficError("no unique traffic solution");
  }
  Eigen::VectorXd x = lu.solve(b);
  const double scale = std::max(b.cwiseAbs().maxCoeff(), x.cwiseAbs().maxCoeff());
  const double residual = (a * x - b).cwiseAbs().maxCoeff();
  if (scale > 0.0 && residual > 1e-10 * scale) {
    throw TrafficError("no unique traffic solution");
  }

  TrafficVector traffic;
  traffic.rates.assign(x.data(), x.data() + m);
  return traffic;
}

ReversibilityCheck check_routing_reversible(const NetworkSpec& spec,
                                            const TrafficVector& traffic) {
  const int m = spec.nodes();
  auto lam = [&](int i) { return i == 0 ? spec.arrival_rate : traffic[i]; };

  ReversibilityCheck result;
  double scale = spec.arrival_rate;
  for (int i = 1; i <= m; ++i) scale = std::max(scale, traffic[i]);
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= m; ++j) {
      const double v = std::abs(lam(j) * spec.routing(j, i) - lam(i) * spec.routing(i, j));
      result.max_violation = std::max(result.max_violation, v);
    }
  }
  result.reversible = result.max_violation < 1e-10 * scale;
  return result;
}

}  // namespace qnet
