#include "qnet/sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <thread>

namespace qnet {

// ---------------------------------------------------------------------------
// RNG: splitmix64-seeded xoshiro256++ streams
// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t master, std::uint64_t stream) {
  // stream i draws its state from the splitmix64 chain over (master, i)
  std::uint64_t x = master;
  x ^= splitmix64(x) + 0x632be59bd9b4e019ull * (stream + 1);
  for (auto& word : s_) word = splitmix64(x);
}

std::uint64_t RngStream::next() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform() {
  return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
}

double RngStream::exponential(double rate) { return -std::log(uniform()) / rate; }

// ---------------------------------------------------------------------------
// Dynamics per target
// ---------------------------------------------------------------------------

namespace {

struct Move {
  double rate = 0.0;
  int kind = 0;  // 0 arrival(a), 1 migrate(a,b), 2 depart(a), 3 avail(a = down index)
  int a = 0;
  int b = 0;
};

/// Per-down-set routing and availability tables, built once per simulation.
struct NetworkDynamics {
  const NetworkSpec* spec = nullptr;
  std::vector<DownSet> down_sets;
  std::vector<RoutingMatrix> routing;
  std::vector<std::vector<std::pair<int, double>>> avail_moves;

  explicit NetworkDynamics(const NetworkSpec& s) : spec(&s) {
    down_sets = s.availability.usable_sets();
    routing.reserve(down_sets.size());
    for (DownSet d : down_sets) routing.push_back(s.routing.modified(d));
    avail_moves.resize(down_sets.size());
    for (std::size_t a = 0; a < down_sets.size(); ++a) {
      for (std::size_t b = 0; b < down_sets.size(); ++b) {
        if (a == b) continue;
        const DownSet da = down_sets[a], db = down_sets[b];
        double rate = 0.0;
        if ((da & db) == da) rate = s.availability.breakdown_rate(da, db);
        if ((da & db) == db) rate = s.availability.repair_rate(da, db);
        if (rate > 0.0) avail_moves[a].emplace_back(static_cast<int>(b), rate);
      }
    }
  }

  int down_index(DownSet d) const {
    const auto it = std::lower_bound(down_sets.begin(), down_sets.end(), d);
    if (it == down_sets.end() || *it != d) {
      throw std::invalid_argument("initial state has an unusable down set");
    }
    return static_cast<int>(it - down_sets.begin());
  }
};

struct NetSimState {
  int d_idx = 0;
  std::vector<std::int64_t> n;
};

struct NetDyn {
  std::shared_ptr<const NetworkDynamics> tables;

  void moves(const NetSimState& s, std::vector<Move>& out) const {
    out.clear();
    const auto& dyn = *tables;
    const int m = dyn.spec->nodes();
    const DownSet down = dyn.down_sets[static_cast<std::size_t>(s.d_idx)];
    const RoutingMatrix& r = dyn.routing[static_cast<std::size_t>(s.d_idx)];
    for (int j = 1; j <= m; ++j) {
      if (down_contains(down, j)) continue;
      const double rate = dyn.spec->arrival_rate * r(0, j);
      if (rate > 0.0) out.push_back(Move{rate, 0, j, 0});
    }
    for (int i = 1; i <= m; ++i) {
      if (down_contains(down, i) || s.n[i - 1] == 0) continue;
      const double mu = dyn.spec->services[i - 1](s.n[i - 1]);
      if (r(i, 0) > 0.0) out.push_back(Move{mu * r(i, 0), 2, i, 0});
      for (int j = 1; j <= m; ++j) {
        if (j == i || down_contains(down, j) || r(i, j) <= 0.0) continue;
        out.push_back(Move{mu * r(i, j), 1, i, j});
      }
    }
    for (const auto& [target, rate] : dyn.avail_moves[static_cast<std::size_t>(s.d_idx)]) {
      out.push_back(Move{rate, 3, target, 0});
    }
  }

  static void apply(const Move& mv, NetSimState& s) {
    switch (mv.kind) {
      case 0: ++s.n[mv.a - 1]; break;
      case 1: --s.n[mv.a - 1]; ++s.n[mv.b - 1]; break;
      case 2: --s.n[mv.a - 1]; break;
      default: s.d_idx = mv.a; break;
    }
  }
};

struct BdDyn {
  const BirthDeathSpec* bd = nullptr;

  void moves(const std::int64_t& k, std::vector<Move>& out) const {
    out.clear();
    out.push_back(Move{bd->birth, 0, 0, 0});
    if (k >= 1) out.push_back(Move{bd->death(k), 2, 0, 0});
  }
  static void apply(const Move& mv, std::int64_t& k) { k += mv.kind == 0 ? 1 : -1; }
};

struct ChainDyn {
  const Eigen::SparseMatrix<double, Eigen::RowMajor>* q = nullptr;

  void moves(const std::int64_t& x, std::vector<Move>& out) const {
    out.clear();
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
             *q, static_cast<int>(x));
         it; ++it) {
      if (it.col() != x && it.value() > 0.0) {
        out.push_back(Move{it.value(), 0, static_cast<int>(it.col()), 0});
      }
    }
  }
  static void apply(const Move& mv, std::int64_t& x) { x = mv.a; }
};

// ---------------------------------------------------------------------------
// Replication runner
// ---------------------------------------------------------------------------

struct TvAccumulator {
  std::vector<std::vector<std::int64_t>> counts;  // per grid point, per box state
  std::vector<std::int64_t> outside;

  TvAccumulator(std::size_t grid, std::size_t box)
      : counts(grid, std::vector<std::int64_t>(box, 0)), outside(grid, 0) {}

  void merge(const TvAccumulator& other) {
    for (std::size_t g = 0; g < counts.size(); ++g) {
      for (std::size_t x = 0; x < counts[g].size(); ++x) counts[g][x] += other.counts[g][x];
      outside[g] += other.outside[g];
    }
  }

  void bin(std::size_t g, std::int64_t id) {
    if (id < 0) {
      ++outside[g];
    } else {
      ++counts[g][static_cast<std::size_t>(id)];
    }
  }
};

/// One path; bins the pre-jump state at every grid time the waiting interval
/// covers. With no active transition (cannot happen for valid specs) the
/// current state fills the remaining grid.
template <typename Dyn, typename State, typename Encode>
void run_grid_replication(const Dyn& dyn, State state, const std::vector<double>& grid,
                          RngStream& rng, std::vector<Move>& moves, const Encode& encode,
                          TvAccumulator& acc) {
  double t = 0.0;
  std::size_t g = 0;
  while (g < grid.size()) {
    dyn.moves(state, moves);
    double total = 0.0;
    for (const auto& mv : moves) total += mv.rate;
    const double dt =
        total > 0.0 ? rng.exponential(total) : std::numeric_limits<double>::infinity();
    while (g < grid.size() && t + dt >= grid[g]) {
      acc.bin(g, encode(state));
      ++g;
    }
    if (total <= 0.0) break;
    t += dt;
    double u = rng.uniform() * total;
    const Move* chosen = &moves.back();
    for (const auto& mv : moves) {
      u -= mv.rate;
      if (u <= 0.0) {
        chosen = &mv;
        break;
      }
    }
    Dyn::apply(*chosen, state);
  }
}

template <typename Dyn, typename State, typename Encode>
TvAccumulator run_all_replications(const SimConfig& config, const Dyn& dyn,
                                   const State& x0, const Encode& encode,
                                   std::size_t box_states) {
  const std::size_t g_count = config.grid.size();
  const int threads = std::max(1, config.threads);
  std::vector<TvAccumulator> parts(static_cast<std::size_t>(threads),
                                   TvAccumulator(g_count, box_states));

  auto worker = [&](int part, std::int64_t begin, std::int64_t end) {
    std::vector<Move> moves;
    for (std::int64_t rep = begin; rep < end; ++rep) {
      RngStream rng(config.seed, static_cast<std::uint64_t>(rep));
      run_grid_replication(dyn, x0, config.grid, rng, moves, encode,
                           parts[static_cast<std::size_t>(part)]);
    }
  };

  if (threads == 1) {
    worker(0, 0, config.reps);
  } else {
    std::vector<std::thread> pool;
    const std::int64_t chunk = (config.reps + threads - 1) / threads;
    for (int p = 0; p < threads; ++p) {
      const std::int64_t begin = p * chunk;
      const std::int64_t end = std::min<std::int64_t>(config.reps, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(worker, p, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  TvAccumulator total = std::move(parts[0]);
  for (std::size_t p = 1; p < parts.size(); ++p) total.merge(parts[p]);
  return total;
}

// ---------------------------------------------------------------------------
// Reference laws on finite boxes
// ---------------------------------------------------------------------------

struct Reference {
  std::vector<double> prob;
  double omitted = 0.0;
};

struct BoxIndexer {
  std::vector<std::int64_t> radix;  // per queue coordinate: box_i + 1
  std::int64_t queue_states = 1;

  std::int64_t encode(int d_idx, const std::vector<std::int64_t>& n) const {
    std::int64_t id = 0;
    for (std::size_t i = n.size(); i-- > 0;) {
      if (n[i] >= radix[i]) return -1;
      id = id * radix[i] + n[i];
    }
    return static_cast<std::int64_t>(d_idx) * queue_states + id;
  }
};

Reference network_reference(const NetworkSpec& spec, const TrafficVector& traffic,
                            const NetworkDynamics& dyn, BoxIndexer& indexer) {
  const NetworkStationary net = stationary_distribution(spec, traffic);
  const int m = spec.nodes();
  indexer.radix.resize(static_cast<std::size_t>(m));
  const double per_node = 1e-6 / m;  // omitted mass < 1e-6 overall
  for (int i = 0; i < m; ++i) {
    std::int64_t box = 1;
    while (net.marginals[static_cast<std::size_t>(i)].tail(box) >= per_node) ++box;
    indexer.radix[static_cast<std::size_t>(i)] = box + 1;
  }
  indexer.queue_states = 1;
  for (auto r : indexer.radix) indexer.queue_states *= r;

  Reference ref;
  ref.prob.assign(dyn.down_sets.size() * static_cast<std::size_t>(indexer.queue_states), 0.0);
  std::vector<std::int64_t> n(static_cast<std::size_t>(m), 0);
  double total = 0.0;
  for (std::size_t d = 0; d < dyn.down_sets.size(); ++d) {
    const double pd = net.availability(dyn.down_sets[d]);
    std::fill(n.begin(), n.end(), 0);
    bool done = false;
    while (!done) {
      double p = pd;
      for (int i = 0; i < m; ++i) {
        p *= net.marginals[static_cast<std::size_t>(i)].pmf(n[static_cast<std::size_t>(i)]);
      }
      ref.prob[static_cast<std::size_t>(indexer.encode(static_cast<int>(d), n))] = p;
      total += p;
      done = true;
      for (int i = 0; i < m && done; ++i) {
        auto& v = n[static_cast<std::size_t>(i)];
        if (++v < indexer.radix[static_cast<std::size_t>(i)]) {
          done = false;
        } else {
          v = 0;
        }
      }
    }
  }
  ref.omitted = std::max(0.0, 1.0 - total);
  return ref;
}

Reference bd_reference(const DiscreteDist& dist, std::int64_t& box) {
  box = 1;
  while (dist.tail(box) >= 1e-6) ++box;
  Reference ref;
  ref.prob.resize(static_cast<std::size_t>(box) + 1);
  double total = 0.0;
  for (std::int64_t k = 0; k <= box; ++k) {
    ref.prob[static_cast<std::size_t>(k)] = dist.pmf(k);
    total += ref.prob[static_cast<std::size_t>(k)];
  }
  ref.omitted = std::max(0.0, 1.0 - total);
  return ref;
}

// ---------------------------------------------------------------------------
// Window fit
// ---------------------------------------------------------------------------

struct WindowFit {
  bool found = false;
  double alpha = 0.0;
  double r2 = 0.0;
  int begin = 0, end = 0;  // grid index range [begin, end)
};

WindowFit fit_decay_window(const std::vector<double>& t, const std::vector<double>& tv,
                           double floor) {
  std::vector<int> keep;
  for (std::size_t i = 0; i < tv.size(); ++i) {
    if (tv[i] >= floor) keep.push_back(static_cast<int>(i));
  }
  WindowFit fit;
  const int n = static_cast<int>(keep.size());
  for (int start = 0; start + 4 <= n; ++start) {
    const int len = n - start;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int j = start; j < n; ++j) {
      const double x = t[static_cast<std::size_t>(keep[j])];
      const double y = std::log(tv[static_cast<std::size_t>(keep[j])]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      syy += y * y;
    }
    const double det = len * sxx - sx * sx;
    if (det <= 0.0) continue;
    const double slope = (len * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / len;
    double ss_res = 0.0;
    const double ss_tot = syy - sy * sy / len;
    for (int j = start; j < n; ++j) {
      const double x = t[static_cast<std::size_t>(keep[j])];
      const double y = std::log(tv[static_cast<std::size_t>(keep[j])]);
      const double e = y - (slope * x + intercept);
      ss_res += e * e;
    }
    if (ss_tot <= 1e-12) continue;  // constant series, nothing to fit
    const double r2 = 1.0 - ss_res / ss_tot;
    if (r2 >= 0.9 && slope < 0.0) {
      fit.found = true;
      fit.alpha = -slope;
      fit.r2 = r2;
      fit.begin = keep[static_cast<std::size_t>(start)];
      fit.end = keep.back() + 1;
      return fit;  // longest qualifying suffix
    }
  }
  return fit;
}

std::vector<double> tv_series(const TvAccumulator& acc, const Reference& ref,
                              std::int64_t reps) {
  std::vector<double> tv(acc.counts.size(), 0.0);
  const double r = static_cast<double>(reps);
  for (std::size_t g = 0; g < acc.counts.size(); ++g) {
    double sum = 0.0;
    for (std::size_t x = 0; x < ref.prob.size(); ++x) {
      sum += std::abs(static_cast<double>(acc.counts[g][x]) / r - ref.prob[x]);
    }
    tv[g] = 0.5 * sum +
            0.5 * (static_cast<double>(acc.outside[g]) / r + ref.omitted);
    tv[g] = std::min(tv[g], 1.0);
  }
  return tv;
}

}  // namespace

// ---------------------------------------------------------------------------
// simulate_path
// ---------------------------------------------------------------------------

std::vector<PathPoint> simulate_path(const SimTarget& target, double horizon,
                                     std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::vector<PathPoint> path;
  std::vector<Move> moves;

  auto drive = [&](const auto& dyn, auto state, auto&& to_netstate) {
    double t = 0.0;
    path.push_back(PathPoint{0.0, to_netstate(state)});
    while (true) {
      dyn.moves(state, moves);
      double total = 0.0;
      for (const auto& mv : moves) total += mv.rate;
      if (total <= 0.0) break;
      const double dt = rng.exponential(total);
      if (t + dt > horizon) break;
      t += dt;
      double u = rng.uniform() * total;
      const Move* chosen = &moves.back();
      for (const auto& mv : moves) {
        u -= mv.rate;
        if (u <= 0.0) {
          chosen = &mv;
          break;
        }
      }
      std::decay_t<decltype(dyn)>::apply(*chosen, state);
      path.push_back(PathPoint{t, to_netstate(state)});
    }
  };

  if (const auto* net = std::get_if<NetworkTarget>(&target)) {
    auto tables = std::make_shared<NetworkDynamics>(net->spec);
    NetDyn dyn{tables};
    NetSimState s{tables->down_index(net->x0.down), net->x0.n};
    if (static_cast<int>(s.n.size()) != net->spec.nodes()) {
      throw std::invalid_argument("initial state dimension mismatch");
    }
    drive(dyn, s, [&](const NetSimState& st) {
      return NetState{tables->down_sets[static_cast<std::size_t>(st.d_idx)], st.n};
    });
  } else if (const auto* bd = std::get_if<BirthDeathTarget>(&target)) {
    BdDyn dyn{&bd->bd};
    drive(dyn, bd->x0, [](std::int64_t k) { return NetState{0, {k}}; });
  } else {
    const auto& chain = std::get<ChainTarget>(target);
    ChainDyn dyn{&chain.gen.matrix()};
    drive(dyn, chain.x0, [](std::int64_t x) { return NetState{0, {x}}; });
  }
  return path;
}

// ---------------------------------------------------------------------------
// estimate_tv_decay / marginal_check
// ---------------------------------------------------------------------------

DecayEstimate estimate_tv_decay(const SimConfig& config) {
  if (config.reps < 1) throw std::invalid_argument("need at least one replication");
  if (config.grid.empty()) throw std::invalid_argument("grid must be nonempty");
  for (std::size_t i = 1; i < config.grid.size(); ++i) {
    if (!(config.grid[i] > config.grid[i - 1])) {
      throw std::invalid_argument("grid must be strictly increasing");
    }
  }

  Reference ref;
  TvAccumulator acc(0, 0);

  if (const auto* net = std::get_if<NetworkTarget>(&config.target)) {
    const TrafficVector traffic = solve_traffic(net->spec);
    auto tables = std::make_shared<NetworkDynamics>(net->spec);
    BoxIndexer indexer;
    ref = network_reference(net->spec, traffic, *tables, indexer);
    NetDyn dyn{tables};
    NetSimState x0{tables->down_index(net->x0.down), net->x0.n};
    if (static_cast<int>(x0.n.size()) != net->spec.nodes()) {
      throw std::invalid_argument("initial state dimension mismatch");
    }
    auto encode = [&indexer](const NetSimState& s) { return indexer.encode(s.d_idx, s.n); };
    acc = run_all_replications(config, dyn, x0, encode, ref.prob.size());
  } else if (const auto* bd = std::get_if<BirthDeathTarget>(&config.target)) {
    std::int64_t box = 0;
    ref = bd_reference(bd->bd.dist, box);
    BdDyn dyn{&bd->bd};
    auto encode = [box](const std::int64_t& k) { return k <= box ? k : -1; };
    acc = run_all_replications(config, dyn, bd->x0, encode, ref.prob.size());
  } else {
    const auto& chain = std::get<ChainTarget>(config.target);
    const Eigen::VectorXd pi = stationary_of(chain.gen);
    ref.prob.assign(pi.data(), pi.data() + pi.size());
    ref.omitted = 0.0;
    ChainDyn dyn{&chain.gen.matrix()};
    auto encode = [](const std::int64_t& x) { return x; };
    acc = run_all_replications(config, dyn, chain.x0, encode, ref.prob.size());
  }

  DecayEstimate out;
  out.t = config.grid;
  out.tv = tv_series(acc, ref, config.reps);
  out.reps = config.reps;
  out.noise_floor = 3.0 / std::sqrt(static_cast<double>(config.reps));
  out.reference_omitted_mass = ref.omitted;

  const WindowFit fit = fit_decay_window(out.t, out.tv, out.noise_floor);
  if (fit.found) {
    out.alpha = fit.alpha;
    out.fit_begin = fit.begin;
    out.fit_end = fit.end;
    out.r_squared = fit.r2;
  }
  return out;
}

MarginalCheckResult marginal_check(const SimConfig& config) {
  const auto* net = std::get_if<NetworkTarget>(&config.target);
  if (!net) throw std::invalid_argument("marginal_check needs a network target");
  if (config.grid.empty()) throw std::invalid_argument("grid must be nonempty");

  const TrafficVector traffic = solve_traffic(net->spec);
  const NetworkStationary stat = stationary_distribution(net->spec, traffic);
  auto tables = std::make_shared<NetworkDynamics>(net->spec);
  const int m = net->spec.nodes();

  // per-node boxes with certified tails
  std::vector<std::int64_t> box(static_cast<std::size_t>(m), 1);
  for (int i = 0; i < m; ++i) {
    while (stat.marginals[static_cast<std::size_t>(i)].tail(box[static_cast<std::size_t>(i)]) >=
           1e-9) {
      ++box[static_cast<std::size_t>(i)];
    }
  }

  // flatten per-node marginal counts into one accumulator row
  std::vector<std::int64_t> offset(static_cast<std::size_t>(m) + 1, 0);
  for (int i = 0; i < m; ++i) offset[static_cast<std::size_t>(i) + 1] =
      offset[static_cast<std::size_t>(i)] + box[static_cast<std::size_t>(i)] + 2;
  // slot layout per node: 0..box -> counts, box+1 -> outside

  SimConfig final_only = config;
  final_only.grid = {config.grid.back()};

  NetDyn dyn{tables};
  NetSimState x0{tables->down_index(net->x0.down), net->x0.n};

  // custom accumulation: replicate run_all_replications but bin marginals
  const int threads = std::max(1, final_only.threads);
  std::vector<std::vector<std::int64_t>> parts(
      static_cast<std::size_t>(threads),
      std::vector<std::int64_t>(static_cast<std::size_t>(offset.back()), 0));

  auto worker = [&](int part, std::int64_t begin, std::int64_t end) {
    auto& bins = parts[static_cast<std::size_t>(part)];
    for (std::int64_t rep = begin; rep < end; ++rep) {
      RngStream rng(final_only.seed, static_cast<std::uint64_t>(rep));
      NetSimState s = x0;
      double t = 0.0;
      std::vector<Move> mv;
      const double target_t = final_only.grid[0];
      while (true) {
        dyn.moves(s, mv);
        double total = 0.0;
        for (const auto& one : mv) total += one.rate;
        const double dt =
            total > 0.0 ? rng.exponential(total) : std::numeric_limits<double>::infinity();
        if (t + dt >= target_t) break;
        t += dt;
        double u = rng.uniform() * total;
        const Move* chosen = &mv.back();
        for (const auto& one : mv) {
          u -= one.rate;
          if (u <= 0.0) {
            chosen = &one;
            break;
          }
        }
        NetDyn::apply(*chosen, s);
      }
      for (int i = 0; i < m; ++i) {
        const std::int64_t k = s.n[static_cast<std::size_t>(i)];
        const std::int64_t base = offset[static_cast<std::size_t>(i)];
        if (k <= box[static_cast<std::size_t>(i)]) {
          ++bins[static_cast<std::size_t>(base + k)];
        } else {
          ++bins[static_cast<std::size_t>(base + box[static_cast<std::size_t>(i)] + 1)];
        }
      }
    }
  };

  if (threads == 1) {
    worker(0, 0, final_only.reps);
  } else {
    std::vector<std::thread> pool;
    const std::int64_t chunk = (final_only.reps + threads - 1) / threads;
    for (int p = 0; p < threads; ++p) {
      const std::int64_t begin = p * chunk;
      const std::int64_t end = std::min<std::int64_t>(final_only.reps, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(worker, p, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  for (std::size_t p = 1; p < parts.size(); ++p) {
    for (std::size_t x = 0; x < parts[0].size(); ++x) parts[0][x] += parts[p][x];
  }

  MarginalCheckResult result;
  const double r = static_cast<double>(final_only.reps);
  for (int i = 0; i < m; ++i) {
    const std::int64_t base = offset[static_cast<std::size_t>(i)];
    const std::int64_t bx = box[static_cast<std::size_t>(i)];
    double sum = 0.0;
    for (std::int64_t k = 0; k <= bx; ++k) {
      const double emp = static_cast<double>(parts[0][static_cast<std::size_t>(base + k)]) / r;
      sum += std::abs(emp - stat.marginals[static_cast<std::size_t>(i)].pmf(k));
    }
    const double out_mass =
        static_cast<double>(parts[0][static_cast<std::size_t>(base + bx + 1)]) / r;
    result.tv.push_back(std::min(
        1.0, 0.5 * sum + 0.5 * (out_mass + stat.marginals[static_cast<std::size_t>(i)].tail(bx))));
  }
  result.band = std::sqrt(std::log(2.0 / 0.01) / (2.0 * r));
  return result;
}

}  // namespace qnet
