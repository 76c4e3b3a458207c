#include "gdm/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "gdm/error.hpp"
#include "gdm/rng.hpp"

namespace gdm {

const char* to_string(Status s) {
  switch (s) {
    case Status::Holds: return "HOLDS_AT_RESOLUTION";
    case Status::Fails: return "FAILS_WITH_WITNESS";
    case Status::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

Word OrbitApproximation::path_to(int node, int alphabet_size) const {
  std::vector<int> symbols;
  for (int k = node; k > 0; k = nodes[k].parent) symbols.push_back(nodes[k].symbol);
  std::reverse(symbols.begin(), symbols.end());
  return Word(std::move(symbols), alphabet_size);
}

namespace {

struct CellKey {
  long long a, b;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    return static_cast<std::size_t>(mix64(static_cast<std::uint64_t>(k.a) * 0x9e3779b97f4a7c15ULL ^
                                          static_cast<std::uint64_t>(k.b)));
  }
};

class Deduper {
 public:
  Deduper(double tol, bool planar) : tol_(std::max(tol, 1e-300)), planar_(planar) {}

  int find(const State& s, const std::vector<OrbitNode>& nodes) const {
    if (s.infinite) return infinite_;
    CellKey k = key(s);
    for (long long da = -1; da <= 1; ++da) {
      for (long long db = planar_ ? -1 : 0; db <= (planar_ ? 1 : 0); ++db) {
        auto it = cells_.find(CellKey{k.a + da, k.b + db});
        if (it == cells_.end()) continue;
        for (int idx : it->second) {
          const State& o = nodes[idx].state;
          if (std::hypot(o.x - s.x, o.y - s.y) <= tol_) return idx;
        }
      }
    }
    return -1;
  }

  void insert(const State& s, int idx) {
    if (s.infinite) {
      infinite_ = idx;
      return;
    }
    cells_[key(s)].push_back(idx);
  }

 private:
  CellKey key(const State& s) const {
    return CellKey{static_cast<long long>(std::floor(s.x / tol_)), planar_ ? static_cast<long long>(std::floor(s.y / tol_)) : 0};
  }

  double tol_;
  bool planar_;
  int infinite_ = -1;
  std::unordered_map<CellKey, std::vector<int>, CellHash> cells_;
};

bool beyond_cap(const State& s, double cap) { return !s.infinite && std::fabs(s.x) > cap; }

}  // namespace

OrbitApproximation orbit(const DrivenSystem& system, const State& y, int depth, const CheckOptions& opts) {
  if (depth < 1) throw Error(ErrorKind::Domain, "orbit depth must be >= 1");
  system.check_state(y);
  OrbitApproximation approx;
  approx.root = y;
  approx.dedup_tolerance = opts.dedup;
  const int N = system.N;
  // Magnitudes up to the cap with a 1e-9 grid overflow nothing: 1e6 / 1e-9 = 1e15 < 2^63.
  Deduper dedup(opts.dedup, system.space.kind == SpaceKind::Circle);
  approx.nodes.push_back(OrbitNode{y, -1, -1, 0, std::vector<int>(static_cast<std::size_t>(N), -1)});
  dedup.insert(y, 0);
  std::vector<int> frontier{0};
  for (int d = 1; d <= depth && !frontier.empty(); ++d) {
    std::vector<int> next_frontier;
    bool stop = false;
    for (int idx : frontier) {
      if (beyond_cap(approx.nodes[idx].state, opts.magnitude_cap)) {
        approx.capped = true;
        continue;
      }
      for (int i = 0; i < N; ++i) {
        State z = system.next(i, approx.nodes[idx].state);
        if (beyond_cap(z, opts.magnitude_cap * 1e3)) {
          approx.capped = true;
          continue;
        }
        int found = dedup.find(z, approx.nodes);
        if (found < 0) {
          found = static_cast<int>(approx.nodes.size());
          approx.nodes.push_back(OrbitNode{z, idx, i, d, std::vector<int>(static_cast<std::size_t>(N), -1)});
          dedup.insert(z, found);
          next_frontier.push_back(found);
        }
        approx.nodes[idx].children[i] = found;
      }
      if (approx.nodes.size() >= opts.max_states) {
        stop = true;
        break;
      }
    }
    if (stop) {
      approx.truncated = true;
      approx.depth = d - 1;
      break;
    }
    approx.depth = d;
    frontier = std::move(next_frontier);
  }
  return approx;
}

// ------------------------------------------------------------------ (A), (wA)

namespace {

struct BoundaryScan {
  std::vector<double> inf, sup;
  std::vector<std::optional<Witness>> witness;  // per G_j
  bool capped = false;
  int depth = 0;
  std::size_t states = 0;
};

double boundary_distance(double g) { return std::min(g, 1.0 - g); }

BoundaryScan scan_boundary(const DrivenSystem& system, const State& y, const CheckOptions& opts) {
  const int N = system.N;
  OrbitApproximation approx = orbit(system, y, opts.depth, opts);
  BoundaryScan scan;
  scan.inf.assign(N, std::numeric_limits<double>::infinity());
  scan.sup.assign(N, -std::numeric_limits<double>::infinity());
  scan.witness.resize(N);
  scan.capped = approx.capped;
  scan.depth = approx.depth;
  scan.states = approx.nodes.size();
  std::vector<double> p(N);

  auto record = [&](const std::vector<double>& g) {
    for (int j = 0; j < N; ++j) {
      scan.inf[j] = std::min(scan.inf[j], g[j]);
      scan.sup[j] = std::max(scan.sup[j], g[j]);
    }
  };

  for (std::size_t idx = 0; idx < approx.nodes.size(); ++idx) {
    std::vector<double> g = system.probabilities(approx.nodes[idx].state);
    record(g);
    for (int j = 0; j < N; ++j) {
      if (!scan.witness[j] && boundary_distance(g[j]) <= 1e-15) {
        Witness w;
        w.path = approx.path_to(static_cast<int>(idx), N);
        w.word = Word({}, N);
        w.symbol = j;
        w.values = g;
        w.description = "G_" + std::to_string(j) + " reaches the boundary on the orbit";
        scan.witness[j] = w;
      }
    }
  }

  // Single-symbol chains H_i^k from shallow orbit states.
  constexpr int kWindow = 16;
  for (std::size_t idx = 0; idx < approx.nodes.size(); ++idx) {
    const OrbitNode& node = approx.nodes[idx];
    if (node.depth > opts.chain_root_depth || beyond_cap(node.state, opts.magnitude_cap)) continue;
    for (int i = 0; i < N; ++i) {
      State z = node.state;
      std::vector<std::vector<double>> dist(N);
      for (int k = 1; k <= opts.chain_steps; ++k) {
        State z_next = system.next(i, z);
        bool converged = !z.infinite && !z_next.infinite && std::hypot(z_next.x - z.x, z_next.y - z.y) < 1e-15;
        bool same_infinite = z.infinite && z_next.infinite;
        z = z_next;
        if (beyond_cap(z, opts.magnitude_cap)) {
          scan.capped = true;
          break;
        }
        system.probabilities(z, p.data());
        record(p);
        ++scan.states;
        for (int j = 0; j < N; ++j) {
          double d = boundary_distance(p[j]);
          dist[j].push_back(d);
          if (scan.witness[j] || d >= opts.eps_fail) continue;
          bool monotone = true;
          int from = std::max(0, k - 1 - kWindow);
          for (int t = from + 1; t < k; ++t) monotone = monotone && dist[j][t] <= dist[j][t - 1];
          if (!monotone && d > 1e-15) continue;
          Witness w;
          std::vector<int> path = approx.path_to(static_cast<int>(idx), N).symbols;
          path.insert(path.end(), static_cast<std::size_t>(k), i);
          w.path = Word(std::move(path), N);
          w.word = Word({}, N);
          w.symbol = j;
          w.values = std::vector<double>(p.begin(), p.end());
          w.description = "G_" + std::to_string(j) + " approaches " + (p[j] < 0.5 ? "0" : "1") + " monotonically along H_" +
                          std::to_string(i) + "^" + std::to_string(k);
          scan.witness[j] = w;
        }
        if (converged || same_infinite) break;
        bool all_found = true;
        for (int j = 0; j < N; ++j) all_found = all_found && scan.witness[j].has_value();
        if (all_found) break;
      }
    }
  }
  return scan;
}

Resolution scan_resolution(const BoundaryScan& scan, const CheckOptions& opts) {
  Resolution r;
  r.depth = scan.depth;
  r.states = scan.states;
  r.margin = opts.margin;
  return r;
}

}  // namespace

ConditionVerdict check_A(const DrivenSystem& system, const State& y, const CheckOptions& opts) {
  BoundaryScan scan = scan_boundary(system, y, opts);
  ConditionVerdict v;
  v.condition = "A";
  v.inf = scan.inf;
  v.sup = scan.sup;
  v.resolution = scan_resolution(scan, opts);
  for (const auto& w : scan.witness) {
    if (w) {
      v.status = Status::Fails;
      v.witnesses.push_back(*w);
      return v;
    }
  }
  double lo = *std::min_element(scan.inf.begin(), scan.inf.end());
  double hi = *std::max_element(scan.sup.begin(), scan.sup.end());
  if (lo >= opts.margin && hi <= 1.0 - opts.margin && !scan.capped) {
    v.status = Status::Holds;
  } else {
    v.status = Status::Unknown;
    if (scan.capped) v.note = "orbit exceeded the magnitude cap";
  }
  return v;
}

ConditionVerdict check_wA(const DrivenSystem& system, const State& y, const CheckOptions& opts) {
  BoundaryScan scan = scan_boundary(system, y, opts);
  ConditionVerdict v;
  v.condition = "wA";
  v.inf = scan.inf;
  v.sup = scan.sup;
  v.resolution = scan_resolution(scan, opts);
  if (!scan.capped) {
    for (int j = 0; j < system.N; ++j) {
      if (!scan.witness[j] && scan.inf[j] >= opts.margin && scan.sup[j] <= 1.0 - opts.margin) {
        v.status = Status::Holds;
        v.note = "G_" + std::to_string(j) + " stays inside [" + format_real(scan.inf[j]) + ", " +
                 format_real(scan.sup[j]) + "]";
        return v;
      }
    }
  }
  bool all = true;
  for (const auto& w : scan.witness) all = all && w.has_value();
  if (all) {
    v.status = Status::Fails;
    for (const auto& w : scan.witness) v.witnesses.push_back(*w);
  } else {
    v.status = Status::Unknown;
    if (scan.capped) v.note = "orbit exceeded the magnitude cap";
  }
  return v;
}

// ------------------------------------------------------------------ box conditions

std::vector<double> default_eps0_grid(double scale) {
  std::vector<double> grid{0.9 * scale / 2.0};
  for (int k = 2; k <= 9; ++k) grid.push_back(scale / std::ldexp(1.0, k));
  return grid;
}

namespace {

enum class WordStatus { Violated, Clear, Ambiguous };

struct BoxTable {
  const OrbitApproximation* approx = nullptr;
  int l = 0;
  std::vector<Word> words;
  std::vector<double> dev;        // per node: max_j |G_j - c_j|
  std::vector<double> dev_after;  // per node x word
};

std::vector<Word> all_words(int N, int l) {
  std::vector<Word> out;
  std::size_t count = 1;
  for (int k = 0; k < l; ++k) count *= static_cast<std::size_t>(N);
  for (std::size_t code = 0; code < count; ++code) {
    std::vector<int> s(static_cast<std::size_t>(l));
    std::size_t c = code;
    for (int k = l - 1; k >= 0; --k) {
      s[k] = static_cast<int>(c % static_cast<std::size_t>(N));
      c /= static_cast<std::size_t>(N);
    }
    out.emplace_back(std::move(s), N);
  }
  return out;
}

double deviation(const std::vector<double>& g, const std::vector<double>& center) {
  double d = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) d = std::max(d, std::fabs(g[j] - center[j]));
  return d;
}

BoxTable build_table(const DrivenSystem& system, const OrbitApproximation& approx, const std::vector<double>& center,
                     const std::vector<Word>& words, int l) {
  BoxTable t;
  t.approx = &approx;
  t.l = l;
  t.words = words;
  const std::size_t n = approx.nodes.size();
  t.dev.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.dev[i] = deviation(system.probabilities(approx.nodes[i].state), center);
  t.dev_after.resize(n * words.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t w = 0; w < words.size(); ++w) {
      int node = static_cast<int>(i);
      State z;
      bool direct = false;
      for (int sym : words[w].symbols) {
        if (!direct) {
          int child = approx.nodes[node].children[sym];
          if (child >= 0) {
            node = child;
            continue;
          }
          direct = true;
          z = approx.nodes[node].state;
        }
        z = system.next(sym, z);
      }
      t.dev_after[i * words.size() + w] =
          direct ? deviation(system.probabilities(z), center) : t.dev[static_cast<std::size_t>(node)];
    }
  }
  return t;
}

struct ComboResult {
  std::vector<WordStatus> status;       // per word
  std::vector<int> violating_node;      // per word, -1 if none
};

ComboResult evaluate_combo(const BoxTable& t, double eps0, double margin) {
  const std::size_t W = t.words.size();
  ComboResult r;
  r.status.assign(W, WordStatus::Clear);
  r.violating_node.assign(W, -1);
  for (std::size_t i = 0; i < t.dev.size(); ++i) {
    double a = t.dev[i];
    bool a_in = a <= eps0;
    bool a_clear = a > eps0 + margin;
    if (a_clear) continue;
    for (std::size_t w = 0; w < W; ++w) {
      if (r.status[w] == WordStatus::Violated) continue;
      double b = t.dev_after[i * W + w];
      if (a_in && b <= eps0) {
        r.status[w] = WordStatus::Violated;
        r.violating_node[w] = static_cast<int>(i);
      } else if (!(b > eps0 + margin)) {
        r.status[w] = WordStatus::Ambiguous;
      }
    }
  }
  return r;
}

Witness make_box_witness(const DrivenSystem& system, const OrbitApproximation& approx, int node, const Word& word,
                         double eps0, const std::vector<double>& center) {
  Witness w;
  w.path = approx.path_to(node, system.N);
  w.word = word;
  w.eps0 = eps0;
  w.center = center;
  State z = approx.nodes[node].state;
  w.values = system.probabilities(z);
  for (int sym : word.symbols) z = system.next(sym, z);
  w.values_after = system.probabilities(z);
  w.description = "G and G o H_word both inside the box";
  return w;
}

enum class BoxMode { Some, Every };

ConditionVerdict box_condition(const std::string& name, const DrivenSystem& system, const State& y,
                               const std::vector<double>& center, const std::vector<double>& eps_grid,
                               const std::vector<int>& l_grid, std::optional<Word> fixed_word, BoxMode mode,
                               const CheckOptions& opts) {
  OrbitApproximation approx = orbit(system, y, opts.depth, opts);
  ConditionVerdict v;
  v.condition = name;
  v.target = center;
  v.resolution.depth = approx.depth;
  v.resolution.states = approx.nodes.size();
  v.resolution.margin = opts.margin;
  v.resolution.eps0_grid = eps_grid;
  v.resolution.l_grid = l_grid;

  bool all_fail = true;
  std::vector<Witness> last_fail_witnesses;
  std::optional<double> fail_eps;
  std::optional<int> fail_l;
  for (int l : l_grid) {
    std::vector<Word> words = fixed_word ? std::vector<Word>{*fixed_word} : all_words(system.N, l);
    BoxTable table = build_table(system, approx, center, words, l);
    for (double eps0 : eps_grid) {
      ComboResult r = evaluate_combo(table, eps0, opts.margin);
      bool any_clear = false, every_clear = true, any_violated = false, every_violated = true;
      std::size_t clear_word = 0;
      for (std::size_t w = 0; w < words.size(); ++w) {
        if (r.status[w] == WordStatus::Clear && !any_clear) {
          any_clear = true;
          clear_word = w;
        }
        every_clear = every_clear && r.status[w] == WordStatus::Clear;
        any_violated = any_violated || r.status[w] == WordStatus::Violated;
        every_violated = every_violated && r.status[w] == WordStatus::Violated;
      }
      Status s;
      if (mode == BoxMode::Some) {
        s = any_clear ? Status::Holds : (every_violated ? Status::Fails : Status::Unknown);
      } else {
        s = every_clear ? Status::Holds : (any_violated ? Status::Fails : Status::Unknown);
      }
      if (s == Status::Holds && approx.capped) s = Status::Unknown;
      if (s == Status::Holds) {
        v.status = Status::Holds;
        v.eps0 = eps0;
        v.l = l;
        if (mode == BoxMode::Some) v.word = words[clear_word];
        return v;
      }
      if (s != Status::Fails) {
        all_fail = false;
        continue;
      }
      last_fail_witnesses.clear();
      for (std::size_t w = 0; w < words.size(); ++w) {
        if (r.violating_node[w] >= 0) {
          last_fail_witnesses.push_back(make_box_witness(system, approx, r.violating_node[w], words[w], eps0, center));
          if (mode == BoxMode::Every) break;
        }
      }
      fail_eps = eps0;
      fail_l = l;
    }
  }
  if (all_fail) {
    v.status = Status::Fails;
    v.witnesses = std::move(last_fail_witnesses);
    v.eps0 = fail_eps;
    v.l = fail_l;
  } else {
    v.status = Status::Unknown;
    if (approx.capped) v.note = "orbit exceeded the magnitude cap; HOLDS cannot be certified";
  }
  return v;
}

std::vector<double> uniform_center(int N) { return std::vector<double>(static_cast<std::size_t>(N), 1.0 / N); }

void check_eps(double eps0, double upper) {
  if (!(eps0 > 0.0 && eps0 < upper)) {
    throw Error(ErrorKind::Domain, "eps0 = " + format_real(eps0) + " outside (0, " + format_real(upper) + ")");
  }
}

}  // namespace

ConditionVerdict check_B(const DrivenSystem& system, const State& y, std::optional<double> eps0, std::optional<int> l,
                         const CheckOptions& opts) {
  if (eps0) check_eps(*eps0, 1.0 / system.N);
  if (l && *l < 1) throw Error(ErrorKind::Domain, "l must be >= 1");
  std::vector<double> grid = eps0 ? std::vector<double>{*eps0} : default_eps0_grid(1.0 / system.N);
  std::vector<int> ls = l ? std::vector<int>{*l} : std::vector<int>{1, 2, 3};
  return box_condition("B", system, y, uniform_center(system.N), grid, ls, std::nullopt, BoxMode::Some, opts);
}

ConditionVerdict check_sB(const DrivenSystem& system, const State& y, std::optional<double> eps0, std::optional<int> l,
                          const CheckOptions& opts) {
  if (eps0) check_eps(*eps0, 1.0 / system.N);
  if (l && *l < 1) throw Error(ErrorKind::Domain, "l must be >= 1");
  std::vector<double> grid = eps0 ? std::vector<double>{*eps0} : default_eps0_grid(1.0 / system.N);
  std::vector<int> ls = l ? std::vector<int>{*l} : std::vector<int>{1, 2, 3};
  return box_condition("sB", system, y, uniform_center(system.N), grid, ls, std::nullopt, BoxMode::Every, opts);
}

ConditionVerdict check_multisep2(const DrivenSystem& system, const State& y, const std::vector<double>& target_p,
                                 std::optional<double> eps0, std::optional<Word> word, const CheckOptions& opts) {
  if (static_cast<int>(target_p.size()) != system.N) throw Error(ErrorKind::Domain, "target vector has the wrong length");
  double total = 0.0, min_p = 1.0;
  for (double p : target_p) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::Domain, "target probabilities must lie in (0,1)");
    total += p;
    min_p = std::min(min_p, p);
  }
  if (std::fabs(total - 1.0) > 1e-12) throw Error(ErrorKind::Domain, "target probabilities must sum to 1");
  if (eps0) check_eps(*eps0, min_p);
  if (word && word->alphabet_size != system.N) throw Error(ErrorKind::Domain, "word alphabet does not match the system");
  std::vector<double> grid = eps0 ? std::vector<double>{*eps0} : default_eps0_grid(min_p);
  std::vector<int> ls = word ? std::vector<int>{static_cast<int>(word->size())} : std::vector<int>{1, 2, 3};
  return box_condition("multisep2", system, y, target_p, grid, ls, word, BoxMode::Some, opts);
}

bool verify_witness(const DrivenSystem& system, const State& root, const Witness& w, double tol) {
  State z = root;
  for (int sym : w.path.symbols) z = system.evaluate_step(z, sym).next;
  std::vector<double> g = system.probabilities(z);
  if (g.size() != w.values.size()) return false;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (std::fabs(g[j] - w.values[j]) > tol) return false;
  }
  if (w.values_after.empty()) return true;
  for (int sym : w.word.symbols) z = system.evaluate_step(z, sym).next;
  g = system.probabilities(z);
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (std::fabs(g[j] - w.values_after[j]) > tol) return false;
  }
  return true;
}

bool verify_verdict(const DrivenSystem& system, const State& root, const ConditionVerdict& v, double tol) {
  if (v.status != Status::Fails) return true;
  if (v.witnesses.empty()) return false;
  for (const auto& w : v.witnesses) {
    if (!verify_witness(system, root, w, tol)) return false;
    if (v.condition == "A" || v.condition == "wA") {
      if (w.symbol < 0 || boundary_distance(w.values[w.symbol]) >= CheckOptions{}.eps_fail) return false;
    } else {
      if (deviation(w.values, w.center) > w.eps0 + tol || deviation(w.values_after, w.center) > w.eps0 + tol) return false;
    }
  }
  return true;
}

// ------------------------------------------------------------------ Kigami assumption

namespace {

struct Pt {
  double x, y;
};

struct Cell {
  std::vector<Pt> hull;  // convex hull vertices of the cell
};

Pt apply_address(const IfsGeometry& g, const std::vector<int>& addr) {
  // Point f_{w}(0): compose from the innermost map outward.
  Pt p{0.0, 0.0};
  for (std::size_t k = addr.size(); k-- > 0;) {
    int s = addr[k];
    switch (g.kind) {
      case GeometryKind::Interval: p.x = (p.x + s) / g.maps; break;
      case GeometryKind::Square: p = Pt{(p.x + (s & 1)) / 2.0, (p.y + (s >> 1)) / 2.0}; break;
      case GeometryKind::Gasket: {
        static const Pt v[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}};
        p = Pt{(p.x + v[s].x) / 2.0, (p.y + v[s].y) / 2.0};
        break;
      }
      case GeometryKind::Carpet: {
        static const int offs[8][2] = {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {2, 1}, {0, 2}, {1, 2}, {2, 2}};
        p = Pt{(p.x + offs[s][0]) / 3.0, (p.y + offs[s][1]) / 3.0};
        break;
      }
    }
  }
  return p;
}

std::vector<Cell> level_cells(const IfsGeometry& g, int m) {
  std::vector<Cell> cells;
  double h = std::pow(g.r, m);
  std::size_t count = 1;
  for (int k = 0; k < m; ++k) count *= static_cast<std::size_t>(g.maps);
  cells.reserve(count);
  std::vector<int> addr(static_cast<std::size_t>(m));
  for (std::size_t code = 0; code < count; ++code) {
    std::size_t c = code;
    for (int k = m - 1; k >= 0; --k) {
      addr[k] = static_cast<int>(c % static_cast<std::size_t>(g.maps));
      c /= static_cast<std::size_t>(g.maps);
    }
    Pt o = apply_address(g, addr);
    Cell cell;
    switch (g.kind) {
      case GeometryKind::Interval: cell.hull = {{o.x, 0.0}, {o.x + h, 0.0}}; break;
      case GeometryKind::Square:
      case GeometryKind::Carpet: cell.hull = {{o.x, o.y}, {o.x + h, o.y}, {o.x + h, o.y + h}, {o.x, o.y + h}}; break;
      case GeometryKind::Gasket: cell.hull = {{o.x, o.y}, {o.x + h, o.y}, {o.x + h / 2.0, o.y + h * std::sqrt(3.0) / 2.0}}; break;
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

double segment_distance(Pt p, Pt a, Pt b) {
  double dx = b.x - a.x, dy = b.y - a.y;
  double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

// Distance from p to the convex hull of the cell; a lower bound on the distance
// to the cell itself, so overlap counts are upper bounds.
double hull_distance(Pt p, const Cell& c) {
  const auto& v = c.hull;
  if (v.size() == 2) return segment_distance(p, v[0], v[1]);
  bool inside = true;
  for (std::size_t i = 0; i < v.size(); ++i) {
    Pt a = v[i], b = v[(i + 1) % v.size()];
    double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (cross < -1e-15) inside = false;
  }
  if (inside) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) d = std::min(d, segment_distance(p, v[i], v[(i + 1) % v.size()]));
  return d;
}

double hull_diameter(const Cell& c) {
  double d = 0.0;
  for (std::size_t i = 0; i < c.hull.size(); ++i) {
    for (std::size_t j = i + 1; j < c.hull.size(); ++j) {
      d = std::max(d, std::hypot(c.hull[i].x - c.hull[j].x, c.hull[i].y - c.hull[j].y));
    }
  }
  return d;
}

}  // namespace

KigamiReport verify_kigami(const IfsGeometry& g, int max_depth) {
  if (max_depth < 1) throw Error(ErrorKind::Domain, "max_depth must be >= 1");
  KigamiReport report;
  report.geometry = g;
  report.diameter_ok = true;
  report.overlap_ok = true;
  for (int m = 1; m <= max_depth; ++m) {
    std::vector<Cell> cells = level_cells(g, m);
    KigamiLevel level;
    level.m = m;
    level.cells = cells.size();
    double scale = g.c1 * std::pow(g.r, m);
    for (const auto& c : cells) level.max_diam_ratio = std::max(level.max_diam_ratio, hull_diameter(c) / scale);

    // Centres: every hull vertex (strided for large levels) plus random points of K.
    std::vector<Pt> centers;
    std::size_t stride = std::max<std::size_t>(1, cells.size() / 256);
    for (std::size_t i = 0; i < cells.size(); i += stride) {
      for (const auto& v : cells[i].hull) centers.push_back(v);
    }
    StreamRng rng(0x6b696761ULL, static_cast<std::uint64_t>(m));
    for (int s = 0; s < 256; ++s) {
      std::vector<int> addr(static_cast<std::size_t>(m + 12));
      for (auto& a : addr) a = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(g.maps));
      centers.push_back(apply_address(g, addr));
    }
    double radius = std::pow(g.r, m);
    for (const auto& x : centers) {
      int count = 0;
      for (const auto& c : cells) {
        if (hull_distance(x, c) < radius * (1.0 - 1e-12)) ++count;
      }
      level.max_overlap = std::max(level.max_overlap, count);
    }
    report.diameter_ok = report.diameter_ok && level.max_diam_ratio <= 1.0 + 1e-12;
    report.overlap_ok = report.overlap_ok && level.max_overlap <= g.D;
    report.levels.push_back(level);
  }
  return report;
}

}  // namespace gdm
