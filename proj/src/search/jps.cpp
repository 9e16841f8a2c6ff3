#include "mfp/search/jps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace mfp::search {

const std::array<Move, 26>& moves() {
  static const std::array<Move, 26> table = [] {
    std::array<Move, 26> t{};
    int k = 0;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          const int dim = std::abs(dx) + std::abs(dy) + std::abs(dz);
          t[k++] = Move{{dx, dy, dz}, dim, std::sqrt(static_cast<double>(dim))};
        }
    return t;
  }();
  return table;
}

namespace {

int move_index(const Index3& d) {
  const int code = (d.x + 1) + 3 * (d.y + 1) + 9 * (d.z + 1);
  return code < 13 ? code : code - 1;
}

// Non-empty component subsets of d, i.e. the cells a move must keep clear.
std::vector<Index3> clearance_cells(const Index3& d) {
  std::vector<Index3> out;
  for (int m = 1; m < 8; ++m) {
    Index3 c{(m & 1) ? d.x : 0, (m & 2) ? d.y : 0, (m & 4) ? d.z : 0};
    bool valid = true;
    for (int a = 0; a < 3; ++a)
      if (((m >> a) & 1) && d[a] == 0) valid = false;
    if (valid) out.push_back(c);
  }
  return out;
}

/**
 * Pruning rules for one arrival direction.
 *
 * Neighbour n = x + d' of a node x entered from p = x - d is pruned when some
 * path p -> n avoiding x is strictly shorter than p -> x -> n, or equally long
 * and takes a higher-dimensional move first (diagonal-first canonical order).
 * Alternatives of up to two moves are enumerated; each is stored as the set of
 * cells that must be free for it to exist. All cells live in the 4x4x4 (at
 * most) box spanned by the neighbourhoods of p and x, encoded as 64-bit masks.
 */
struct ArrivalRules {
  Index3 box_min;
  std::vector<Index3> cells;  // relevant cells, bit i <-> cells[i]
  std::uint64_t all_bits = 0;
  struct Candidate {
    int move = 0;
    std::uint64_t legal = 0;
    std::vector<std::uint64_t> alternatives;
  };
  std::vector<int> natural;              // natural successor moves (incl. d)
  std::vector<int> sub_moves;            // natural moves other than d
  std::vector<Candidate> non_natural;    // potential forced successors
};

struct RuleTable {
  std::array<ArrivalRules, 26> by_arrival;
};

const RuleTable& rules() {
  static const RuleTable table = [] {
    RuleTable t;
    const auto& mv = moves();
    constexpr double kEps = 1e-9;
    for (int di = 0; di < 26; ++di) {
      const Move& md = mv[di];
      ArrivalRules& r = t.by_arrival[di];
      for (int a = 0; a < 3; ++a) r.box_min[a] = md.d[a] == 1 ? -2 : -1;
      auto bit = [&](const Index3& off) -> std::uint64_t {
        int code = 0;
        int mul = 1;
        for (int a = 0; a < 3; ++a) {
          code += (off[a] - r.box_min[a]) * mul;
          mul *= 4;
        }
        return std::uint64_t{1} << code;
      };
      auto cells_mask = [&](const Index3& from, const Index3& d) {
        std::uint64_t m = 0;
        for (const Index3& c : clearance_cells(d)) {
          const Index3 cell = from + c;
          if (cell == Index3{}) continue;  // x itself is known free
          m |= bit(cell);
        }
        return m;
      };

      const Index3 p = Index3{} - md.d;
      for (int ni = 0; ni < 26; ++ni) {
        const Move& mn = mv[ni];
        const Index3 n = mn.d;
        ArrivalRules::Candidate cand;
        cand.move = ni;
        cand.legal = cells_mask({}, n);
        const double via = md.cost + mn.cost;
        bool always_pruned = n == p;
        // One-move alternatives p -> n.
        const Index3 e = n - p;
        if (!always_pruned && std::max({std::abs(e.x), std::abs(e.y), std::abs(e.z)}) <= 1 &&
            !(e == Index3{})) {
          const Move& me = mv[move_index(e)];
          if (me.cost < via - kEps) cand.alternatives.push_back(cells_mask(p, e));
        }
        // Two-move alternatives p -> m -> n with m != x.
        for (int e1 = 0; e1 < 26 && !always_pruned; ++e1) {
          const Index3 m = p + mv[e1].d;
          if (m == Index3{}) continue;
          const Index3 e2 = n - m;
          if (std::max({std::abs(e2.x), std::abs(e2.y), std::abs(e2.z)}) > 1 ||
              e2 == Index3{}) {
            continue;
          }
          const double c = mv[e1].cost + mv[move_index(e2)].cost;
          const bool shorter = c < via - kEps;
          const bool preferred = std::abs(c - via) <= kEps && mv[e1].dim > md.dim;
          if (!shorter && !preferred) continue;
          cand.alternatives.push_back(cells_mask(p, mv[e1].d) | cells_mask(m, e2) | bit(m));
        }
        if (always_pruned) continue;
        if (cand.alternatives.empty()) {
          r.natural.push_back(ni);
          if (ni != di) r.sub_moves.push_back(ni);
        } else {
          r.non_natural.push_back(std::move(cand));
        }
      }
      // Relevant cells are those any legality or alternative test reads.
      std::uint64_t used = 0;
      for (const auto& c : r.non_natural) {
        used |= c.legal;
        for (auto a : c.alternatives) used |= a;
      }
      for (int code = 0; code < 64; ++code) {
        if (!((used >> code) & 1)) continue;
        r.cells.push_back({r.box_min.x + code % 4, r.box_min.y + (code / 4) % 4,
                           r.box_min.z + code / 16});
      }
      // Remap masks from box codes to compact indices in `cells`.
      auto compact = [&](std::uint64_t m) {
        std::uint64_t out = 0;
        int k = 0;
        for (int code = 0; code < 64; ++code) {
          if (!((used >> code) & 1)) continue;
          if ((m >> code) & 1) out |= std::uint64_t{1} << k;
          ++k;
        }
        return out;
      };
      for (auto& c : r.non_natural) {
        c.legal = compact(c.legal);
        for (auto& a : c.alternatives) a = compact(a);
      }
      r.all_bits = r.cells.size() == 64 ? ~std::uint64_t{0}
                                        : (std::uint64_t{1} << r.cells.size()) - 1;
    }
    return t;
  }();
  return table;
}

struct NodeRecord {
  double g = 0.0;
  std::size_t parent = 0;
  int arrival = -1;  // move index used to reach this node, -1 for start
  bool closed = false;
};

class JumpPointSearch {
 public:
  JumpPointSearch(const OccupancyMask& mask, const std::uint8_t* raw, std::size_t goal,
                  JpsStats& stats)
      : mask_(mask), raw_(raw), goal_(goal), stats_(stats) {
    const auto& rt = rules();
    const auto& mv = moves();
    for (int d = 0; d < 26; ++d) {
      step_[d] = mask.offset(mv[d].d);
      for (const Index3& c : clearance_cells(mv[d].d)) legal_offsets_[d].push_back(mask.offset(c));
      for (const Index3& c : rt.by_arrival[d].cells) cell_offsets_[d].push_back(mask.offset(c));
    }
  }

  bool legal(std::size_t x, int d) const {
    for (auto off : legal_offsets_[d])
      if (raw_[x + off]) return false;
    return true;
  }

  std::uint64_t free_bits(std::size_t x, int d) const {
    std::uint64_t f = 0;
    const auto& offs = cell_offsets_[d];
    for (std::size_t i = 0; i < offs.size(); ++i)
      if (!raw_[x + offs[i]]) f |= std::uint64_t{1} << i;
    return f;
  }

  static bool is_forced(const ArrivalRules::Candidate& c, std::uint64_t free) {
    if ((c.legal & free) != c.legal) return false;
    for (auto a : c.alternatives)
      if ((a & free) == a) return false;
    return true;
  }

  bool has_forced(std::size_t x, int d) const {
    const ArrivalRules& r = rules().by_arrival[d];
    const std::uint64_t free = free_bits(x, d);
    if (free == r.all_bits) return false;
    for (const auto& c : r.non_natural)
      if (is_forced(c, free)) return true;
    return false;
  }

  void successors(std::size_t x, int arrival, std::vector<int>& out) const {
    out.clear();
    if (arrival < 0) {
      for (int d = 0; d < 26; ++d)
        if (legal(x, d)) out.push_back(d);
      return;
    }
    const ArrivalRules& r = rules().by_arrival[arrival];
    for (int d : r.natural)
      if (legal(x, d)) out.push_back(d);
    const std::uint64_t free = free_bits(x, arrival);
    if (free == r.all_bits) return;
    for (const auto& c : r.non_natural)
      if (is_forced(c, free)) out.push_back(c.move);
  }

  // Returns the next jump point from x along d, or npos.
  std::size_t jump(std::size_t x, int d) {
    const ArrivalRules& r = rules().by_arrival[d];
    for (;;) {
      if (!legal(x, d)) return kNone;
      const std::size_t n = x + step_[d];
      ++stats_.jump_steps;
      if (n == goal_) return n;
      if (has_forced(n, d)) return n;
      for (int sub : r.sub_moves)
        if (jump(n, sub) != kNone) return n;
      x = n;
    }
  }

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

 private:
  const OccupancyMask& mask_;
  const std::uint8_t* raw_;
  std::size_t goal_;
  JpsStats& stats_;
  std::array<std::ptrdiff_t, 26> step_{};
  std::array<std::vector<std::ptrdiff_t>, 26> legal_offsets_;
  std::array<std::vector<std::ptrdiff_t>, 26> cell_offsets_;
};

Index3 unpad(const OccupancyMask& mask, std::size_t idx) {
  const std::size_t sy = static_cast<std::size_t>(mask.dims().x + 2 * OccupancyMask::kPad);
  const std::size_t sz = sy * static_cast<std::size_t>(mask.dims().y + 2 * OccupancyMask::kPad);
  const int z = static_cast<int>(idx / sz);
  const std::size_t rem = idx % sz;
  const int y = static_cast<int>(rem / sy);
  const int x = static_cast<int>(rem % sy);
  return {x - OccupancyMask::kPad, y - OccupancyMask::kPad, z - OccupancyMask::kPad};
}

}  // namespace

bool move_legal(const OccupancyMask& mask, const Index3& from, const Index3& d) {
  for (const Index3& c : clearance_cells(d))
    if (mask.blocked(from + c)) return false;
  return true;
}

double lattice_distance(const Index3& a, const Index3& b) {
  std::array<int, 3> v{std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)};
  std::sort(v.begin(), v.end());  // v[0] <= v[1] <= v[2]
  static const double kS2 = std::sqrt(2.0);
  static const double kS3 = std::sqrt(3.0);
  return kS3 * v[0] + kS2 * (v[1] - v[0]) + (v[2] - v[1]);
}

double index_path_length(const std::vector<Index3>& path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) len += lattice_distance(path[i - 1], path[i]);
  return len;
}

std::optional<std::vector<Index3>> jps_search_index(const OccupancyMask& mask,
                                                    const Index3& start, const Index3& goal,
                                                    JpsStats* stats) {
  JpsStats local;
  JpsStats& st = stats ? *stats : local;
  if (!mask.in_bounds(start) || !mask.in_bounds(goal)) {
    throw PlanningError(PlanningError::Code::OutOfBounds, "jps endpoint outside mask");
  }
  if (mask.blocked(goal)) return std::nullopt;
  if (start == goal) return std::vector<Index3>{start};

  // A blocked start is searched on a copy with the start cleared.
  const std::uint8_t* raw = mask.raw();
  std::optional<OccupancyMask> cleared;
  if (mask.blocked(start)) {
    cleared = mask;
    cleared->set_blocked(start, false);
    raw = cleared->raw();
  }
  const OccupancyMask& m = cleared ? *cleared : mask;

  const std::size_t s = m.padded(start);
  const std::size_t g = m.padded(goal);
  JumpPointSearch jps(m, raw, g, st);

  // Search states are (cell, arrival move): pruning depends on the arrival, so
  // equal-cost arrivals from different directions are kept apart. States that
  // are strictly worse than the best known cost of their cell are dropped.
  auto key = [](std::size_t cell, int arrival) {
    return cell * 27 + static_cast<std::size_t>(arrival + 1);
  };
  std::unordered_map<std::size_t, NodeRecord> nodes;
  std::unordered_map<std::size_t, double> best_g;
  nodes.reserve(1024);
  best_g.reserve(1024);
  struct OpenEntry {
    double f;
    double g;
    std::size_t state;
    bool operator<(const OpenEntry& o) const {
      if (f != o.f) return f > o.f;
      if (g != o.g) return g < o.g;
      return state > o.state;
    }
  };
  std::priority_queue<OpenEntry> open;
  const std::size_t s_key = key(s, -1);
  nodes[s_key] = NodeRecord{0.0, s_key, -1, false};
  best_g[s] = 0.0;
  open.push({lattice_distance(start, goal), 0.0, s_key});

  std::vector<int> succ;
  const auto& mv = moves();
  std::optional<std::size_t> goal_state;
  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    NodeRecord& rec = nodes[top.state];
    if (rec.closed || top.g > rec.g) continue;
    const std::size_t cell = top.state / 27;
    if (rec.g > best_g[cell] + 1e-9) continue;
    rec.closed = true;
    ++st.expansions;
    if (cell == g) {
      goal_state = top.state;
      break;
    }

    const Index3 xi = unpad(m, cell);
    jps.successors(cell, rec.arrival, succ);
    const double gx = rec.g;
    for (int d : succ) {
      const std::size_t y = jps.jump(cell, d);
      if (y == JumpPointSearch::kNone) continue;
      const Index3 yi = unpad(m, y);
      const int steps = std::max({std::abs(yi.x - xi.x), std::abs(yi.y - xi.y),
                                  std::abs(yi.z - xi.z)});
      const double ng = gx + steps * mv[d].cost;
      auto bit = best_g.find(y);
      if (bit == best_g.end()) {
        best_g.emplace(y, ng);
      } else if (ng > bit->second + 1e-9) {
        continue;
      } else {
        bit->second = std::min(bit->second, ng);
      }
      const std::size_t y_key = key(y, d);
      auto it = nodes.find(y_key);
      if (it == nodes.end()) {
        nodes.emplace(y_key, NodeRecord{ng, top.state, d, false});
      } else if (!it->second.closed && ng < it->second.g - 1e-12) {
        it->second = NodeRecord{ng, top.state, d, false};
      } else {
        continue;
      }
      open.push({ng + lattice_distance(yi, goal), ng, y_key});
    }
  }

  if (!goal_state) return std::nullopt;

  std::vector<Index3> rev;
  std::vector<int> arrivals;
  for (std::size_t cur = *goal_state;;) {
    const NodeRecord& r = nodes[cur];
    rev.push_back(unpad(m, cur / 27));
    arrivals.push_back(r.arrival);
    if (cur == s_key) break;
    cur = r.parent;
  }
  std::reverse(rev.begin(), rev.end());
  std::reverse(arrivals.begin(), arrivals.end());
  // Drop interior points where the direction does not change.
  std::vector<Index3> out;
  out.push_back(rev.front());
  for (std::size_t i = 1; i + 1 < rev.size(); ++i) {
    if (arrivals[i] != arrivals[i + 1]) out.push_back(rev[i]);
  }
  out.push_back(rev.back());
  return out;
}

std::optional<GridPath> jps_search(const OccupancyMask& mask, const Vec3& start,
                                   const Vec3& goal, JpsStats* stats) {
  auto si = mask.world_to_index(start);
  auto gi = mask.world_to_index(goal);
  if (!si || !gi) {
    std::ostringstream os;
    os << "jps endpoint outside mask: start (" << start.transpose() << ") goal ("
       << goal.transpose() << ")";
    throw PlanningError(PlanningError::Code::OutOfBounds, os.str());
  }
  Index3 target = *gi;
  if (mask.blocked(target)) {
    auto alt = nearest_unblocked(mask, target);
    if (!alt) return std::nullopt;
    target = *alt;
  }
  auto idx_path = jps_search_index(mask, *si, target, stats);
  if (!idx_path) return std::nullopt;
  GridPath path;
  path.waypoints.reserve(idx_path->size() + 1);
  for (const Index3& i : *idx_path) path.waypoints.push_back(mask.center(i));
  if (path.waypoints.size() == 1) path.waypoints.push_back(path.waypoints.front());
  return path;
}

}  // namespace mfp::search
