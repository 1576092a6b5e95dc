#include "llrp/neighborhoods.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace llrp {

namespace {

// Contiguous piece of a route (or a single customer) used to express the
// result of a move as a concatenation. The latency of a concatenation is
// computed in O(1) per piece from the route prefix caches: for a sequence
// piece we track the customer count, internal travel distance, internal
// cumulative latency (arrivals measured from the piece's first node) and
// demand, which compose under concatenation.
struct Seg {
  int first = -1, last = -1;
  int cnt = 0;
  double dist = 0.0, cum = 0.0, load = 0.0;
  bool empty() const { return first < 0; }
};

Seg seg_node(const Instance& inst, int v) { return {v, v, 1, 0.0, 0.0, inst.demand_of(v)}; }

Seg seg_depot(int d) { return {d, d, 0, 0.0, 0.0, 0.0}; }

// depot .. c_i (i may be 0: depot only)
Seg seg_prefix(const Route& r, int i) {
  Seg s;
  s.first = r.depot;
  s.last = (i == 0) ? r.depot : r.seq[i - 1];
  s.cnt = i;
  s.dist = r.arr[i];
  s.cum = r.cum[i];
  s.load = r.dload[i];
  return s;
}

// c_i .. c_j forward (1-based, inclusive); empty when i > j
Seg seg_fwd(const Route& r, int i, int j) {
  if (i > j) return {};
  Seg s;
  s.first = r.seq[i - 1];
  s.last = r.seq[j - 1];
  s.cnt = j - i + 1;
  s.dist = r.arr[j] - r.arr[i];
  s.cum = (r.cum[j] - r.cum[i - 1]) - s.cnt * r.arr[i];
  s.load = r.dload[j] - r.dload[i - 1];
  return s;
}

// c_j .. c_i reversed
Seg seg_rev(const Route& r, int i, int j) {
  if (i > j) return {};
  Seg s;
  s.first = r.seq[j - 1];
  s.last = r.seq[i - 1];
  s.cnt = j - i + 1;
  s.dist = r.arr[j] - r.arr[i];
  s.cum = s.cnt * r.arr[j] - (r.cum[j] - r.cum[i - 1]);
  s.load = r.dload[j] - r.dload[i - 1];
  return s;
}

Seg cat(const Instance& inst, const Seg& a, const Seg& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  Seg s;
  const double link = inst.dist(a.last, b.first);
  s.first = a.first;
  s.last = b.last;
  s.cnt = a.cnt + b.cnt;
  s.dist = a.dist + link + b.dist;
  s.cum = a.cum + b.cnt * (a.dist + link) + b.cum;
  s.load = a.load + b.load;
  return s;
}

struct Piece {
  enum Kind { Fwd, Rev, Node } kind;
  int src;   // source route index
  int i, j;  // for Fwd/Rev
  int node;  // for Node
};

struct RoutePlan {
  int route = -1;
  int new_depot = -1;  // -1 keeps the current depot
  int prefix_len = 0;  // customers of the rebuilt route kept in place
  int n_pieces = 0;
  Piece pieces[4];

  void fwd(int src, int i, int j) {
    if (i <= j) pieces[n_pieces++] = {Piece::Fwd, src, i, j, 0};
  }
  void rev(int src, int i, int j) {
    if (i <= j) pieces[n_pieces++] = {Piece::Rev, src, i, j, 0};
  }
  void node(int v) { pieces[n_pieces++] = {Piece::Node, 0, 0, 0, v}; }
};

struct MovePlan {
  int n = 0;
  RoutePlan rp[2];
  RoutePlan& add(int route) {
    rp[n].route = route;
    return rp[n++];
  }
};

Seg compose(const Solution& sol, const Instance& inst, const RoutePlan& p) {
  const Route& r = sol.routes[p.route];
  Seg acc = (p.new_depot < 0) ? seg_prefix(r, p.prefix_len) : seg_depot(p.new_depot);
  for (int t = 0; t < p.n_pieces; ++t) {
    const Piece& pc = p.pieces[t];
    switch (pc.kind) {
      case Piece::Fwd: acc = cat(inst, acc, seg_fwd(sol.routes[pc.src], pc.i, pc.j)); break;
      case Piece::Rev: acc = cat(inst, acc, seg_rev(sol.routes[pc.src], pc.i, pc.j)); break;
      case Piece::Node: acc = cat(inst, acc, seg_node(inst, pc.node)); break;
    }
  }
  return acc;
}

void materialize(const Solution& sol, const RoutePlan& p, std::vector<int>& out) {
  out.clear();
  const Route& r = sol.routes[p.route];
  for (int k = 0; k < p.prefix_len; ++k) out.push_back(r.seq[k]);
  for (int t = 0; t < p.n_pieces; ++t) {
    const Piece& pc = p.pieces[t];
    const Route& src = sol.routes[pc.src];
    switch (pc.kind) {
      case Piece::Fwd:
        for (int k = pc.i; k <= pc.j; ++k) out.push_back(src.seq[k - 1]);
        break;
      case Piece::Rev:
        for (int k = pc.j; k >= pc.i; --k) out.push_back(src.seq[k - 1]);
        break;
      case Piece::Node: out.push_back(pc.node); break;
    }
  }
}

// Translates a move into rebuild plans for the affected routes. Returns
// false for structurally illegal or no-op parameter combinations. Depot
// moves (kind 2, variants 1/2) are handled outside the plan machinery.
bool plan_move(const Solution& sol, const Move& m, MovePlan& plan) {
  const int nr = static_cast<int>(sol.routes.size());
  auto in_range = [&](int r) { return r >= 0 && r < nr; };
  switch (m.kind) {
    case 1: {  // relocate customer (r1, a) to slot after position b of r2
      if (!in_range(m.r1) || !in_range(m.r2)) return false;
      const Route& r1 = sol.routes[m.r1];
      const Route& r2 = sol.routes[m.r2];
      const int n1 = r1.size(), n2 = r2.size();
      if (m.a < 1 || m.a > n1) return false;
      const int u = r1.seq[m.a - 1];
      if (m.r1 == m.r2) {
        if (m.b < 0 || m.b > n1) return false;
        if (m.b == m.a || m.b == m.a - 1) return false;
        auto& p = plan.add(m.r1);
        if (m.b < m.a) {
          p.prefix_len = m.b;
          p.node(u);
          p.fwd(m.r1, m.b + 1, m.a - 1);
          p.fwd(m.r1, m.a + 1, n1);
        } else {
          p.prefix_len = m.a - 1;
          p.fwd(m.r1, m.a + 1, m.b);
          p.node(u);
          p.fwd(m.r1, m.b + 1, n1);
        }
      } else {
        if (n1 < 2) return false;  // source route must stay non-empty
        if (m.b < 0 || m.b > n2) return false;
        auto& p1 = plan.add(m.r1);
        p1.prefix_len = m.a - 1;
        p1.fwd(m.r1, m.a + 1, n1);
        auto& p2 = plan.add(m.r2);
        p2.prefix_len = m.b;
        p2.node(u);
        p2.fwd(m.r2, m.b + 1, n2);
      }
      return true;
    }
    case 2: {  // customer swap (r1, a) <-> (r2, b)
      if (m.variant != 0) return false;
      if (!in_range(m.r1) || !in_range(m.r2)) return false;
      const Route& r1 = sol.routes[m.r1];
      const Route& r2 = sol.routes[m.r2];
      if (m.a < 1 || m.a > r1.size() || m.b < 1 || m.b > r2.size()) return false;
      if (m.r1 == m.r2) {
        if (m.a == m.b) return false;
        const int i = std::min(m.a, m.b), j = std::max(m.a, m.b);
        auto& p = plan.add(m.r1);
        p.prefix_len = i - 1;
        p.node(r1.seq[j - 1]);
        p.fwd(m.r1, i + 1, j - 1);
        p.node(r1.seq[i - 1]);
        p.fwd(m.r1, j + 1, r1.size());
      } else {
        auto& p1 = plan.add(m.r1);
        p1.prefix_len = m.a - 1;
        p1.node(r2.seq[m.b - 1]);
        p1.fwd(m.r1, m.a + 1, r1.size());
        auto& p2 = plan.add(m.r2);
        p2.prefix_len = m.b - 1;
        p2.node(r1.seq[m.a - 1]);
        p2.fwd(m.r2, m.b + 1, r2.size());
      }
      return true;
    }
    case 3: {
      if (!in_range(m.r1)) return false;
      const Route& r1 = sol.routes[m.r1];
      const int n1 = r1.size();
      if (m.variant == 0) {  // intra-route 2-opt: reverse a+1..b
        if (m.a < 0 || m.b > n1 || m.b < m.a + 2) return false;
        auto& p = plan.add(m.r1);
        p.prefix_len = m.a;
        p.rev(m.r1, m.a + 1, m.b);
        p.fwd(m.r1, m.b + 1, n1);
        return true;
      }
      // 2-opt*: exchange tails after positions a / b
      if (!in_range(m.r2) || m.r1 == m.r2) return false;
      const Route& r2 = sol.routes[m.r2];
      const int n2 = r2.size();
      if (m.a < 0 || m.a > n1 || m.b < 0 || m.b > n2) return false;
      if (m.a == n1 && m.b == n2) return false;            // no-op
      if (m.a + (n2 - m.b) < 1 || m.b + (n1 - m.a) < 1) return false;  // empty route
      auto& p1 = plan.add(m.r1);
      p1.prefix_len = m.a;
      p1.fwd(m.r2, m.b + 1, n2);
      auto& p2 = plan.add(m.r2);
      p2.prefix_len = m.b;
      p2.fwd(m.r1, m.a + 1, n1);
      return true;
    }
    case 4: {  // relocate the pair (a, a+1) of r1 after position b of r2
      if (!in_range(m.r1) || !in_range(m.r2)) return false;
      const Route& r1 = sol.routes[m.r1];
      const Route& r2 = sol.routes[m.r2];
      const int n1 = r1.size(), n2 = r2.size();
      if (m.a < 1 || m.a + 1 > n1) return false;
      if (m.r1 == m.r2) {
        if (m.b < 0 || m.b > n1) return false;
        if (m.b >= m.a - 1 && m.b <= m.a + 1) return false;
        auto& p = plan.add(m.r1);
        if (m.b < m.a) {
          p.prefix_len = m.b;
          p.fwd(m.r1, m.a, m.a + 1);
          p.fwd(m.r1, m.b + 1, m.a - 1);
          p.fwd(m.r1, m.a + 2, n1);
        } else {
          p.prefix_len = m.a - 1;
          p.fwd(m.r1, m.a + 2, m.b);
          p.fwd(m.r1, m.a, m.a + 1);
          p.fwd(m.r1, m.b + 1, n1);
        }
      } else {
        if (n1 < 3) return false;
        if (m.b < 0 || m.b > n2) return false;
        auto& p1 = plan.add(m.r1);
        p1.prefix_len = m.a - 1;
        p1.fwd(m.r1, m.a + 2, n1);
        auto& p2 = plan.add(m.r2);
        p2.prefix_len = m.b;
        p2.fwd(m.r1, m.a, m.a + 1);
        p2.fwd(m.r2, m.b + 1, n2);
      }
      return true;
    }
    case 5: {  // node (r1, a) <-> arc (r2, b, b+1)
      if (!in_range(m.r1) || !in_range(m.r2)) return false;
      const Route& r1 = sol.routes[m.r1];
      const Route& r2 = sol.routes[m.r2];
      const int n1 = r1.size(), n2 = r2.size();
      if (m.a < 1 || m.a > n1 || m.b < 1 || m.b + 1 > n2) return false;
      const int u = r1.seq[m.a - 1];
      if (m.r1 == m.r2) {
        if (m.a >= m.b && m.a <= m.b + 1) return false;
        auto& p = plan.add(m.r1);
        if (m.a < m.b) {
          p.prefix_len = m.a - 1;
          p.fwd(m.r1, m.b, m.b + 1);
          p.fwd(m.r1, m.a + 1, m.b - 1);
          p.node(u);
          p.fwd(m.r1, m.b + 2, n1);
        } else {
          p.prefix_len = m.b - 1;
          p.node(u);
          p.fwd(m.r1, m.b + 2, m.a - 1);
          p.fwd(m.r1, m.b, m.b + 1);
          p.fwd(m.r1, m.a + 1, n1);
        }
      } else {
        auto& p1 = plan.add(m.r1);
        p1.prefix_len = m.a - 1;
        p1.fwd(m.r2, m.b, m.b + 1);
        p1.fwd(m.r1, m.a + 1, n1);
        auto& p2 = plan.add(m.r2);
        p2.prefix_len = m.b - 1;
        p2.node(u);
        p2.fwd(m.r2, m.b + 2, n2);
      }
      return true;
    }
    case 6: {  // arc (r1, a, a+1) <-> arc (r2, b, b+1)
      if (!in_range(m.r1) || !in_range(m.r2)) return false;
      const Route& r1 = sol.routes[m.r1];
      const Route& r2 = sol.routes[m.r2];
      const int n1 = r1.size(), n2 = r2.size();
      if (m.a < 1 || m.a + 1 > n1 || m.b < 1 || m.b + 1 > n2) return false;
      if (m.r1 == m.r2) {
        const int i = std::min(m.a, m.b), j = std::max(m.a, m.b);
        if (j < i + 2) return false;  // overlapping arcs
        auto& p = plan.add(m.r1);
        p.prefix_len = i - 1;
        p.fwd(m.r1, j, j + 1);
        p.fwd(m.r1, i + 2, j - 1);
        p.fwd(m.r1, i, i + 1);
        p.fwd(m.r1, j + 2, n1);
      } else {
        auto& p1 = plan.add(m.r1);
        p1.prefix_len = m.a - 1;
        p1.fwd(m.r2, m.b, m.b + 1);
        p1.fwd(m.r1, m.a + 2, n1);
        auto& p2 = plan.add(m.r2);
        p2.prefix_len = m.b - 1;
        p2.fwd(m.r1, m.a, m.a + 1);
        p2.fwd(m.r2, m.b + 2, n2);
      }
      return true;
    }
    case 7: {  // swap*: u=(r1,a) and v=(r2,b) exchanged, best-slot inserts
      if (!in_range(m.r1) || !in_range(m.r2) || m.r1 == m.r2) return false;
      const Route& r1 = sol.routes[m.r1];
      const Route& r2 = sol.routes[m.r2];
      const int n1 = r1.size(), n2 = r2.size();
      if (m.a < 1 || m.a > n1 || m.b < 1 || m.b > n2) return false;
      if (m.c < 0 || m.c > n1 || m.c == m.a) return false;
      if (m.d < 0 || m.d > n2 || m.d == m.b) return false;
      const int u = r1.seq[m.a - 1];
      const int v = r2.seq[m.b - 1];
      auto& p1 = plan.add(m.r1);
      if (m.c < m.a) {
        p1.prefix_len = m.c;
        p1.node(v);
        p1.fwd(m.r1, m.c + 1, m.a - 1);
        p1.fwd(m.r1, m.a + 1, n1);
      } else {
        p1.prefix_len = m.a - 1;
        p1.fwd(m.r1, m.a + 1, m.c);
        p1.node(v);
        p1.fwd(m.r1, m.c + 1, n1);
      }
      auto& p2 = plan.add(m.r2);
      if (m.d < m.b) {
        p2.prefix_len = m.d;
        p2.node(u);
        p2.fwd(m.r2, m.d + 1, m.b - 1);
        p2.fwd(m.r2, m.b + 1, n2);
      } else {
        p2.prefix_len = m.b - 1;
        p2.fwd(m.r2, m.b + 1, m.d);
        p2.node(u);
        p2.fwd(m.r2, m.d + 1, n2);
      }
      return true;
    }
    default: return false;
  }
}

double route_first_link_delta(const Instance& inst, const Route& r, int new_depot) {
  if (r.seq.empty()) return 0.0;
  // Every arrival shifts by the change of the first leg.
  return r.size() * (inst.dist(new_depot, r.seq.front()) - inst.dist(r.depot, r.seq.front()));
}

}  // namespace

bool routes_overlap(const Solution& sol, const Instance& inst, int r1, int r2) {
  auto circle = [&](const Route& r) {
    double cx = 0, cy = 0;
    for (int v : r.seq) {
      cx += inst.xs[v];
      cy += inst.ys[v];
    }
    cx /= r.size();
    cy /= r.size();
    double rad = 0;
    for (int v : r.seq) {
      double dx = inst.xs[v] - cx, dy = inst.ys[v] - cy;
      rad = std::max(rad, std::sqrt(dx * dx + dy * dy));
    }
    return std::tuple<double, double, double>(cx, cy, rad);
  };
  auto [x1, y1, rad1] = circle(sol.routes[r1]);
  auto [x2, y2, rad2] = circle(sol.routes[r2]);
  double dx = x1 - x2, dy = y1 - y2;
  return std::sqrt(dx * dx + dy * dy) <= rad1 + rad2;
}

bool eval_move(const Solution& sol, const Instance& inst, Move& m) {
  if (m.kind == 2 && m.variant == 1) {  // exchange the depots of two routes
    if (m.r1 < 0 || m.r2 < 0 || m.r1 == m.r2) return false;
    const Route& r1 = sol.routes[m.r1];
    const Route& r2 = sol.routes[m.r2];
    if (r1.depot == r2.depot) return false;
    m.delta_obj =
        route_first_link_delta(inst, r1, r2.depot) + route_first_link_delta(inst, r2, r1.depot);
    m.delta_violation = 0.0;
    return true;
  }
  if (m.kind == 2 && m.variant == 2) {  // replace open depot a with closed depot b
    if (!inst.is_depot(m.a) || !inst.is_depot(m.b) || m.a == m.b) return false;
    if (!std::binary_search(sol.open_depots.begin(), sol.open_depots.end(), m.a)) return false;
    if (std::binary_search(sol.open_depots.begin(), sol.open_depots.end(), m.b)) return false;
    double d = 0.0;
    for (const auto& r : sol.routes)
      if (r.depot == m.a) d += route_first_link_delta(inst, r, m.b);
    m.delta_obj = d;
    m.delta_violation = 0.0;
    return true;
  }
  if (m.kind == 2 && m.variant == 3) {  // re-anchor route r1 to open depot a
    if (m.r1 < 0 || m.r1 >= static_cast<int>(sol.routes.size())) return false;
    if (!inst.is_depot(m.a)) return false;
    if (!std::binary_search(sol.open_depots.begin(), sol.open_depots.end(), m.a)) return false;
    if (sol.routes[m.r1].depot == m.a) return false;
    m.delta_obj = route_first_link_delta(inst, sol.routes[m.r1], m.a);
    m.delta_violation = 0.0;
    return true;
  }
  MovePlan plan;
  if (!plan_move(sol, m, plan)) return false;
  double dobj = 0.0, dviol = 0.0;
  for (int t = 0; t < plan.n; ++t) {
    const RoutePlan& rp = plan.rp[t];
    const Route& orig = sol.routes[rp.route];
    Seg s = compose(sol, inst, rp);
    dobj += s.cum - orig.latency();
    dviol += std::max(0.0, s.load - inst.capacity) - std::max(0.0, orig.load() - inst.capacity);
  }
  m.delta_obj = dobj;
  m.delta_violation = dviol;
  return true;
}

MoveUndo apply_move(Solution& sol, const Instance& inst, const Move& m) {
  MoveUndo undo;
  undo.saved_objective = sol.objective;
  undo.saved_open = sol.open_depots;
  if (m.kind == 2 && m.variant == 1) {
    undo.saved_routes.emplace_back(m.r1, sol.routes[m.r1]);
    undo.saved_routes.emplace_back(m.r2, sol.routes[m.r2]);
    std::swap(sol.routes[m.r1].depot, sol.routes[m.r2].depot);
    sol.routes[m.r1].refresh(inst);
    sol.routes[m.r2].refresh(inst);
  } else if (m.kind == 2 && m.variant == 2) {
    for (std::size_t i = 0; i < sol.routes.size(); ++i)
      if (sol.routes[i].depot == m.a) {
        undo.saved_routes.emplace_back(static_cast<int>(i), sol.routes[i]);
        sol.routes[i].depot = m.b;
        sol.routes[i].refresh(inst);
      }
    for (int& d : sol.open_depots)
      if (d == m.a) d = m.b;
    std::sort(sol.open_depots.begin(), sol.open_depots.end());
  } else if (m.kind == 2 && m.variant == 3) {
    undo.saved_routes.emplace_back(m.r1, sol.routes[m.r1]);
    sol.routes[m.r1].depot = m.a;
    sol.routes[m.r1].refresh(inst);
  } else {
    MovePlan plan;
    if (!plan_move(sol, m, plan)) throw std::logic_error("apply_move on an illegal move");
    std::vector<int> seqs[2];
    for (int t = 0; t < plan.n; ++t) materialize(sol, plan.rp[t], seqs[t]);
    for (int t = 0; t < plan.n; ++t) {
      const RoutePlan& rp = plan.rp[t];
      undo.saved_routes.emplace_back(rp.route, sol.routes[rp.route]);
      sol.routes[rp.route].seq = std::move(seqs[t]);
      if (rp.new_depot >= 0) sol.routes[rp.route].depot = rp.new_depot;
      sol.routes[rp.route].refresh(inst);
    }
  }
  double f = 0.0;
  for (const auto& r : sol.routes) f += r.latency();
  sol.objective = f;
  return undo;
}

void undo_move(Solution& sol, const MoveUndo& undo) {
  for (const auto& [idx, route] : undo.saved_routes) sol.routes[idx] = route;
  sol.open_depots = undo.saved_open;
  sol.objective = undo.saved_objective;
}

namespace {

struct ExploreCtx {
  const Solution& sol;
  const Instance& inst;
  const ExploreOptions& opts;
  std::vector<int> route_of;  // per vertex; -1 for depots
  std::vector<int> pos_of;    // 1-based

  ExploreCtx(const Solution& s, const Instance& ins, const ExploreOptions& o)
      : sol(s), inst(ins), opts(o) {
    route_of.assign(ins.n_vertices(), -1);
    pos_of.assign(ins.n_vertices(), 0);
    for (std::size_t r = 0; r < s.routes.size(); ++r)
      for (std::size_t k = 0; k < s.routes[r].seq.size(); ++k) {
        route_of[s.routes[r].seq[k]] = static_cast<int>(r);
        pos_of[s.routes[r].seq[k]] = static_cast<int>(k) + 1;
      }
  }

  bool improving(Move& m) {
    if (!eval_move(sol, inst, m)) return false;
    if (opts.feasible_only) {
      if (opts.current_violation + m.delta_violation > 1e-9) return false;
      m.delta_pen = m.delta_obj;
    } else {
      m.delta_pen = m.delta_obj + opts.beta * m.delta_violation;
    }
    return m.delta_pen < -opts.improve_eps;
  }
};

Move mk(int kind, int variant, int r1, int a, int r2, int b, int c = 0, int d = 0) {
  Move m;
  m.kind = kind;
  m.variant = variant;
  m.r1 = r1;
  m.r2 = r2;
  m.a = a;
  m.b = b;
  m.c = c;
  m.d = d;
  return m;
}

// Best insertion slot (by resulting latency) for `node` into route `route`
// with the customer at removed_pos taken out. Slots use original indexing.
double best_insertion(const Solution& sol, const Instance& inst, int route, int removed_pos,
                      int node, int& best_slot) {
  const Route& r = sol.routes[route];
  const int n = r.size();
  double best = 0.0;
  best_slot = -1;
  for (int t = 0; t <= n; ++t) {
    if (t == removed_pos) continue;
    RoutePlan p;
    p.route = route;
    if (t < removed_pos) {
      p.prefix_len = t;
      p.node(node);
      p.fwd(route, t + 1, removed_pos - 1);
      p.fwd(route, removed_pos + 1, n);
    } else {
      p.prefix_len = removed_pos - 1;
      p.fwd(route, removed_pos + 1, t);
      p.node(node);
      p.fwd(route, t + 1, n);
    }
    double lat = compose(sol, inst, p).cum;
    if (best_slot < 0 || lat < best) {
      best = lat;
      best_slot = t;
    }
  }
  return best;
}

}  // namespace

std::optional<Move> explore(const Solution& sol, int k, const Instance& inst,
                            const ExploreOptions& opts, Rng& rng) {
  if (k < 1 || k > 7) throw std::invalid_argument("neighborhood id must be in 1..7");
  ExploreCtx ctx(sol, inst, opts);
  const int nr = static_cast<int>(sol.routes.size());

  // Routes grouped by depot, for candidates anchored at a depot neighbor.
  std::vector<std::vector<int>> routes_of_depot(inst.n_depots);
  for (int r = 0; r < nr; ++r) routes_of_depot[sol.routes[r].depot].push_back(r);

  std::vector<int> anchors;
  anchors.reserve(inst.n_customers + 1);
  for (int v = inst.n_depots; v < inst.n_vertices(); ++v) anchors.push_back(v);
  if (k == 2) anchors.push_back(-1);  // depot-move pass for N2
  rng.shuffle(anchors);

  Move m;
  auto hit = [&](Move cand) -> bool {
    m = cand;
    return ctx.improving(m);
  };

  // Swap* route geometry, computed lazily.
  std::vector<char> overlap_cache;
  auto overlap = [&](int r1, int r2) -> bool {
    if (overlap_cache.empty()) {
      overlap_cache.assign(static_cast<std::size_t>(nr) * nr, 2);
    }
    char& c = overlap_cache[static_cast<std::size_t>(r1) * nr + r2];
    if (c == 2) {
      c = routes_overlap(sol, inst, r1, r2) ? 1 : 0;
      overlap_cache[static_cast<std::size_t>(r2) * nr + r1] = c;
    }
    return c == 1;
  };

  for (int u : anchors) {
    if (u < 0) {
      // N2 depot moves: exchange the depots of two routes, or swap one open
      // depot for a closed one. Both keep |open_depots| unchanged.
      std::vector<std::pair<int, int>> pairs;
      for (int r1 = 0; r1 < nr; ++r1)
        for (int r2 = r1 + 1; r2 < nr; ++r2)
          if (sol.routes[r1].depot != sol.routes[r2].depot) pairs.emplace_back(r1, r2);
      rng.shuffle(pairs);
      for (auto [r1, r2] : pairs) {
        const Route& a = sol.routes[r1];
        const Route& b = sol.routes[r2];
        if (!inst.is_near(b.depot, a.seq.front()) && !inst.is_near(a.depot, b.seq.front()))
          continue;
        if (hit(mk(2, 1, r1, 0, r2, 0))) return m;
      }
      std::vector<std::pair<int, int>> oc;
      for (int open : sol.open_depots)
        for (int d = 0; d < inst.n_depots; ++d)
          if (!std::binary_search(sol.open_depots.begin(), sol.open_depots.end(), d))
            oc.emplace_back(open, d);
      rng.shuffle(oc);
      for (auto [open, closed] : oc) {
        bool near = false;
        for (int r : routes_of_depot[open])
          if (inst.is_near(closed, sol.routes[r].seq.front())) {
            near = true;
            break;
          }
        if (!near) continue;
        if (hit(mk(2, 2, 0, open, 0, closed))) return m;
      }
      std::vector<std::pair<int, int>> anchors2;  // (route, open depot)
      for (int r = 0; r < nr; ++r)
        for (int d : sol.open_depots)
          if (d != sol.routes[r].depot && inst.is_near(d, sol.routes[r].seq.front()))
            anchors2.emplace_back(r, d);
      rng.shuffle(anchors2);
      for (auto [r, d] : anchors2)
        if (hit(mk(2, 3, r, d, -1, 0))) return m;
      continue;
    }

    const int ru = ctx.route_of[u];
    const int iu = ctx.pos_of[u];
    const int nu = sol.routes[ru].size();

    for (int v : inst.neighbors_of(u)) {
      if (inst.is_depot(v)) {
        const int d = v;
        switch (k) {
          case 1:
            for (int r : routes_of_depot[d]) {
              if (hit(mk(1, 0, ru, iu, r, 0))) return m;
              if (hit(mk(1, 0, ru, iu, r, sol.routes[r].size()))) return m;
            }
            break;
          case 2:
            for (int r : routes_of_depot[d]) {
              if (sol.routes[r].seq.front() != u && hit(mk(2, 0, ru, iu, r, 1))) return m;
              if (sol.routes[r].seq.back() != u &&
                  hit(mk(2, 0, ru, iu, r, sol.routes[r].size())))
                return m;
            }
            break;
          case 3: {
            if (!opts.star_only && d == sol.routes[ru].depot) {
              if (nu >= iu + 1 && hit(mk(3, 0, ru, iu - 1, ru, nu))) return m;
              if (iu >= 2 && hit(mk(3, 0, ru, 0, ru, iu))) return m;
            }
            for (int r : routes_of_depot[d])
              if (r != ru && hit(mk(3, 1, r, 0, ru, iu - 1))) return m;
            if (d == sol.routes[ru].depot)
              for (int r2 = 0; r2 < nr; ++r2)
                if (r2 != ru && hit(mk(3, 1, ru, iu, r2, sol.routes[r2].size()))) return m;
            break;
          }
          case 4:
            for (int r : routes_of_depot[d]) {
              if (iu + 1 <= nu && hit(mk(4, 0, ru, iu, r, 0))) return m;
              if (iu >= 2 && hit(mk(4, 0, ru, iu - 1, r, sol.routes[r].size()))) return m;
            }
            break;
          case 5:
            for (int r : routes_of_depot[d]) {
              const int len = sol.routes[r].size();
              if (len >= 2) {
                if (hit(mk(5, 0, ru, iu, r, 1))) return m;
                if (hit(mk(5, 0, ru, iu, r, len - 1))) return m;
              }
              if (iu + 1 <= nu) {
                if (hit(mk(5, 0, r, 1, ru, iu))) return m;
              }
              if (iu >= 2) {
                if (hit(mk(5, 0, r, len, ru, iu - 1))) return m;
              }
            }
            break;
          case 6:
            for (int r : routes_of_depot[d]) {
              const int len = sol.routes[r].size();
              if (len < 2) continue;
              if (iu + 1 <= nu && hit(mk(6, 0, ru, iu, r, 1))) return m;
              if (iu >= 2 && hit(mk(6, 0, ru, iu - 1, r, len - 1))) return m;
            }
            break;
          default: break;  // N7 pairs customers only
        }
        continue;
      }

      const int rv = ctx.route_of[v];
      const int iv = ctx.pos_of[v];
      const int nv = sol.routes[rv].size();
      switch (k) {
        case 1:
          if (hit(mk(1, 0, ru, iu, rv, iv))) return m;      // u right after v
          if (hit(mk(1, 0, ru, iu, rv, iv - 1))) return m;  // u right before v
          break;
        case 2:
          if (iv + 1 <= nv && sol.routes[rv].seq[iv] != u) {
            if (hit(mk(2, 0, ru, iu, rv, iv + 1))) return m;  // u lands after v
          }
          if (iv >= 2 && sol.routes[rv].seq[iv - 2] != u) {
            if (hit(mk(2, 0, ru, iu, rv, iv - 1))) return m;  // u lands before v
          }
          break;
        case 3:
          if (rv == ru) {
            if (opts.star_only) break;
            const int lo = std::min(iu, iv), hi = std::max(iu, iv);
            if (hi - lo >= 2) {
              if (hit(mk(3, 0, ru, lo, ru, hi))) return m;
              if (hit(mk(3, 0, ru, lo - 1, ru, hi - 1))) return m;
            }
          } else {
            if (hit(mk(3, 1, ru, iu, rv, iv - 1))) return m;  // creates u->v
            if (hit(mk(3, 1, ru, iu - 1, rv, iv))) return m;  // creates v->u
          }
          break;
        case 4:
          if (iu + 1 <= nu) {
            if (hit(mk(4, 0, ru, iu, rv, iv))) return m;  // pair (u,succ) after v
          }
          if (iu >= 2) {
            if (hit(mk(4, 0, ru, iu - 1, rv, iv - 1))) return m;  // pair (pred,u) before v
          }
          break;
        case 5:
          if (iv + 2 <= nv && hit(mk(5, 0, ru, iu, rv, iv + 1))) return m;
          if (iv >= 3 && hit(mk(5, 0, ru, iu, rv, iv - 2))) return m;
          if (iv + 1 <= nv && iu + 1 <= nu && hit(mk(5, 0, rv, iv + 1, ru, iu))) return m;
          if (iv >= 2 && iu >= 2 && hit(mk(5, 0, rv, iv - 1, ru, iu - 1))) return m;
          break;
        case 6:
          if (iu + 1 <= nu && iv + 2 <= nv && hit(mk(6, 0, ru, iu, rv, iv + 1))) return m;
          if (iu >= 2 && iv >= 3 && hit(mk(6, 0, ru, iu - 1, rv, iv - 2))) return m;
          break;
        case 7: {
          if (rv == ru) break;
          if (!overlap(ru, rv)) break;
          Move cand = mk(7, 0, ru, iu, rv, iv);
          best_insertion(sol, inst, ru, iu, v, cand.c);
          best_insertion(sol, inst, rv, iv, u, cand.d);
          if (hit(cand)) return m;
          break;
        }
        default: break;
      }
    }
  }
  return std::nullopt;
}

std::optional<Move> random_move(const Solution& sol, int k, const Instance& inst, double beta,
                                Rng& rng, int attempts) {
  const int nr = static_cast<int>(sol.routes.size());
  for (int t = 0; t < attempts; ++t) {
    const int r1 = rng.uniform_int(nr);
    const int r2 = rng.uniform_int(nr);
    const int n1 = sol.routes[r1].size();
    const int n2 = sol.routes[r2].size();
    Move m;
    switch (k) {
      case 1: m = mk(1, 0, r1, 1 + rng.uniform_int(n1), r2, rng.uniform_int(n2 + 1)); break;
      case 2: {
        int variant = rng.uniform_int(8) == 0 ? 1 + rng.uniform_int(3) : 0;
        if (variant == 0) {
          m = mk(2, 0, r1, 1 + rng.uniform_int(n1), r2, 1 + rng.uniform_int(n2));
        } else if (variant == 1) {
          m = mk(2, 1, r1, 0, r2, 0);
        } else if (variant == 2) {
          std::vector<int> closed;
          for (int d = 0; d < inst.n_depots; ++d)
            if (!std::binary_search(sol.open_depots.begin(), sol.open_depots.end(), d))
              closed.push_back(d);
          if (closed.empty()) continue;
          m = mk(2, 2, 0, sol.open_depots[rng.uniform_index(sol.open_depots.size())], 0,
                 closed[rng.uniform_index(closed.size())]);
        } else {
          m = mk(2, 3, r1, sol.open_depots[rng.uniform_index(sol.open_depots.size())], -1, 0);
        }
        break;
      }
      case 3:
        if (rng.coin() && nr > 1) {
          m = mk(3, 1, r1, rng.uniform_int(n1 + 1), r2, rng.uniform_int(n2 + 1));
        } else {
          m = mk(3, 0, r1, rng.uniform_int(n1 + 1), r1, rng.uniform_int(n1 + 1));
          if (m.b < m.a) std::swap(m.a, m.b);
        }
        break;
      case 4: m = mk(4, 0, r1, 1 + rng.uniform_int(n1), r2, rng.uniform_int(n2 + 1)); break;
      case 5: m = mk(5, 0, r1, 1 + rng.uniform_int(n1), r2, 1 + rng.uniform_int(std::max(1, n2 - 1))); break;
      case 6:
        m = mk(6, 0, r1, 1 + rng.uniform_int(std::max(1, n1 - 1)), r2,
               1 + rng.uniform_int(std::max(1, n2 - 1)));
        break;
      case 7: {
        if (r1 == r2) continue;
        m = mk(7, 0, r1, 1 + rng.uniform_int(n1), r2, 1 + rng.uniform_int(n2));
        best_insertion(sol, inst, r1, m.a, sol.routes[r2].seq[m.b - 1], m.c);
        best_insertion(sol, inst, r2, m.b, sol.routes[r1].seq[m.a - 1], m.d);
        break;
      }
      default: throw std::invalid_argument("neighborhood id must be in 1..7");
    }
    if (eval_move(sol, inst, m)) {
      m.delta_pen = m.delta_obj + beta * m.delta_violation;
      return m;
    }
  }
  return std::nullopt;
}

}  // namespace llrp
