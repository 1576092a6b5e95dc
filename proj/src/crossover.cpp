#include "llrp/crossover.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace llrp {

namespace {

constexpr int kSuper = -1;

int node_index(int v, const Instance& inst) {
  // customers 0..nc-1, supernode = nc
  return v < 0 ? inst.n_customers : v - inst.n_depots;
}

}  // namespace

std::uint64_t arc_key(const DirectedArc& a, const Instance& inst) {
  const std::uint64_t width = static_cast<std::uint64_t>(inst.n_customers) + 1;
  auto code = [&](int v) -> std::uint64_t {
    return v < 0 ? 0 : static_cast<std::uint64_t>(v - inst.n_depots + 1);
  };
  return code(a.from) * width + code(a.to);
}

std::vector<TaggedArc> solution_arcs(const Solution& sol, const Instance&, int parent) {
  std::vector<TaggedArc> arcs;
  for (const auto& r : sol.routes) {
    TaggedArc first;
    first.arc = {kSuper, r.seq.front(), r.depot, -1};
    first.parent = parent;
    arcs.push_back(first);
    for (std::size_t k = 1; k < r.seq.size(); ++k) {
      TaggedArc t;
      t.arc = {r.seq[k - 1], r.seq[k], -1, -1};
      t.parent = parent;
      arcs.push_back(t);
    }
    TaggedArc last;
    last.arc = {r.seq.back(), kSuper, -1, r.depot};
    last.parent = parent;
    arcs.push_back(last);
  }
  return arcs;
}

std::vector<AbSequence> build_ab_sequences(const Solution& a, const Solution& b,
                                           const Instance& inst, Rng& rng) {
  auto ea = solution_arcs(a, inst, 0);
  auto eb = solution_arcs(b, inst, 1);
  std::unordered_set<std::uint64_t> keys_a, keys_b;
  for (const auto& t : ea) keys_a.insert(arc_key(t.arc, inst));
  for (const auto& t : eb) keys_b.insert(arc_key(t.arc, inst));

  // G_AB = symmetric difference of the two directed arc sets.
  std::vector<TaggedArc> gab;
  for (const auto& t : ea)
    if (!keys_b.count(arc_key(t.arc, inst))) gab.push_back(t);
  for (const auto& t : eb)
    if (!keys_a.count(arc_key(t.arc, inst))) gab.push_back(t);
  if (gab.empty()) return {};

  const int n_nodes = inst.n_customers + 1;  // + supernode
  enum { kOut = 0, kIn = 1 };
  // adjacency[node][port][parent] -> arc indices
  std::vector<std::array<std::array<std::vector<int>, 2>, 2>> adj(n_nodes);
  for (std::size_t i = 0; i < gab.size(); ++i) {
    const auto& t = gab[i];
    adj[node_index(t.arc.from, inst)][kOut][t.parent].push_back(static_cast<int>(i));
    adj[node_index(t.arc.to, inst)][kIn][t.parent].push_back(static_cast<int>(i));
  }
  std::vector<char> used(gab.size(), 0);

  auto unused_at = [&](int node, int port, int parent, std::vector<int>& out_list) {
    out_list.clear();
    for (int idx : adj[node][port][parent])
      if (!used[idx]) out_list.push_back(idx);
  };

  std::vector<AbSequence> seqs;
  std::size_t remaining = gab.size();

  std::vector<int> start_nodes(n_nodes);
  std::iota(start_nodes.begin(), start_nodes.end(), 0);

  while (remaining > 0) {
    rng.shuffle(start_nodes);
    int n0 = -1;
    for (int cand : start_nodes) {
      for (int port = 0; port < 2 && n0 < 0; ++port)
        for (int parent = 0; parent < 2 && n0 < 0; ++parent)
          for (int idx : adj[cand][port][parent])
            if (!used[idx]) {
              n0 = cand;
              break;
            }
      if (n0 >= 0) break;
    }
    if (n0 < 0) throw std::logic_error("arcs remain but no start node found");

    // All unused arcs incident to n0, both ports and parents.
    std::vector<int> starts;
    for (int port = 0; port < 2; ++port)
      for (int parent = 0; parent < 2; ++parent)
        for (int idx : adj[n0][port][parent])
          if (!used[idx]) starts.push_back(idx);
    rng.shuffle(starts);

    auto step_target = [&](int arc_idx, int from_node) {
      // (node, port) at the far end of arc_idx seen from from_node.
      int nf = node_index(gab[arc_idx].arc.from, inst);
      int nt = node_index(gab[arc_idx].arc.to, inst);
      return (nf == from_node) ? std::pair<int, int>(nt, kIn) : std::pair<int, int>(nf, kOut);
    };

    bool formed = false;
    for (int e0 : starts) {
      // Walk frames for backtracking: chosen arc + alternatives not yet tried.
      struct Frame {
        int arc;
        std::vector<int> alts;
        std::size_t next_alt = 0;
      };
      const int p0 = (node_index(gab[e0].arc.from, inst) == n0) ? kOut : kIn;
      const int parent0 = gab[e0].parent;

      std::vector<Frame> walk;
      used[e0] = 1;
      walk.push_back({e0, {}, 0});

      int cur_node = 0, cur_port = 0, want = 0;
      auto replay_position = [&]() {
        cur_node = n0;
        for (const auto& f : walk) {
          auto [n, p] = step_target(f.arc, cur_node);
          cur_node = n;
          cur_port = p;
        }
        want = (walk.size() % 2 == 0) ? parent0 : 1 - parent0;
      };
      replay_position();
      bool closed = false;

      while (true) {
        if (cur_node == n0 && cur_port == p0 && want == parent0) {
          closed = true;
          break;
        }
        std::vector<int> cands;
        unused_at(cur_node, cur_port, want, cands);
        rng.shuffle(cands);
        if (!cands.empty()) {
          int e = cands.front();
          used[e] = 1;
          cands.erase(cands.begin());
          walk.push_back({e, std::move(cands), 0});
          auto [n, p] = step_target(e, cur_node);
          cur_node = n;
          cur_port = p;
          want = 1 - want;
          continue;
        }
        // Dead end (cannot occur when both parents are degree-consistent,
        // kept as a safeguard): back out and try an untried alternative.
        bool resumed = false;
        while (walk.size() > 1) {
          Frame& f = walk.back();
          used[f.arc] = 0;
          if (f.next_alt < f.alts.size()) {
            f.arc = f.alts[f.next_alt++];
            used[f.arc] = 1;
            replay_position();
            resumed = true;
            break;
          }
          walk.pop_back();
        }
        if (!resumed) break;  // walk exhausted from this start arc
      }

      if (closed) {
        AbSequence seq;
        std::unordered_set<int> nodes;
        for (const auto& f : walk) {
          seq.arcs.push_back(gab[f.arc]);
          nodes.insert(node_index(gab[f.arc].arc.from, inst));
          nodes.insert(node_index(gab[f.arc].arc.to, inst));
        }
        for (int n : nodes)
          seq.nodes.push_back(n == inst.n_customers ? kSuper : n + inst.n_depots);
        std::sort(seq.nodes.begin(), seq.nodes.end());
        remaining -= walk.size();
        seqs.push_back(std::move(seq));
        formed = true;
        break;
      }
      used[e0] = 0;  // return the partial walk's arcs and try another start
    }
    if (!formed) throw std::logic_error("failed to form an AB-sequence");
  }
  return seqs;
}

AssemblyResult assemble_from_arcs(const Instance& inst, const std::vector<DirectedArc>& arcs,
                                  double beta) {
  const int nd = inst.n_depots;
  const int nc = inst.n_customers;
  std::vector<int> succ(nc, -2);      // customer -> customer, or -1 for depot
  std::vector<int> succ_depot(nc, -1);  // real depot when succ == -1
  std::vector<char> has_in(nc, 0);
  std::vector<std::pair<int, int>> depot_out;  // (real depot, first customer)

  for (const auto& a : arcs) {
    if (a.from == kSuper) {
      depot_out.emplace_back(a.depot_from, a.to);
      if (has_in[a.to - nd]++) throw std::logic_error("customer with in-degree > 1");
    } else if (a.to == kSuper) {
      if (succ[a.from - nd] != -2) throw std::logic_error("customer with out-degree > 1");
      succ[a.from - nd] = -1;
      succ_depot[a.from - nd] = a.depot_to;
    } else {
      if (succ[a.from - nd] != -2) throw std::logic_error("customer with out-degree > 1");
      succ[a.from - nd] = a.to;
      if (has_in[a.to - nd]++) throw std::logic_error("customer with in-degree > 1");
    }
  }
  for (int c = 0; c < nc; ++c)
    if (succ[c] == -2) throw std::logic_error("customer with no outgoing arc");

  AssemblyResult res;
  std::vector<char> on_route(nc, 0);
  for (auto [d_start, first] : depot_out) {
    Route r;
    int cur = first;
    while (true) {
      r.seq.push_back(cur);
      on_route[cur - nd] = 1;
      int nxt = succ[cur - nd];
      if (nxt == -1) {
        int d_end = succ_depot[cur - nd];
        r.depot = d_start;
        if (d_end != d_start) {
          r.depot = (inst.dist(d_start, first) <= inst.dist(d_end, first)) ? d_start : d_end;
          ++res.depot_fixes;
        }
        break;
      }
      cur = nxt;
    }
    res.sol.routes.push_back(std::move(r));
  }
  if (static_cast<int>(res.sol.routes.size()) != inst.fleet_size)
    throw std::logic_error("arc set does not induce N_v routes");

  // Customers on no depot path form customer-only cycles.
  std::vector<std::vector<int>> subtours;
  std::vector<char> visited = on_route;
  for (int c = 0; c < nc; ++c) {
    if (visited[c]) continue;
    std::vector<int> cyc;
    int cur = c;
    while (!visited[cur]) {
      visited[cur] = 1;
      cyc.push_back(cur + nd);
      cur = succ[cur] - nd;
    }
    subtours.push_back(std::move(cyc));
  }

  res.sol.refresh(inst);

  // Splice each sub-tour into a route: remove one cycle arc and one route
  // arc, add two arcs, keeping the cycle order. The reconnection with the
  // smallest F increase wins; candidates whose new arcs respect the
  // neighbor lists are preferred, all pairs are the fallback.
  for (auto& cyc : subtours) {
    const int m = static_cast<int>(cyc.size());
    // Doubled prefix arrays over the cycle for O(1) rotation segments.
    std::vector<double> ext_d(2 * m, 0.0), ext_sd(2 * m, 0.0);
    double load_cyc = 0.0;
    for (int t = 1; t < 2 * m; ++t)
      ext_d[t] = ext_d[t - 1] + inst.dist(cyc[(t - 1) % m], cyc[t % m]);
    for (int t = 1; t < 2 * m; ++t) ext_sd[t] = ext_sd[t - 1] + ext_d[t];
    for (int v : cyc) load_cyc += inst.demand_of(v);

    struct Cand {
      int rot = -1, route = -1, slot = -1;
      double delta = 0.0;
    };
    Cand best_granular, best_any;

    for (int k = 0; k < m; ++k) {
      const int s = (k + 1) % m;  // path starts after the removed cycle arc
      const int pfirst = cyc[s];
      const int plast = cyc[(s + m - 1) % m];
      const double path_dist = ext_d[s + m - 1] - ext_d[s];
      const double path_cum =
          (ext_sd[s + m - 1] - (s > 0 ? ext_sd[s - 1] : 0.0)) - m * ext_d[s];

      for (std::size_t ri = 0; ri < res.sol.routes.size(); ++ri) {
        const Route& r = res.sol.routes[ri];
        const int n = r.size();
        for (int p = 0; p <= n; ++p) {
          const int before = (p == 0) ? r.depot : r.seq[p - 1];
          const double link1 = inst.dist(before, pfirst);
          // latency of: prefix(p) + path + tail(p+1..n)
          double lat = r.cum[p];
          double dist_here = r.arr[p] + link1;
          lat += m * dist_here + path_cum;
          if (p < n) {
            const double link2 = inst.dist(plast, r.seq[p]);
            const double tail_shift = dist_here + path_dist + link2;
            const int tail_cnt = n - p;
            // tail arrivals re-based; internal offsets measured from the
            // tail's first node (old position p+1)
            const double tail_cum_internal = (r.cum[n] - r.cum[p]) - tail_cnt * r.arr[p + 1];
            lat += tail_cnt * tail_shift + tail_cum_internal;
          }
          const double old_pen = std::max(0.0, r.load() - inst.capacity);
          const double new_pen = std::max(0.0, r.load() + load_cyc - inst.capacity);
          const double delta = (lat - r.latency()) + beta * (new_pen - old_pen);

          const bool granular = inst.is_near(before, pfirst) ||
                                (p < n && inst.is_near(plast, r.seq[p])) ||
                                (p == n && inst.is_near(r.depot, plast));
          if (granular && (best_granular.rot < 0 || delta < best_granular.delta))
            best_granular = {k, static_cast<int>(ri), p, delta};
          if (best_any.rot < 0 || delta < best_any.delta)
            best_any = {k, static_cast<int>(ri), p, delta};
        }
      }
    }

    const Cand& pick = best_granular.rot >= 0 ? best_granular : best_any;
    Route& target = res.sol.routes[pick.route];
    std::vector<int> seq;
    seq.reserve(target.size() + m);
    for (int t = 0; t < pick.slot; ++t) seq.push_back(target.seq[t]);
    const int s = (pick.rot + 1) % m;
    for (int t = 0; t < m; ++t) seq.push_back(cyc[(s + t) % m]);
    for (int t = pick.slot; t < target.size(); ++t) seq.push_back(target.seq[t]);
    target.seq = std::move(seq);
    res.sol.refresh(inst);
    ++res.subtours_spliced;
  }

  std::vector<int> open;
  for (const auto& r : res.sol.routes) open.push_back(r.depot);
  std::sort(open.begin(), open.end());
  open.erase(std::unique(open.begin(), open.end()), open.end());
  res.sol.open_depots = std::move(open);
  res.sol.refresh(inst);
  return res;
}

PairDetail mpeax_pair_detailed(const Solution& base, const Solution& donor, const Instance& inst,
                               Rng& rng) {
  PairDetail out;
  auto seqs = build_ab_sequences(base, donor, inst, rng);
  if (seqs.empty()) {
    out.offspring = base;
    out.offspring.refresh(inst);
    out.degenerate = true;
    out.pre_repair_arcs = arc_set(base, inst);
    return out;
  }

  // E-set: one random central sequence plus every sequence sharing a node.
  const std::size_t central = rng.uniform_index(seqs.size());
  std::unordered_set<int> central_nodes(seqs[central].nodes.begin(), seqs[central].nodes.end());
  std::vector<const AbSequence*> eset;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    if (i == central) {
      eset.push_back(&seqs[i]);
      continue;
    }
    for (int n : seqs[i].nodes)
      if (central_nodes.count(n)) {
        eset.push_back(&seqs[i]);
        break;
      }
  }

  std::unordered_set<std::uint64_t> removed;
  std::vector<DirectedArc> added;
  for (const AbSequence* sq : eset)
    for (const auto& t : sq->arcs) {
      if (t.parent == 0)
        removed.insert(arc_key(t.arc, inst));
      else
        added.push_back(t.arc);
    }

  std::vector<DirectedArc> offspring_arcs;
  for (const auto& t : solution_arcs(base, inst, 0))
    if (!removed.count(arc_key(t.arc, inst))) offspring_arcs.push_back(t.arc);
  for (const auto& a : added) offspring_arcs.push_back(a);

  out.pre_repair_arcs.reserve(offspring_arcs.size());
  for (const auto& a : offspring_arcs) out.pre_repair_arcs.push_back(arc_key(a, inst));
  std::sort(out.pre_repair_arcs.begin(), out.pre_repair_arcs.end());

  const double beta = evaluate(base, inst) / inst.total_demand();
  auto assembled = assemble_from_arcs(inst, offspring_arcs, beta);
  out.offspring = std::move(assembled.sol);
  out.subtours_spliced = assembled.subtours_spliced;
  out.depot_fixes = assembled.depot_fixes;
  return out;
}

Solution mpeax_pair(const Solution& base, const Solution& donor, const Instance& inst, Rng& rng) {
  return mpeax_pair_detailed(base, donor, inst, rng).offspring;
}

Solution mpeax3(const Solution& a, const Solution& b, const Solution& c, const Instance& inst,
                Rng& rng) {
  Solution inter = mpeax_pair(a, b, inst, rng);
  return mpeax_pair(inter, c, inst, rng);
}

std::vector<int> order_crossover(const std::vector<int>& p1, const std::vector<int>& p2,
                                 Rng& rng) {
  const int n = static_cast<int>(p1.size());
  if (n == 0) return {};
  int i = rng.uniform_int(n);
  int j = rng.uniform_int(n);
  if (i > j) std::swap(i, j);
  std::vector<int> child(n, -1);
  std::unordered_set<int> copied;
  for (int t = i; t <= j; ++t) {
    child[t] = p1[t];
    copied.insert(p1[t]);
  }
  int write = (j + 1) % n;
  for (int t = 0; t < n; ++t) {
    int v = p2[(j + 1 + t) % n];
    if (copied.count(v)) continue;
    child[write] = v;
    write = (write + 1) % n;
  }
  return child;
}

Solution ox_offspring(const Solution& a, const Solution& b, const Instance& inst, Rng& rng) {
  auto giant = [](const Solution& s) {
    std::vector<int> t;
    for (const auto& r : s.routes) t.insert(t.end(), r.seq.begin(), r.seq.end());
    return t;
  };
  std::vector<int> child = order_crossover(giant(a), giant(b), rng);

  Solution sol;
  sol.open_depots = a.open_depots;
  sol.routes.assign(inst.fleet_size, Route{});
  for (std::size_t t = 0; t < child.size(); ++t)
    sol.routes[t % inst.fleet_size].seq.push_back(child[t]);
  for (auto& r : sol.routes) {
    int best = sol.open_depots.front();
    for (int d : sol.open_depots)
      if (inst.dist(d, r.seq.front()) < inst.dist(best, r.seq.front())) best = d;
    r.depot = best;
  }
  sol.refresh(inst);
  return sol;
}

Solution crossover_offspring(const Solution& a, const Solution& b, const Solution& c,
                             const Instance& inst, const SearchConfig& cfg, Rng& rng) {
  switch (cfg.crossover) {
    case CrossoverKind::mpeax3: return mpeax3(a, b, c, inst, rng);
    case CrossoverKind::mpeax2: return mpeax_pair(a, b, inst, rng);
    case CrossoverKind::ox: return ox_offspring(a, b, inst, rng);
  }
  throw std::logic_error("unknown crossover kind");
}

}  // namespace llrp
