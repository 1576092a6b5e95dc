#include "llrp/variation.hpp"

#include <algorithm>
#include <numeric>

#include "llrp/neighborhoods.hpp"

namespace llrp {

void repair_depots(Solution& s, const Instance& inst, const DepotFrequency& freq,
                   bool use_frequency, Rng& rng) {
  const int want = inst.max_open_depots;
  std::vector<int> open = s.open_depots;
  const int have = static_cast<int>(open.size());

  if (have > want) {
    std::vector<int> keep;
    if (use_frequency) {
      std::sort(open.begin(), open.end(), [&](int a, int b) {
        if (freq.count(a) != freq.count(b)) return freq.count(a) > freq.count(b);
        return a < b;
      });
      keep.assign(open.begin(), open.begin() + want);
    } else {
      rng.shuffle(open);
      keep.assign(open.begin(), open.begin() + want);
    }
    std::sort(keep.begin(), keep.end());
    for (auto& r : s.routes) {
      if (std::binary_search(keep.begin(), keep.end(), r.depot)) continue;
      int best = keep.front();
      for (int d : keep)
        if (inst.dist(d, r.seq.front()) < inst.dist(best, r.seq.front())) best = d;
      r.depot = best;
    }
    s.open_depots = std::move(keep);
  } else if (have < want) {
    std::vector<int> closed;
    for (int d = 0; d < inst.n_depots; ++d)
      if (!std::binary_search(open.begin(), open.end(), d)) closed.push_back(d);
    std::sort(closed.begin(), closed.end(), [&](int a, int b) {
      if (freq.count(a) != freq.count(b)) return freq.count(a) > freq.count(b);
      return a < b;
    });
    for (int i = 0; i < want - have; ++i) open.push_back(closed[i]);
    std::sort(open.begin(), open.end());
    s.open_depots = std::move(open);
  }
  s.refresh(inst);
}

void repair_capacity(Solution& s, const Instance& inst, Rng& rng) {
  s.refresh(inst);
  if (s.capacity_feasible(inst)) return;
  const double beta = 1000.0 * s.objective / inst.total_demand();
  ExploreOptions opts;
  opts.beta = beta;
  opts.star_only = true;
  while (!s.capacity_feasible(inst)) {
    auto mv = explore(s, 3, inst, opts, rng);
    if (!mv) break;  // feasibility is not guaranteed here
    apply_move(s, inst, *mv);
  }
}

Solution repair(Solution s, const Instance& inst, const DepotFrequency& freq, Rng& rng) {
  repair_depots(s, inst, freq, rng.chance(0.5), rng);
  if (!s.capacity_feasible(inst)) repair_capacity(s, inst, rng);
  return s;
}

namespace {

void mutate_depot_swap(Solution& s, const Instance& inst, Rng& rng) {
  std::vector<int> closed;
  for (int d = 0; d < inst.n_depots; ++d)
    if (!std::binary_search(s.open_depots.begin(), s.open_depots.end(), d)) closed.push_back(d);
  if (closed.empty()) return;
  const int out = s.open_depots[rng.uniform_index(s.open_depots.size())];
  const int in = closed[rng.uniform_index(closed.size())];
  for (auto& r : s.routes)
    if (r.depot == out) r.depot = in;
  for (int& d : s.open_depots)
    if (d == out) d = in;
  std::sort(s.open_depots.begin(), s.open_depots.end());
}

void mutate_ejection_chain(Solution& s, const Instance&, Rng& rng) {
  if (s.routes.size() < 3) return;
  std::vector<int> ridx(s.routes.size());
  std::iota(ridx.begin(), ridx.end(), 0);
  rng.shuffle(ridx);
  int r1 = ridx[0], r2 = ridx[1], r3 = ridx[2];
  int i1 = rng.uniform_int(s.routes[r1].size());
  int i2 = rng.uniform_int(s.routes[r2].size());
  int i3 = rng.uniform_int(s.routes[r3].size());
  // cyclic: c1 -> slot2, c2 -> slot3, c3 -> slot1
  int c1 = s.routes[r1].seq[i1];
  int c2 = s.routes[r2].seq[i2];
  int c3 = s.routes[r3].seq[i3];
  s.routes[r2].seq[i2] = c1;
  s.routes[r3].seq[i3] = c2;
  s.routes[r1].seq[i1] = c3;
}

}  // namespace

Solution mutate(Solution s, const Instance& inst, const SearchConfig& cfg, Rng& rng) {
  if (!rng.chance(cfg.mutation_prob)) return s;
  for (int step = 0; step < cfg.mutation_len; ++step) {
    if (cfg.mutation_both_ops) {
      mutate_depot_swap(s, inst, rng);
      mutate_ejection_chain(s, inst, rng);
    } else if (rng.coin() == 0) {
      mutate_depot_swap(s, inst, rng);
    } else {
      mutate_ejection_chain(s, inst, rng);
    }
  }
  s.refresh(inst);
  return s;
}

}  // namespace llrp
