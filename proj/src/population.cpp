#include "llrp/population.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>

#include "llrp/sovnd.hpp"

namespace llrp {

double population_fitness(double f, double f_min, double f_max, int pd, int pd_min, int pd_max) {
  const double qual = (f_max - f_min > 1e-12) ? (f_max - f) / (f_max - f_min) : 0.5;
  const double divv =
      (pd_max - pd_min > 0) ? static_cast<double>(pd - pd_min) / (pd_max - pd_min) : 0.5;
  return Population::kPsi * qual + (1.0 - Population::kPsi) * divv;
}

const Member& Population::best() const { return members_[best_index()]; }

int Population::best_index() const {
  int best = 0;
  for (int i = 1; i < size(); ++i)
    if (members_[i].f < members_[best].f) best = i;
  return best;
}

int Population::newest_index() const {
  int newest = 0;
  for (int i = 1; i < size(); ++i)
    if (members_[i].stamp > members_[newest].stamp) newest = i;
  return newest;
}

int Population::distance_to(const Solution& s) const {
  auto arcs = arc_set(s, inst_);
  int best = -1;
  for (const auto& mb : members_) {
    int d = static_cast<int>(arcs.size() - common_arc_count(arcs, mb.arcs));
    if (best < 0 || d < best) best = d;
  }
  if (best < 0) throw ValidationError("distance to an empty population");
  return best;
}

void Population::insert(Solution s) {
  Member mb;
  mb.arcs = arc_set(s, inst_);
  mb.f = s.objective;
  mb.stamp = next_stamp_++;
  mb.sol = std::move(s);
  members_.push_back(std::move(mb));
}

bool Population::update(Solution s) {
  if (!members_.empty() && distance_to(s) == 0) return false;  // clone
  insert(std::move(s));
  if (size() <= capacity_) return true;

  // Pairwise arc distances over the enlarged population.
  const int n = size();
  std::vector<int> pdist(n, std::numeric_limits<int>::max());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      int d = static_cast<int>(members_[i].arcs.size() -
                               common_arc_count(members_[i].arcs, members_[j].arcs));
      pdist[i] = std::min(pdist[i], d);
      pdist[j] = std::min(pdist[j], d);
    }
  double fmin = members_[0].f, fmax = members_[0].f;
  int dmin = pdist[0], dmax = pdist[0];
  for (int i = 1; i < n; ++i) {
    fmin = std::min(fmin, members_[i].f);
    fmax = std::max(fmax, members_[i].f);
    dmin = std::min(dmin, pdist[i]);
    dmax = std::max(dmax, pdist[i]);
  }

  auto fitness = [&](int i) {
    return population_fitness(members_[i].f, fmin, fmax, pdist[i], dmin, dmax);
  };
  int worst = 0;
  double worst_fit = fitness(0);
  for (int i = 1; i < n; ++i) {
    double fit = fitness(i);
    if (fit < worst_fit - 1e-12 ||
        (fit <= worst_fit + 1e-12 && members_[i].stamp < members_[worst].stamp)) {
      if (fit < worst_fit) worst_fit = fit;
      worst = i;
    }
  }
  const bool survived = worst != n - 1;
  members_.erase(members_.begin() + worst);
  return survived;
}

void Population::replace_on_stagnation(SovndContext& ctx) {
  if (size() <= 1) return;
  const int keep_best = best_index();
  std::vector<int> removable;
  for (int i = 0; i < size(); ++i)
    if (i != keep_best) removable.push_back(i);
  ctx.construct_rng.shuffle(removable);
  const int n_remove = size() / 2;
  std::vector<int> victims(removable.begin(),
                           removable.begin() + std::min<std::size_t>(n_remove, removable.size()));
  std::sort(victims.rbegin(), victims.rend());
  for (int v : victims) members_.erase(members_.begin() + v);

  int vacancies = capacity_ - size();
  int give_up = 20 * vacancies + 40;
  while (vacancies > 0 && give_up-- > 0) {
    std::optional<Solution> cand;
    if (ctx.memory.older_half_size() > 0 && ctx.construct_rng.chance(0.5)) {
      cand = ctx.memory.at(ctx.construct_rng.uniform_index(ctx.memory.older_half_size()));
    } else {
      cand = build_improved_member(ctx, /*greedy=*/false);
    }
    if (!cand) continue;
    if (!members_.empty() && distance_to(*cand) == 0) continue;
    insert(std::move(*cand));
    --vacancies;
  }
}

void Population::dump_csv(std::ostream& out) const {
  out << "member,f,pdist,age\n";
  for (int i = 0; i < size(); ++i) {
    int pd = -1;
    for (int j = 0; j < size(); ++j) {
      if (i == j) continue;
      int d = static_cast<int>(members_[i].arcs.size() -
                               common_arc_count(members_[i].arcs, members_[j].arcs));
      if (pd < 0 || d < pd) pd = d;
    }
    out << i << "," << members_[i].f << "," << pd << "," << members_[i].stamp << "\n";
  }
}

Solution construct_solution(const Instance& inst, bool greedy, Rng& rng) {
  if (inst.n_customers < inst.fleet_size)
    throw ValidationError("instance has fewer customers than vehicles");
  Solution sol;

  std::vector<int> depots(inst.n_depots);
  std::iota(depots.begin(), depots.end(), 0);
  rng.shuffle(depots);
  depots.resize(inst.max_open_depots);
  std::sort(depots.begin(), depots.end());
  sol.open_depots = depots;

  std::vector<int> unselected;
  for (int v = inst.n_depots; v < inst.n_vertices(); ++v) unselected.push_back(v);

  sol.routes.assign(inst.fleet_size, Route{});
  auto take = [&](std::size_t idx) {
    int v = unselected[idx];
    unselected[idx] = unselected.back();
    unselected.pop_back();
    return v;
  };

  if (greedy) {
    // Seed each route with the globally shortest (open depot, customer) edge.
    for (auto& r : sol.routes) {
      double best = 0.0;
      std::size_t best_c = 0;
      int best_d = -1;
      for (std::size_t ci = 0; ci < unselected.size(); ++ci)
        for (int d : sol.open_depots) {
          double w = inst.dist(d, unselected[ci]);
          if (best_d < 0 || w < best) {
            best = w;
            best_d = d;
            best_c = ci;
          }
        }
      r.depot = best_d;
      r.seq.push_back(take(best_c));
    }
    // Round-robin extension by the nearest unselected customer.
    std::size_t r = 0;
    while (!unselected.empty()) {
      auto& route = sol.routes[r % sol.routes.size()];
      int last = route.seq.back();
      double best = 0.0;
      std::size_t best_c = 0;
      bool first = true;
      for (std::size_t ci = 0; ci < unselected.size(); ++ci) {
        double w = inst.dist(last, unselected[ci]);
        if (first || w < best) {
          best = w;
          best_c = ci;
          first = false;
        }
      }
      route.seq.push_back(take(best_c));
      ++r;
    }
  } else {
    for (auto& r : sol.routes) {
      r.depot = sol.open_depots[rng.uniform_index(sol.open_depots.size())];
      r.seq.push_back(take(rng.uniform_index(unselected.size())));
    }
    std::size_t r = 0;
    while (!unselected.empty()) {
      sol.routes[r % sol.routes.size()].seq.push_back(take(rng.uniform_index(unselected.size())));
      ++r;
    }
  }

  sol.refresh(inst);
  return sol;
}

std::optional<Solution> build_improved_member(SovndContext& ctx, bool greedy) {
  Solution raw = construct_solution(ctx.inst, greedy, ctx.construct_rng);
  auto out = rl_sovnd(std::move(raw), ctx.inst, ctx.model, ctx.cfg, ctx.best_f, ctx.sovnd_rng);
  Solution cand;
  if (out.has_feasible) {
    cand = std::move(out.best_feasible);
  } else {
    cand = repair(std::move(out.final_current), ctx.inst, ctx.freq, ctx.construct_rng);
    if (!cand.capacity_feasible(ctx.inst)) return std::nullopt;
  }
  ctx.freq.record(cand);
  ctx.memory.push(cand);
  if (cand.objective < ctx.best_f) ctx.best_f = cand.objective;
  return cand;
}

void initialize_population(Population& pop, SovndContext& ctx) {
  int attempts = 40 * ctx.cfg.population_size + 100;
  while (pop.size() < pop.capacity() && attempts-- > 0) {
    auto cand = build_improved_member(ctx, ctx.construct_rng.chance(0.5));
    if (!cand) continue;
    if (pop.size() > 0 && pop.distance_to(*cand) == 0) continue;
    pop.insert(std::move(*cand));
  }
  if (pop.size() == 0)
    throw std::runtime_error("population initialization produced no feasible solution");
}

}  // namespace llrp
