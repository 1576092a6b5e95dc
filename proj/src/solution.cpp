#include "llrp/solution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace llrp {

void Route::refresh(const Instance& inst) {
  const int n = size();
  arr.assign(n + 1, 0.0);
  cum.assign(n + 1, 0.0);
  dload.assign(n + 1, 0.0);
  int prev = depot;
  for (int k = 1; k <= n; ++k) {
    int v = seq[k - 1];
    arr[k] = arr[k - 1] + inst.dist(prev, v);
    cum[k] = cum[k - 1] + arr[k];
    dload[k] = dload[k - 1] + inst.demand_of(v);
    prev = v;
  }
}

void Solution::refresh(const Instance& inst) {
  objective = 0.0;
  for (auto& r : routes) {
    r.refresh(inst);
    objective += r.latency();
  }
}

double Solution::total_violation(const Instance& inst) const {
  double v = 0.0;
  for (const auto& r : routes) v += std::max(0.0, r.load() - inst.capacity);
  return v;
}

bool Solution::depot_feasible(const Instance& inst) const {
  if (static_cast<int>(open_depots.size()) != inst.max_open_depots) return false;
  for (const auto& r : routes)
    if (!std::binary_search(open_depots.begin(), open_depots.end(), r.depot)) return false;
  return true;
}

bool Solution::is_feasible(const Instance& inst) const {
  try {
    check_structure(inst);
  } catch (const ValidationError&) {
    return false;
  }
  return depot_feasible(inst) && capacity_feasible(inst);
}

void Solution::check_structure(const Instance& inst) const {
  if (static_cast<int>(routes.size()) != inst.fleet_size)
    throw ValidationError("solution must have exactly N_v routes");
  std::vector<int> seen(inst.n_vertices(), 0);
  for (const auto& r : routes) {
    if (r.depot < 0 || !inst.is_depot(r.depot))
      throw ValidationError("route anchored to a non-depot vertex");
    if (r.seq.empty()) throw ValidationError("empty route");
    for (int v : r.seq) {
      if (inst.is_depot(v)) throw ValidationError("depot inside a route sequence");
      if (++seen[v] > 1)
        throw ValidationError("customer " + std::to_string(inst.orig_ids[v]) +
                              " visited more than once");
    }
  }
  for (int v = inst.n_depots; v < inst.n_vertices(); ++v)
    if (!seen[v])
      throw ValidationError("customer " + std::to_string(inst.orig_ids[v]) + " not visited");
  for (int d : open_depots)
    if (!inst.is_depot(d)) throw ValidationError("open-depot set contains a customer");
}

double evaluate(const Solution& sol, const Instance& inst) {
  double f = 0.0;
  for (const auto& r : sol.routes) {
    double t = 0.0;
    int prev = r.depot;
    for (int v : r.seq) {
      t += inst.dist(prev, v);
      f += t;
      prev = v;
    }
  }
  return f;
}

double evaluate_extended(const Solution& sol, const Instance& inst, double beta) {
  double viol = 0.0;
  for (const auto& r : sol.routes) {
    double load = 0.0;
    for (int v : r.seq) load += inst.demand_of(v);
    viol += std::max(0.0, load - inst.capacity);
  }
  return evaluate(sol, inst) + beta * viol;
}

std::vector<std::uint64_t> arc_set(const Solution& sol, const Instance& inst) {
  // Supernode encoding: depot -> 0, customer c -> c - n_depots + 1.
  const std::uint64_t width = static_cast<std::uint64_t>(inst.n_customers) + 1;
  auto code = [&](int v) -> std::uint64_t {
    return inst.is_depot(v) ? 0 : static_cast<std::uint64_t>(v - inst.n_depots + 1);
  };
  std::vector<std::uint64_t> arcs;
  for (const auto& r : sol.routes) {
    int prev = r.depot;
    for (int v : r.seq) {
      arcs.push_back(code(prev) * width + code(v));
      prev = v;
    }
    arcs.push_back(code(prev) * width + 0);
  }
  std::sort(arcs.begin(), arcs.end());
  return arcs;
}

std::size_t common_arc_count(const std::vector<std::uint64_t>& a,
                             const std::vector<std::uint64_t>& b) {
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j])
      ++i;
    else if (a[i] > b[j])
      ++j;
    else {
      ++common;
      ++i;
      ++j;
    }
  }
  return common;
}

int solution_distance(const Solution& a, const Solution& b, const Instance& inst) {
  auto ea = arc_set(a, inst);
  auto eb = arc_set(b, inst);
  return static_cast<int>(ea.size() - common_arc_count(ea, eb));
}

int population_distance(const Solution& s, const std::vector<Solution>& pop, const Instance& inst,
                        int skip_index) {
  int best = -1;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (static_cast<int>(i) == skip_index) continue;
    int d = solution_distance(s, pop[i], inst);
    if (best < 0 || d < best) best = d;
  }
  if (best < 0) throw ValidationError("population distance over an empty comparison set");
  return best;
}

void adjust_beta(PenaltyState& ps, Rng& rng) {
  const double factor = 1.5 + rng.coin();
  if (ps.infeasible_streak >= ps.window) {
    ps.beta *= factor;
    ps.infeasible_streak = 0;
  } else if (ps.feasible_streak >= ps.window) {
    ps.beta /= factor;
    ps.feasible_streak = 0;
  } else {
    throw std::logic_error("adjust_beta called with no saturated streak");
  }
  ps.beta = std::clamp(ps.beta, 1e-9, 1e12);
}

void write_solution(std::ostream& out, const Solution& sol, const Instance& inst) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", sol.objective);
  out << "INSTANCE " << inst.name << "\n";
  out << "OBJECTIVE " << buf << "\n";
  out << "OPEN_DEPOTS";
  for (int d : sol.open_depots) out << " " << inst.orig_ids[d];
  out << "\n";
  for (const auto& r : sol.routes) {
    out << "ROUTE " << inst.orig_ids[r.depot] << " :";
    for (int v : r.seq) out << " " << inst.orig_ids[v];
    out << "\n";
  }
}

void write_solution_file(const std::string& path, const Solution& sol, const Instance& inst) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_solution(out, sol, inst);
}

Solution read_solution(std::istream& in, const Instance& inst, double* declared_objective) {
  Solution sol;
  std::string line;
  int line_no = 0;
  bool have_objective = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    if (key == "INSTANCE") {
      std::string nm;
      ss >> nm;
      if (nm != inst.name)
        throw ParseError("solution file is for instance '" + nm + "', expected '" + inst.name + "'",
                         line_no);
    } else if (key == "OBJECTIVE") {
      double obj;
      if (!(ss >> obj)) throw ParseError("bad OBJECTIVE line", line_no);
      if (declared_objective) *declared_objective = obj;
      have_objective = true;
    } else if (key == "OPEN_DEPOTS") {
      int id;
      while (ss >> id) sol.open_depots.push_back(inst.vertex_from_orig(id));
      std::sort(sol.open_depots.begin(), sol.open_depots.end());
    } else if (key == "ROUTE") {
      int depot_id;
      std::string colon;
      if (!(ss >> depot_id >> colon) || colon != ":")
        throw ParseError("bad ROUTE line", line_no);
      Route r;
      r.depot = inst.vertex_from_orig(depot_id);
      int id;
      while (ss >> id) r.seq.push_back(inst.vertex_from_orig(id));
      sol.routes.push_back(std::move(r));
    } else {
      throw ParseError("unknown solution-file key '" + key + "'", line_no);
    }
  }
  if (!have_objective && declared_objective) *declared_objective = -1.0;
  sol.refresh(inst);
  return sol;
}

Solution read_solution_file(const std::string& path, const Instance& inst,
                            double* declared_objective) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open solution file '" + path + "'");
  return read_solution(in, inst, declared_objective);
}

}  // namespace llrp
