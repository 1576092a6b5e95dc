#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "llrp/instance.hpp"
#include "llrp/rng.hpp"

namespace llrp {

// One vehicle route: an anchoring depot and an ordered customer sequence,
// plus cached per-position data for O(1) move evaluation.
//   arr[k]  arrival time at the k-th customer (arr[0] = 0 at the depot)
//   cum[k]  sum of arr[1..k]; cum[n] is the route's latency contribution
//   dload[k] demand of customers 1..k
struct Route {
  int depot = -1;
  std::vector<int> seq;
  std::vector<double> arr;
  std::vector<double> cum;
  std::vector<double> dload;

  int size() const { return static_cast<int>(seq.size()); }
  double latency() const { return cum.empty() ? 0.0 : cum.back(); }
  double load() const { return dload.empty() ? 0.0 : dload.back(); }
  void refresh(const Instance& inst);

  bool operator==(const Route& o) const { return depot == o.depot && seq == o.seq; }
};

struct Solution {
  std::vector<int> open_depots;  // sorted depot vertex ids
  std::vector<Route> routes;
  double objective = 0.0;  // cached f, maintained by refresh/apply paths

  void refresh(const Instance& inst);
  double total_violation(const Instance& inst) const;
  bool capacity_feasible(const Instance& inst) const { return total_violation(inst) <= 1e-9; }
  bool depot_feasible(const Instance& inst) const;
  bool is_feasible(const Instance& inst) const;
  // Throws ValidationError when a structural invariant is broken: customer
  // partition, non-empty routes, routes anchored to open depots.
  void check_structure(const Instance& inst) const;

  bool operator==(const Solution& o) const {
    return open_depots == o.open_depots && routes == o.routes;
  }
};

// Sum of customer arrival times, recomputed from scratch (the return arc to
// the depot does not contribute).
double evaluate(const Solution& sol, const Instance& inst);

// F = f + beta * sum over routes of max(0, load - P).
double evaluate_extended(const Solution& sol, const Instance& inst, double beta);

// Directed arc set with all depots collapsed into one supernode; includes
// depot->first, consecutive-customer and last->depot arcs. Sorted.
std::vector<std::uint64_t> arc_set(const Solution& sol, const Instance& inst);
std::size_t common_arc_count(const std::vector<std::uint64_t>& a,
                             const std::vector<std::uint64_t>& b);

// Number of arcs of a not present in b (|E_a| - |E_a ∩ E_b|).
int solution_distance(const Solution& a, const Solution& b, const Instance& inst);

// Minimum distance from s to any member, skipping the member at skip_index.
// Throws when the comparison set is empty.
int population_distance(const Solution& s, const std::vector<Solution>& pop, const Instance& inst,
                        int skip_index = -1);

// Strategic-oscillation penalty controller state. feasible_streak and
// infeasible_streak count consecutive accepted solutions of one kind; at most
// one of them is nonzero.
struct PenaltyState {
  double beta = 1.0;
  int feasible_streak = 0;
  int infeasible_streak = 0;
  int window = 4;  // u_p
};

// Applies the multiplicative update (factor 1.5 + coin with coin in {0,1})
// when one streak has reached the window, resets that streak, and clamps
// beta to [1e-9, 1e12]. Throws std::logic_error if neither streak is
// saturated.
void adjust_beta(PenaltyState& ps, Rng& rng);

void write_solution(std::ostream& out, const Solution& sol, const Instance& inst);
void write_solution_file(const std::string& path, const Solution& sol, const Instance& inst);
// Reads a solution file; declared objective is returned through
// declared_objective (the structural content is rebuilt and re-cached).
Solution read_solution(std::istream& in, const Instance& inst, double* declared_objective = nullptr);
Solution read_solution_file(const std::string& path, const Instance& inst,
                            double* declared_objective = nullptr);

}  // namespace llrp
