#pragma once

#include "llrp/config.hpp"
#include "llrp/instance.hpp"
#include "llrp/neighborhoods.hpp"
#include "llrp/qlearn.hpp"
#include "llrp/solution.hpp"

namespace llrp {

struct SovndStats {
  long long accepted = 0;
  long long accepted_feasible = 0;
  long long accepted_infeasible = 0;
  long long explorations = 0;
  int beta_adjustments = 0;
  int max_streak = 0;   // largest value reached by either acceptance counter
  int passes = 0;
  bool monotone_ok = true;  // every acceptance strictly improved F under the then-current beta
  double final_beta = 0.0;
};

struct SovndOutcome {
  Solution best_feasible;   // S_l; valid only when has_feasible
  bool has_feasible = false;
  Solution final_current;
  SovndStats stats;
};

// Q-learning ordered variable neighborhood descent with strategic
// oscillation. Starts from s (which may violate capacity), repeatedly picks
// an unexplored neighborhood, applies the first F-improving move found, and
// stops when a full sweep over all seven neighborhoods finds none. beta
// starts at f(s) / total demand and oscillates with the feasibility of the
// accepted solutions. global_best_f feeds the best-solution reward bonus.
SovndOutcome rl_sovnd(Solution s, const Instance& inst, QModel& model, const SearchConfig& cfg,
                      double global_best_f, Rng& rng);

}  // namespace llrp
