#pragma once

#include <optional>
#include <vector>

#include "llrp/instance.hpp"
#include "llrp/rng.hpp"
#include "llrp/solution.hpp"

namespace llrp {

// A candidate move in one of the seven neighborhoods. kind is the
// neighborhood id (1..7); variant discriminates sub-moves:
//   kind 2: 0 = customer swap, 1 = exchange the depots of two routes,
//           2 = replace an open depot (a) with a closed one (b) on all routes,
//           3 = re-anchor route r1 to another open depot (a)
// Positions are 1-based customer indices; position 0 is the depot slot.
struct Move {
  int kind = 0;
  int variant = 0;
  int r1 = -1, r2 = -1;
  int a = 0, b = 0, c = 0, d = 0;
  double delta_obj = 0.0;        // change in raw f
  double delta_violation = 0.0;  // change in total capacity violation
  double delta_pen = 0.0;        // delta_obj + beta * delta_violation
};

struct ExploreOptions {
  double beta = 0.0;
  bool feasible_only = false;      // accept only moves whose result is capacity-feasible
  double current_violation = 0.0;  // required when feasible_only is set
  double improve_eps = 1e-9;       // strict-improvement threshold
  bool star_only = false;          // restrict N3 to 2-opt* (used by the repair step)
};

// Snapshot of the state touched by a move; restoring it undoes the move
// bit-for-bit (sequences, caches, open-depot set and cached objective).
struct MoveUndo {
  std::vector<std::pair<int, Route>> saved_routes;
  std::vector<int> saved_open;
  double saved_objective = 0.0;
};

// Fills delta_obj / delta_violation of m (O(1) per candidate using the
// route prefix caches). Returns false when the move is structurally illegal
// (out-of-range positions, would empty a route, no-op).
bool eval_move(const Solution& sol, const Instance& inst, Move& m);

MoveUndo apply_move(Solution& sol, const Instance& inst, const Move& m);
void undo_move(Solution& sol, const MoveUndo& undo);

// First-improvement scan of neighborhood k with granular candidate
// generation: a candidate is enumerated only when it creates an arc whose
// endpoints are delta-neighbors. Anchor customers are visited in a random
// order drawn from rng. Returns the first move with
// delta_pen < -improve_eps, or nullopt.
std::optional<Move> explore(const Solution& sol, int k, const Instance& inst,
                            const ExploreOptions& opts, Rng& rng);

// Uniformly samples a legal (not necessarily improving) candidate of
// neighborhood k, evaluated under opts.beta. Test support for fuzzing the
// delta evaluation; returns nullopt when no legal candidate is found.
std::optional<Move> random_move(const Solution& sol, int k, const Instance& inst, double beta,
                                Rng& rng, int attempts = 64);

// Bounding-circle route overlap test used by the Swap* neighborhood.
bool routes_overlap(const Solution& sol, const Instance& inst, int r1, int r2);

}  // namespace llrp
