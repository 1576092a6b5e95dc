#pragma once

#include <cstdint>
#include <vector>

#include "llrp/config.hpp"
#include "llrp/instance.hpp"
#include "llrp/rng.hpp"
#include "llrp/solution.hpp"

namespace llrp {

// Directed solution arc over the customer set plus a single depot supernode
// (from/to = customer vertex id, or -1 for the supernode). Supernode
// endpoints carry the real depot id of the originating route.
struct DirectedArc {
  int from = -1, to = -1;
  int depot_from = -1, depot_to = -1;
};

struct TaggedArc {
  DirectedArc arc;
  int parent = 0;  // 0 = first parent (base), 1 = second (donor)
};

// A closed walk in the symmetric-difference graph alternating between the
// two parents' arcs, with consecutive arcs sharing a node on the same degree
// side (all depots merged into the supernode).
struct AbSequence {
  std::vector<TaggedArc> arcs;
  // Nodes touched: customer vertex ids, plus -1 when the supernode is hit.
  std::vector<int> nodes;
};

std::vector<TaggedArc> solution_arcs(const Solution& sol, const Instance& inst, int parent);
std::uint64_t arc_key(const DirectedArc& a, const Instance& inst);

// Groups the symmetric difference of the parents' directed arc sets into
// AB-sequences. The returned sequences are arc-disjoint and cover the whole
// difference. Identical parents yield an empty list.
std::vector<AbSequence> build_ab_sequences(const Solution& a, const Solution& b,
                                           const Instance& inst, Rng& rng);

struct AssemblyResult {
  Solution sol;
  int subtours_spliced = 0;
  int depot_fixes = 0;
};

// Rebuilds a solution from a complete offspring arc list: extracts the
// depot-anchored paths, anchors two-depot routes to the depot closer to the
// route's first customer, and splices customer-only cycles into routes with
// the minimum-F-increase 2-opt* reconnection (granular candidates first).
AssemblyResult assemble_from_arcs(const Instance& inst, const std::vector<DirectedArc>& arcs,
                                  double beta);

struct PairDetail {
  Solution offspring;
  bool degenerate = false;               // empty symmetric difference
  std::vector<std::uint64_t> pre_repair_arcs;  // arc keys after the E-set exchange
  int subtours_spliced = 0;
  int depot_fixes = 0;
};

// One edge-assembly recombination: E-set selection on the AB-sequences of
// (base, donor), arc exchange on the base, then assembly fixes.
PairDetail mpeax_pair_detailed(const Solution& base, const Solution& donor, const Instance& inst,
                               Rng& rng);
Solution mpeax_pair(const Solution& base, const Solution& donor, const Instance& inst, Rng& rng);

// Three-parent crossover: (a x b) x c. c is meant to be the population
// member inserted most recently.
Solution mpeax3(const Solution& a, const Solution& b, const Solution& c, const Instance& inst,
                Rng& rng);

// Textbook order crossover on customer permutations (exposed for tests).
std::vector<int> order_crossover(const std::vector<int>& p1, const std::vector<int>& p2, Rng& rng);

// Giant-tour OX baseline: tours are the concatenated routes, the child tour
// is re-split round-robin into N_v routes and each route is anchored to the
// nearest of the first parent's open depots.
Solution ox_offspring(const Solution& a, const Solution& b, const Instance& inst, Rng& rng);

// Dispatch on cfg.crossover (mpeax3 / mpeax2 / ox).
Solution crossover_offspring(const Solution& a, const Solution& b, const Solution& c,
                             const Instance& inst, const SearchConfig& cfg, Rng& rng);

}  // namespace llrp
