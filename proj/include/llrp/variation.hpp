#pragma once

#include <vector>

#include "llrp/config.hpp"
#include "llrp/instance.hpp"
#include "llrp/rng.hpp"
#include "llrp/solution.hpp"

namespace llrp {

// Counts how often each depot appears in the open-depot sets of the local
// optima returned by the descent procedure over a run.
class DepotFrequency {
 public:
  explicit DepotFrequency(int n_depots = 0) : counts_(n_depots, 0) {}
  void record(const Solution& sol) {
    for (int d : sol.open_depots) ++counts_[d];
  }
  long long count(int depot) const { return counts_[depot]; }
  int size() const { return static_cast<int>(counts_.size()); }

 private:
  std::vector<long long> counts_;
};

// Step 1 of the repair: enforce |open_depots| == N_d. With more depots open
// than allowed, either the N_d most frequent (use_frequency) or N_d random
// open depots are kept and orphaned routes are reassigned to the open depot
// closest to their first customer. With fewer, the most frequent closed
// depots are opened.
void repair_depots(Solution& s, const Instance& inst, const DepotFrequency& freq,
                   bool use_frequency, Rng& rng);

// Step 2: first-improvement 2-opt* under F with a large penalty until the
// solution is capacity-feasible or no improving move remains. Residual
// infeasibility is allowed.
void repair_capacity(Solution& s, const Instance& inst, Rng& rng);

// Full repair: depot step (frequency-based or random with equal
// probability) followed by the capacity step when needed.
Solution repair(Solution s, const Instance& inst, const DepotFrequency& freq, Rng& rng);

// With probability m_p applies m_l mutation steps; each step is a depot swap
// (replace a random open depot by a random closed one) or an ejection chain
// (cyclically permute three customers from three distinct routes), chosen
// uniformly unless cfg.mutation_both_ops is set. Inapplicable operators are
// skipped.
Solution mutate(Solution s, const Instance& inst, const SearchConfig& cfg, Rng& rng);

}  // namespace llrp
