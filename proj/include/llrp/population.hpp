#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <vector>

#include "llrp/config.hpp"
#include "llrp/instance.hpp"
#include "llrp/qlearn.hpp"
#include "llrp/rng.hpp"
#include "llrp/solution.hpp"
#include "llrp/variation.hpp"

namespace llrp {

// Ring buffer of the most recent local optima returned by the descent,
// oldest first. Stagnation-triggered replacement draws only from the older
// half.
class AdaptiveMemory {
 public:
  explicit AdaptiveMemory(std::size_t cap = 3000) : cap_(cap) {}
  void push(const Solution& s) {
    if (buf_.size() == cap_) buf_.pop_front();
    buf_.push_back(s);
  }
  std::size_t size() const { return buf_.size(); }
  std::size_t older_half_size() const { return buf_.size() / 2; }
  const Solution& at(std::size_t i) const { return buf_[i]; }

 private:
  std::size_t cap_;
  std::deque<Solution> buf_;
};

// Everything the population procedures need to build and improve solutions:
// the learning state, depot frequencies, adaptive memory and the best
// objective seen so far (for the reward bonus). best_f is kept current by
// the procedures themselves.
struct SovndContext {
  const Instance& inst;
  const SearchConfig& cfg;
  QModel& model;
  DepotFrequency& freq;
  AdaptiveMemory& memory;
  double best_f;
  Rng& construct_rng;
  Rng& sovnd_rng;
};

struct Member {
  Solution sol;
  std::vector<std::uint64_t> arcs;
  long long stamp = 0;  // insertion order
  double f = 0.0;
};

// Fixed-capacity set of unique feasible solutions (pairwise distance > 0).
class Population {
 public:
  Population(int capacity, const Instance& inst) : capacity_(capacity), inst_(inst) {}

  int size() const { return static_cast<int>(members_.size()); }
  int capacity() const { return capacity_; }
  const Member& member(int i) const { return members_[i]; }
  const Member& best() const;
  int best_index() const;
  int newest_index() const;  // shortest-life member

  int distance_to(const Solution& s) const;  // min arc distance to any member

  // Unconditional insert (used during initialization; caller guarantees
  // uniqueness and spare capacity).
  void insert(Solution s);

  // Quality-and-diversity update: clones are discarded; otherwise s joins,
  // fitness = psi * quality + (1 - psi) * diversity is computed over the
  // enlarged population and the worst-fitness member is evicted (ties evict
  // the oldest). Returns true when s stays.
  bool update(Solution s);

  // Removes floor(size/2) random members (never the best) and refills from
  // fresh random-construction + descent or the older half of the adaptive
  // memory, enforcing uniqueness.
  void replace_on_stagnation(SovndContext& ctx);

  void dump_csv(std::ostream& out) const;

  static constexpr double kPsi = 0.55;

 private:
  int capacity_;
  const Instance& inst_;
  std::vector<Member> members_;
  long long next_stamp_ = 0;
};

// Quality/diversity blend used by Population::update. Degenerate spans
// (max == min) contribute a neutral 0.5.
double population_fitness(double f, double f_min, double f_max, int pd, int pd_min, int pd_max);

// Random or greedy construction (round-robin customer assignment over N_v
// routes seeded from N_d random open depots). The result uses the full
// fleet and may violate capacity.
Solution construct_solution(const Instance& inst, bool greedy, Rng& rng);

// Builds and improves a single candidate member (construction + descent +
// fallback repair); returns nullopt when no feasible solution came out.
std::optional<Solution> build_improved_member(SovndContext& ctx, bool greedy);

// Fills the population with unique improved members (greedy/random
// construction with equal probability). Gives up on a vacancy after a
// bounded number of attempts so that tiny instances with few distinct
// solutions still initialize.
void initialize_population(Population& pop, SovndContext& ctx);

}  // namespace llrp
