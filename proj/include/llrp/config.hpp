#pragma once

#include <cstdint>
#include <string>

namespace llrp {

enum class CrossoverKind { mpeax3, mpeax2, ox };
enum class VndOrder { qlearning, random_order, fixed_order };
enum class Oscillation { adaptive, feasible_only, fixed_beta };

// All tunables of the search. Defaults are the tuned values reported for
// the algorithm (mutation 0.1/2, learning rate 0.2, discount 0.85, greedy
// probability 0.7, window 4, granularity 20, population 20, replacement
// threshold 1000, 5000 generations).
struct SearchConfig {
  double mutation_prob = 0.1;      // m_p
  int mutation_len = 2;            // m_l
  double alpha = 0.2;              // learning rate
  double gamma = 0.85;             // discount factor
  double epsilon = 0.7;            // greedy probability
  int penalty_window = 4;          // u_p
  int granularity = 20;            // delta
  int population_size = 20;        // tau
  int stagnation_threshold = 1000; // I_r
  long long max_generations = 5000;
  std::uint64_t seed = 1;

  CrossoverKind crossover = CrossoverKind::mpeax3;
  VndOrder vnd_order = VndOrder::qlearning;
  Oscillation oscillation = Oscillation::adaptive;
  bool random_parents = false;      // third parent random instead of newest
  bool mutation_both_ops = false;   // apply both mutation operators per step

  double time_limit_s = 0.0;        // 0 = no wall-clock limit
  double target_objective = -1.0;   // <0 = no target (time-to-target mode)
  bool record_trace = false;

  // Variant presets: rlhea (default), rlhea1 (order crossover), rlhea2
  // (two-parent crossover), rlhea3 (random VND order), rlhea4 (fixed VND
  // order), rlhea5 (feasible-only search), rlhea6 (fixed penalty).
  void apply_preset(const std::string& name);

  std::string to_kv() const;
  static SearchConfig from_kv(const std::string& text);
  void set_kv(const std::string& key, const std::string& value);

  // Stable hash of the search-relevant fields (seed excluded).
  std::string fingerprint() const;
};

const char* to_string(CrossoverKind k);
const char* to_string(VndOrder o);
const char* to_string(Oscillation o);

}  // namespace llrp
