#pragma once

#include <array>
#include <iosfwd>

#include "llrp/rng.hpp"

namespace llrp {

// Q-learning controller for the neighborhood exploration order. A state is
// the set of neighborhoods already tried in the current descent pass,
// encoded as a 7-bit mask; an action is one untried neighborhood (0-based
// internally, ids 1..7 at the call sites). Valid (state, action) pairs
// number sum_{k=0..6} C(7,k)*(7-k) = 448.
class QModel {
 public:
  static constexpr int kNeighborhoods = 7;
  static constexpr int kStates = 1 << kNeighborhoods;
  static constexpr double kRewardDiscount = 0.95;  // xi

  QModel(double alpha, double gamma, double epsilon)
      : alpha_(alpha), gamma_(gamma), epsilon_(epsilon) {
    q_.fill(0.0);
    r_.fill(0.0);
  }

  // Epsilon-greedy over the untried actions: with probability epsilon the
  // argmax-Q action (ties uniform), otherwise a uniformly random untried
  // action. Throws when every neighborhood has been tried.
  int select_action(unsigned state_mask, Rng& rng) const;

  // Q(st,a) <- (1-alpha) Q(st,a) + alpha [R(st,a) + gamma max_{a'} Q(st',a')]
  // with st' = st | {a}; the max term is 0 when st' has no untried action.
  void update_q(unsigned state_mask, int action);

  // Reward update: improving outcomes add the raw gain plus a best-solution
  // bonus scaled by e^(|N| - n_untried); non-improving outcomes only decay
  // and add the (negative or zero) gain.
  void update_reward(unsigned state_mask, int action, double delta_r, double delta_b,
                     int n_untried);

  double q(unsigned state_mask, int action) const { return q_[idx(state_mask, action)]; }
  double reward(unsigned state_mask, int action) const { return r_[idx(state_mask, action)]; }
  void set_q(unsigned state_mask, int action, double v) { q_[idx(state_mask, action)] = v; }
  void set_reward(unsigned state_mask, int action, double v) { r_[idx(state_mask, action)] = v; }

  // Number of valid (state, action) entries; fixed at 448.
  static int entry_count();

  void dump_csv(std::ostream& out) const;

  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  double epsilon() const { return epsilon_; }

 private:
  static std::size_t idx(unsigned state_mask, int action) {
    return static_cast<std::size_t>(state_mask) * kNeighborhoods + action;
  }
  std::array<double, kStates * kNeighborhoods> q_{}, r_{};
  double alpha_, gamma_, epsilon_;
};

}  // namespace llrp
