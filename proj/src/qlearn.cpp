#include "llrp/qlearn.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace llrp {

namespace {

// Guard against NaN/inf propagating into the tables.
double clamp_finite(double v) {
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, -1e15, 1e15);
}

}  // namespace

int QModel::select_action(unsigned state_mask, Rng& rng) const {
  int untried[kNeighborhoods];
  int n = 0;
  for (int a = 0; a < kNeighborhoods; ++a)
    if (!(state_mask & (1u << a))) untried[n++] = a;
  if (n == 0) throw std::logic_error("select_action: no untried neighborhood");
  if (n == 1) return untried[0];
  if (rng.next_double() < epsilon_) {
    double best = -1e300;
    int ties[kNeighborhoods];
    int nt = 0;
    for (int t = 0; t < n; ++t) {
      double v = q(state_mask, untried[t]);
      if (v > best + 1e-12) {
        best = v;
        nt = 0;
        ties[nt++] = untried[t];
      } else if (v >= best - 1e-12) {
        ties[nt++] = untried[t];
      }
    }
    return ties[rng.uniform_int(nt)];
  }
  return untried[rng.uniform_int(n)];
}

void QModel::update_q(unsigned state_mask, int action) {
  const unsigned next = state_mask | (1u << action);
  double max_next = 0.0;
  bool any = false;
  for (int a = 0; a < kNeighborhoods; ++a)
    if (!(next & (1u << a))) {
      double v = q(next, a);
      if (!any || v > max_next) max_next = v;
      any = true;
    }
  if (!any) max_next = 0.0;
  double& cell = q_[idx(state_mask, action)];
  cell = clamp_finite((1.0 - alpha_) * cell + alpha_ * (reward(state_mask, action) + gamma_ * max_next));
}

void QModel::update_reward(unsigned state_mask, int action, double delta_r, double delta_b,
                           int n_untried) {
  delta_r = clamp_finite(delta_r);
  delta_b = clamp_finite(delta_b);
  double& cell = r_[idx(state_mask, action)];
  double v = kRewardDiscount * cell + delta_r;
  if (delta_r > 0.0)
    v += std::max(0.0, delta_b) * std::exp(static_cast<double>(kNeighborhoods - n_untried));
  cell = clamp_finite(v);
}

int QModel::entry_count() {
  int n = 0;
  for (unsigned st = 0; st < kStates; ++st) {
    int tried = __builtin_popcount(st);
    if (tried >= kNeighborhoods) continue;
    n += kNeighborhoods - tried;
  }
  return n;
}

void QModel::dump_csv(std::ostream& out) const {
  out << "state_mask,action,q,r\n";
  for (unsigned st = 0; st < kStates; ++st)
    for (int a = 0; a < kNeighborhoods; ++a) {
      if (st & (1u << a)) continue;
      out << st << "," << (a + 1) << "," << q(st, a) << "," << reward(st, a) << "\n";
    }
}

}  // namespace llrp
