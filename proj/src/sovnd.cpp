#include "llrp/sovnd.hpp"

#include <cmath>
#include <stdexcept>

namespace llrp {

namespace {

int pick_neighborhood(const SearchConfig& cfg, const QModel& model, unsigned tried_mask,
                      Rng& rng) {
  switch (cfg.vnd_order) {
    case VndOrder::qlearning: return model.select_action(tried_mask, rng);
    case VndOrder::random_order: {
      int untried[QModel::kNeighborhoods];
      int n = 0;
      for (int a = 0; a < QModel::kNeighborhoods; ++a)
        if (!(tried_mask & (1u << a))) untried[n++] = a;
      return untried[rng.uniform_int(n)];
    }
    case VndOrder::fixed_order:
      for (int a = 0; a < QModel::kNeighborhoods; ++a)
        if (!(tried_mask & (1u << a))) return a;
      break;
  }
  throw std::logic_error("no untried neighborhood left");
}

}  // namespace

SovndOutcome rl_sovnd(Solution s, const Instance& inst, QModel& model, const SearchConfig& cfg,
                      double global_best_f, Rng& rng) {
  constexpr long long kMaxAccepted = 1000000;
  s.check_structure(inst);
  s.refresh(inst);

  SovndOutcome out;
  out.stats.passes = 0;

  const double total_demand = inst.total_demand();
  double beta = s.objective / total_demand;
  const bool oscillate = cfg.oscillation == Oscillation::adaptive;
  const bool feasible_only = cfg.oscillation == Oscillation::feasible_only;

  PenaltyState ps;
  ps.beta = beta;
  ps.window = cfg.penalty_window;

  double violation = s.total_violation(inst);
  double best_f_seen = global_best_f;

  // S_l starts as the input; an infeasible seed is replaced by the first
  // feasible accepted solution regardless of its raw objective.
  if (violation <= 1e-9) {
    out.best_feasible = s;
    out.has_feasible = true;
    if (s.objective < best_f_seen) best_f_seen = s.objective;
  }

  bool improve = true;
  while (improve) {
    improve = false;
    ++out.stats.passes;
    unsigned tried = 0;
    int n_explored = 0;
    while (n_explored < QModel::kNeighborhoods) {
      const int action = pick_neighborhood(cfg, model, tried, rng);
      const int n_untried = QModel::kNeighborhoods - __builtin_popcount(tried);

      ExploreOptions opts;
      opts.beta = ps.beta;
      opts.feasible_only = feasible_only;
      opts.current_violation = violation;
      auto mv = explore(s, action + 1, inst, opts, rng);
      ++out.stats.explorations;

      // Reward signal: gain in F for the executed neighborhood (0 when it
      // found nothing), plus the best-solution bonus on feasible results.
      double delta_r = 0.0;
      double delta_b = -1.0;
      double f_after = s.objective;
      double viol_after = violation;
      if (mv) {
        delta_r = -mv->delta_pen;
        f_after = s.objective + mv->delta_obj;
        viol_after = violation + mv->delta_violation;
        if (viol_after <= 1e-9) delta_b = best_f_seen - f_after;
      }
      model.update_reward(tried, action, delta_r, delta_b, n_untried);
      model.update_q(tried, action);
      tried |= (1u << action);

      if (!mv) {
        ++n_explored;
        continue;
      }

      if (mv->delta_pen >= 0) out.stats.monotone_ok = false;
      apply_move(s, inst, *mv);
      violation = s.total_violation(inst);  // exact, avoids drift
      ++out.stats.accepted;
      if (out.stats.accepted > kMaxAccepted)
        throw std::runtime_error("descent exceeded the accepted-move cap");

      const bool feasible = violation <= 1e-9;
      if (feasible) {
        ++out.stats.accepted_feasible;
        if (!out.has_feasible || s.objective < out.best_feasible.objective) {
          out.best_feasible = s;
          out.has_feasible = true;
        }
        if (s.objective < best_f_seen) best_f_seen = s.objective;
      } else {
        ++out.stats.accepted_infeasible;
      }

      if (oscillate) {
        if (feasible) {
          ps.feasible_streak += 1;
          ps.infeasible_streak = 0;
        } else {
          ps.infeasible_streak += 1;
          ps.feasible_streak = 0;
        }
        out.stats.max_streak =
            std::max(out.stats.max_streak, std::max(ps.feasible_streak, ps.infeasible_streak));
        if (ps.feasible_streak >= ps.window || ps.infeasible_streak >= ps.window) {
          adjust_beta(ps, rng);
          ++out.stats.beta_adjustments;
        }
      }

      improve = true;
      break;
    }
  }

  out.final_current = std::move(s);
  out.stats.final_beta = ps.beta;
  return out;
}

}  // namespace llrp
