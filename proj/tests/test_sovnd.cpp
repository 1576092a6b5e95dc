#include <sstream>

#include "doctest.h"
#include "llrp/sovnd.hpp"
#include "oracles.hpp"

using namespace llrp;

namespace {

SearchConfig default_cfg(std::uint64_t seed = 1) {
  SearchConfig cfg;
  cfg.seed = seed;
  return cfg;
}

Solution descend_all(Solution s, const Instance& inst, double beta, Rng& rng) {
  bool improved = true;
  while (improved) {
    improved = false;
    for (int k = 1; k <= 7; ++k) {
      ExploreOptions opts;
      opts.beta = beta;
      if (auto mv = explore(s, k, inst, opts, rng)) {
        apply_move(s, inst, *mv);
        improved = true;
        break;
      }
    }
  }
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("sovnd");

TEST_CASE("beta starts at f over total demand") {
  // f(s) = 100, total demand 50 -> beta_0 = 2; the single-customer input is
  // a trivial local optimum so beta is never adjusted
  std::string text =
      "NAME b0\nVEHICLES 1\nMAX_DEPOTS 1\nCAPACITY 50\n"
      "DEPOTS 1\n1 0 0\n"
      "CUSTOMERS 1\n2 100 0 50\nEOF\n";
  std::istringstream in(text);
  Instance inst = Instance::parse_canonical(in);
  Solution s;
  s.open_depots = {0};
  Route r;
  r.depot = 0;
  r.seq = {1};
  s.routes.push_back(r);
  s.refresh(inst);
  QModel model(0.2, 0.85, 0.7);
  SearchConfig cfg = default_cfg();
  Rng r2(12);
  auto out = rl_sovnd(s, inst, model, cfg, 1e18, r2);
  CHECK(out.stats.final_beta == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(out.stats.accepted == 0);
}

TEST_CASE("a local optimum is a fixed point") {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    // huge capacity: every solution is feasible, F == f, beta irrelevant
    Instance inst = test::random_instance(rng, 7, 3, 2, 2, 10.0);
    Solution s = test::random_solution(inst, rng);
    s = descend_all(std::move(s), inst, 1.0, rng);
    REQUIRE(s.capacity_feasible(inst));
    QModel model(0.2, 0.85, 0.7);
    SearchConfig cfg = default_cfg();
    Rng r2(14 + trial);
    auto out = rl_sovnd(s, inst, model, cfg, 1e18, r2);
    CHECK(out.stats.accepted == 0);
    CHECK(out.has_feasible);
    CHECK(out.best_feasible == s);
  }
}

TEST_CASE("descent output admits no improving move (exhaustive check)") {
  Rng rng(15);
  for (int trial = 0; trial < 8; ++trial) {
    Instance inst = test::random_instance(rng, 6 + rng.uniform_int(2), 2, 2, 1, 2.0);
    Solution s = test::random_solution(inst, rng);
    QModel model(0.2, 0.85, 0.7);
    SearchConfig cfg = default_cfg();
    Rng r2(16 + trial);
    auto out = rl_sovnd(s, inst, model, cfg, 1e18, r2);
    REQUIRE(out.has_feasible);
    CHECK(out.best_feasible.objective <= s.objective + 1e-9);
    // the final point is a local optimum w.r.t. all seven neighborhoods
    // under the final beta
    const Solution& fin = out.final_current;
    double F0 = evaluate_extended(fin, inst, out.stats.final_beta);
    for (int k = 1; k <= 7; ++k)
      for (const auto& nb : test::oracle_neighbors(fin, inst, k))
        CHECK(F0 <= evaluate_extended(nb, inst, out.stats.final_beta) + 1e-6);
  }
}

TEST_CASE("on all-feasible instances the result is an exhaustive local optimum") {
  // capacity never binds, so F == f along the whole descent and the returned
  // best feasible solution is the final point itself
  Rng rng(16);
  for (int trial = 0; trial < 6; ++trial) {
    Instance inst = test::random_instance(rng, 7, 3, 2, 2, 10.0);
    Solution s = test::random_solution(inst, rng);
    QModel model(0.2, 0.85, 0.7);
    SearchConfig cfg = default_cfg();
    Rng r2(160 + trial);
    auto out = rl_sovnd(s, inst, model, cfg, 1e18, r2);
    REQUIRE(out.has_feasible);
    CHECK(out.best_feasible == out.final_current);
    CHECK(out.best_feasible.objective <= s.objective + 1e-9);
    for (int k = 1; k <= 7; ++k)
      for (const auto& nb : test::oracle_neighbors(out.best_feasible, inst, k))
        CHECK(out.best_feasible.objective <= evaluate(nb, inst) + 1e-6);
  }
}

TEST_CASE("structurally broken input is rejected") {
  Rng rng(18);
  Instance inst = test::random_instance(rng, 6, 2, 2, 1, 2.0);
  Solution s = test::random_solution(inst, rng);
  s.routes[0].seq.push_back(s.routes[1].seq.front());  // duplicate customer
  s.refresh(inst);
  QModel model(0.2, 0.85, 0.7);
  SearchConfig cfg = default_cfg();
  Rng r2(19);
  CHECK_THROWS_AS(rl_sovnd(s, inst, model, cfg, 1e18, r2), ValidationError);
}

TEST_CASE("acceptance is monotone in F and counters stay within the window") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = test::random_instance(rng, 10, 3, 3, 2, 1.1 + rng.next_double());
    Solution s = test::random_solution(inst, rng);
    QModel model(0.2, 0.85, 0.7);
    SearchConfig cfg = default_cfg();
    Rng r2(18 + trial);
    auto out = rl_sovnd(s, inst, model, cfg, 1e18, r2);
    CHECK(out.stats.monotone_ok);
    CHECK(out.stats.max_streak <= cfg.penalty_window);
  }
}

TEST_CASE("feasible-only variant accepts only capacity-feasible solutions") {
  Rng rng(19);
  for (int trial = 0; trial < 15; ++trial) {
    Instance inst = test::random_instance(rng, 10, 3, 3, 2, 1.5);
    Solution s = test::random_solution(inst, rng);
    QModel model(0.2, 0.85, 0.7);
    SearchConfig cfg = default_cfg();
    cfg.oscillation = Oscillation::feasible_only;
    Rng r2(20 + trial);
    auto out = rl_sovnd(s, inst, model, cfg, 1e18, r2);
    CHECK(out.stats.accepted_infeasible == 0);
    if (out.has_feasible) CHECK(out.best_feasible.capacity_feasible(inst));
  }
}

TEST_CASE("fixed-beta variant never adjusts the penalty") {
  Rng rng(21);
  Instance inst = test::random_instance(rng, 12, 3, 3, 2, 1.2);
  Solution s = test::random_solution(inst, rng);
  QModel model(0.2, 0.85, 0.7);
  SearchConfig cfg = default_cfg();
  cfg.oscillation = Oscillation::fixed_beta;
  Rng r2(22);
  double beta0 = s.objective / inst.total_demand();
  auto out = rl_sovnd(s, inst, model, cfg, 1e18, r2);
  CHECK(out.stats.beta_adjustments == 0);
  CHECK(out.stats.final_beta == doctest::Approx(beta0));
}

TEST_CASE("an infeasible seed is replaced by the first feasible acceptance") {
  Rng rng(23);
  int found = 0;
  for (int trial = 0; trial < 30 && found < 5; ++trial) {
    Instance inst = test::random_instance(rng, 10, 3, 3, 2, 1.05);
    Solution s = test::random_solution(inst, rng);
    if (s.capacity_feasible(inst)) continue;
    QModel model(0.2, 0.85, 0.7);
    SearchConfig cfg = default_cfg();
    Rng r2(24 + trial);
    auto out = rl_sovnd(s, inst, model, cfg, 1e18, r2);
    if (out.has_feasible) {
      CHECK(out.best_feasible.capacity_feasible(inst));
      ++found;
    }
  }
  CHECK(found > 0);
}

TEST_CASE("all vnd orders reach a local optimum") {
  Rng rng(25);
  Instance inst = test::random_instance(rng, 9, 2, 2, 1, 1.6);
  Solution s = test::random_solution(inst, rng);
  for (auto order : {VndOrder::qlearning, VndOrder::random_order, VndOrder::fixed_order}) {
    QModel model(0.2, 0.85, 0.7);
    SearchConfig cfg = default_cfg();
    cfg.vnd_order = order;
    Rng r2(26);
    auto out = rl_sovnd(s, inst, model, cfg, 1e18, r2);
    REQUIRE(out.has_feasible);
    CHECK(out.best_feasible.objective <= s.objective + 1e-9);
  }
}

TEST_SUITE_END();
