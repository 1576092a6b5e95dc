#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "llrp/variation.hpp"
#include "oracles.hpp"

using namespace llrp;

namespace {

std::vector<int> customer_multiset(const Solution& s) {
  std::vector<int> cs;
  for (const auto& r : s.routes) cs.insert(cs.end(), r.seq.begin(), r.seq.end());
  std::sort(cs.begin(), cs.end());
  return cs;
}

// Random solution that opens `n_open` depots regardless of the instance
// limit, to feed the depot-repair step.
Solution wide_open_solution(const Instance& inst, int n_open, Rng& rng) {
  Solution s;
  std::vector<int> depots(inst.n_depots);
  for (int d = 0; d < inst.n_depots; ++d) depots[d] = d;
  rng.shuffle(depots);
  depots.resize(n_open);
  std::sort(depots.begin(), depots.end());
  s.open_depots = depots;
  std::vector<int> customers;
  for (int v = inst.n_depots; v < inst.n_vertices(); ++v) customers.push_back(v);
  rng.shuffle(customers);
  s.routes.assign(inst.fleet_size, Route{});
  for (std::size_t r = 0; r < s.routes.size(); ++r) {
    s.routes[r].depot = depots[r % depots.size()];
    s.routes[r].seq.push_back(customers.back());
    customers.pop_back();
  }
  for (int c : customers) s.routes[rng.uniform_index(s.routes.size())].seq.push_back(c);
  s.refresh(inst);
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("variation");

TEST_CASE("feasible input is untouched by repair") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = test::random_instance(rng, 8, 3, 2, 2, 3.0);
    Solution s = test::random_solution(inst, rng);
    if (!s.capacity_feasible(inst)) continue;
    DepotFrequency freq(inst.n_depots);
    Solution r = repair(s, inst, freq, rng);
    CHECK(r == s);
  }
}

TEST_CASE("frequency mode keeps the most frequent depots") {
  Rng rng(5);
  Instance inst = test::random_instance(rng, 10, 5, 3, 2, 2.0);
  Solution s = wide_open_solution(inst, 4, rng);  // 2 over the limit
  DepotFrequency freq(inst.n_depots);
  // depot counts: make two of the open depots clearly dominant
  Solution marker;
  marker.open_depots = {s.open_depots[1], s.open_depots[3]};
  for (int t = 0; t < 5; ++t) freq.record(marker);
  Solution fixed = s;
  repair_depots(fixed, inst, freq, /*use_frequency=*/true, rng);
  std::vector<int> expect = {s.open_depots[1], s.open_depots[3]};
  std::sort(expect.begin(), expect.end());
  CHECK(fixed.open_depots == expect);
  CHECK_NOTHROW(fixed.check_structure(inst));
  for (const auto& r : fixed.routes)
    CHECK(std::binary_search(fixed.open_depots.begin(), fixed.open_depots.end(), r.depot));
}

TEST_CASE("orphan routes move to the open depot nearest their first node") {
  Rng rng(7);
  Instance inst = test::random_instance(rng, 8, 4, 2, 1, 2.0);
  Solution s = wide_open_solution(inst, 3, rng);
  DepotFrequency freq(inst.n_depots);
  Solution marker;
  marker.open_depots = {s.open_depots[0]};
  freq.record(marker);
  Solution fixed = s;
  repair_depots(fixed, inst, freq, true, rng);
  REQUIRE(fixed.open_depots.size() == 1);
  int kept = fixed.open_depots[0];
  CHECK(kept == marker.open_depots[0]);
  for (const auto& r : fixed.routes) CHECK(r.depot == kept);
}

TEST_CASE("under-open solutions get the most frequent closed depots") {
  Rng rng(9);
  Instance inst = test::random_instance(rng, 8, 4, 2, 3, 2.0);
  Solution s = wide_open_solution(inst, 1, rng);
  DepotFrequency freq(inst.n_depots);
  Solution fixed = s;
  repair_depots(fixed, inst, freq, true, rng);
  CHECK(static_cast<int>(fixed.open_depots.size()) == inst.max_open_depots);
  CHECK(std::binary_search(fixed.open_depots.begin(), fixed.open_depots.end(),
                           s.open_depots[0]));
}

TEST_CASE("capacity repair fixes a one-unit overload with an available tail swap") {
  // route A: two far customers with demands 6+5 = 11 > 10; route B: one
  // customer with demand 1; exchanging tails fixes the load
  std::string text =
      "NAME cap\nVEHICLES 2\nMAX_DEPOTS 1\nCAPACITY 10\n"
      "DEPOTS 1\n1 0 0\n"
      "CUSTOMERS 3\n2 10 0 6\n3 20 0 5\n4 10 1 1\nEOF\n";
  std::istringstream in(text);
  Instance inst = Instance::parse_canonical(in);
  Solution s;
  s.open_depots = {0};
  Route a, b;
  a.depot = 0;
  a.seq = {1, 2};
  b.depot = 0;
  b.seq = {3};
  s.routes = {a, b};
  s.refresh(inst);
  REQUIRE_FALSE(s.capacity_feasible(inst));
  Rng rng(11);
  repair_capacity(s, inst, rng);
  CHECK(s.capacity_feasible(inst));
  CHECK_NOTHROW(s.check_structure(inst));
}

TEST_CASE("repair never changes the customer multiset and caps open depots") {
  Rng rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    Instance inst = test::random_instance(rng, 10, 4, 3, 2, 1.1 + rng.next_double());
    Solution s = wide_open_solution(inst, 1 + rng.uniform_int(4), rng);
    DepotFrequency freq(inst.n_depots);
    auto cs = customer_multiset(s);
    Solution r = repair(s, inst, freq, rng);
    CHECK(customer_multiset(r) == cs);
    CHECK(static_cast<int>(r.open_depots.size()) == inst.max_open_depots);
    for (const auto& route : r.routes)
      CHECK(std::binary_search(r.open_depots.begin(), r.open_depots.end(), route.depot));
  }
}

TEST_CASE("mutation probability zero is the identity") {
  Rng rng(15);
  Instance inst = test::random_instance(rng, 9, 3, 3, 2, 1.5);
  Solution s = test::random_solution(inst, rng);
  SearchConfig cfg;
  cfg.mutation_prob = 0.0;
  for (int t = 0; t < 20; ++t) CHECK(mutate(s, inst, cfg, rng) == s);
}

TEST_CASE("depot swap exchanges exactly one open depot") {
  Rng rng(17);
  Instance inst = test::random_instance(rng, 8, 3, 2, 1, 2.0);
  Solution s = test::random_solution(inst, rng);
  SearchConfig cfg;
  cfg.mutation_prob = 1.0;
  cfg.mutation_len = 1;
  int changed = 0;
  for (int t = 0; t < 50; ++t) {
    Solution m = mutate(s, inst, cfg, rng);
    CHECK(m.open_depots.size() == s.open_depots.size());
    if (m.open_depots != s.open_depots) {
      ++changed;
      std::vector<int> inter;
      std::set_intersection(m.open_depots.begin(), m.open_depots.end(), s.open_depots.begin(),
                            s.open_depots.end(), std::back_inserter(inter));
      CHECK(inter.size() == s.open_depots.size() - 1);
    }
  }
  CHECK(changed > 0);  // the depot-swap branch fired at least once
}

TEST_CASE("ejection chain cyclically permutes three customers") {
  Rng rng(19);
  Instance inst = test::random_instance(rng, 9, 3, 3, 2, 1.5);
  Solution s = test::random_solution(inst, rng);
  SearchConfig cfg;
  cfg.mutation_prob = 1.0;
  cfg.mutation_len = 1;
  for (int t = 0; t < 60; ++t) {
    Solution m = mutate(s, inst, cfg, rng);
    CHECK(customer_multiset(m) == customer_multiset(s));
    CHECK_NOTHROW(m.check_structure(inst));
    // position multiset preserved: route lengths unchanged
    for (std::size_t r = 0; r < s.routes.size(); ++r)
      CHECK(m.routes[r].seq.size() == s.routes[r].seq.size());
  }
}

TEST_CASE("mutation length controls the number of steps") {
  Rng rng(21);
  Instance inst = test::random_instance(rng, 12, 4, 4, 2, 1.5);
  Solution s = test::random_solution(inst, rng);
  SearchConfig cfg;
  cfg.mutation_prob = 1.0;
  cfg.mutation_len = 5;
  for (int t = 0; t < 30; ++t) {
    Solution m = mutate(s, inst, cfg, rng);
    CHECK_NOTHROW(m.check_structure(inst));
  }
}

TEST_SUITE_END();
