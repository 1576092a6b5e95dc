#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "llrp/crossover.hpp"
#include "oracles.hpp"

using namespace llrp;

namespace {

std::vector<int> customer_multiset(const Solution& s) {
  std::vector<int> cs;
  for (const auto& r : s.routes) cs.insert(cs.end(), r.seq.begin(), r.seq.end());
  std::sort(cs.begin(), cs.end());
  return cs;
}

bool is_partition_of_gab(const std::vector<AbSequence>& seqs, const Solution& a,
                         const Solution& b, const Instance& inst) {
  std::set<std::uint64_t> ka, kb;
  for (const auto& t : solution_arcs(a, inst, 0)) ka.insert(arc_key(t.arc, inst));
  for (const auto& t : solution_arcs(b, inst, 1)) kb.insert(arc_key(t.arc, inst));
  std::set<std::uint64_t> gab;
  for (auto k : ka)
    if (!kb.count(k)) gab.insert(k);
  for (auto k : kb)
    if (!ka.count(k)) gab.insert(k);

  std::set<std::uint64_t> seen;
  std::size_t total = 0;
  for (const auto& sq : seqs) {
    for (const auto& t : sq.arcs) {
      auto key = arc_key(t.arc, inst);
      if (seen.count(key)) return false;  // overlap between sequences
      if (!gab.count(key)) return false;  // arc outside G_AB
      seen.insert(key);
      ++total;
    }
  }
  return total == gab.size();
}

}  // namespace

TEST_SUITE_BEGIN("crossover");

TEST_CASE("identical parents give an empty symmetric difference") {
  Rng rng(3);
  Instance inst = test::random_instance(rng, 8, 3, 2, 2, 1.6);
  Solution a = test::random_solution(inst, rng);
  CHECK(build_ab_sequences(a, a, inst, rng).empty());
  auto detail = mpeax_pair_detailed(a, a, inst, rng);
  CHECK(detail.degenerate);
  CHECK(detail.offspring == a);
}

TEST_CASE("reversed 3-customer route: 8 arcs, sequences partition them") {
  // one shared route, one route reversed between the parents
  Rng rng(5);
  Instance inst = test::random_instance(rng, 4, 2, 2, 1, 4.0);
  const int c0 = inst.n_depots;
  Solution a, b;
  a.open_depots = {0};
  b.open_depots = {0};
  Route shared;
  shared.depot = 0;
  shared.seq = {c0 + 3};
  Route fwd;
  fwd.depot = 0;
  fwd.seq = {c0, c0 + 1, c0 + 2};
  Route rev = fwd;
  std::reverse(rev.seq.begin(), rev.seq.end());
  a.routes = {fwd, shared};
  b.routes = {rev, shared};
  a.refresh(inst);
  b.refresh(inst);

  auto seqs = build_ab_sequences(a, b, inst, rng);
  std::size_t arc_count = 0;
  for (const auto& sq : seqs) arc_count += sq.arcs.size();
  CHECK(arc_count == 8);  // 4 arcs per parent differ (incl. depot arcs)
  CHECK(is_partition_of_gab(seqs, a, b, inst));
}

TEST_CASE("AB-sequences partition the difference graph on random pairs") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    Instance inst = test::random_instance(rng, 12, 3, 3, 2, 1.5);
    Solution a = test::random_solution(inst, rng);
    Solution b = test::random_solution(inst, rng);
    auto seqs = build_ab_sequences(a, b, inst, rng);
    CHECK(is_partition_of_gab(seqs, a, b, inst));
    // alternation within each sequence
    for (const auto& sq : seqs) {
      CHECK(sq.arcs.size() % 2 == 0);
      for (std::size_t i = 1; i < sq.arcs.size(); ++i)
        CHECK(sq.arcs[i].parent != sq.arcs[i - 1].parent);
    }
  }
}

TEST_CASE("pair crossover conserves customers and tracks provenance") {
  Rng rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    Instance inst = test::random_instance(rng, 12, 3, 3, 2, 1.5);
    Solution a = test::random_solution(inst, rng);
    Solution b = test::random_solution(inst, rng);
    auto detail = mpeax_pair_detailed(a, b, inst, rng);

    CHECK_NOTHROW(detail.offspring.check_structure(inst));
    CHECK(customer_multiset(detail.offspring) == customer_multiset(a));

    // every pre-repair arc comes from one of the parents
    std::set<std::uint64_t> parents;
    for (const auto& t : solution_arcs(a, inst, 0)) parents.insert(arc_key(t.arc, inst));
    for (const auto& t : solution_arcs(b, inst, 1)) parents.insert(arc_key(t.arc, inst));
    for (auto key : detail.pre_repair_arcs) CHECK(parents.count(key) == 1);

    // post-repair arcs may add exactly the splice/anchor arcs; everything
    // else still comes from the parents
    auto final_arcs = arc_set(detail.offspring, inst);
    int foreign = 0;
    for (auto key : final_arcs)
      if (!parents.count(key)) ++foreign;
    CHECK(foreign <= 2 * detail.subtours_spliced);
  }
}

TEST_CASE("three-parent crossover is idempotent on equal parents") {
  Rng rng(11);
  Instance inst = test::random_instance(rng, 9, 3, 2, 2, 1.6);
  Solution a = test::random_solution(inst, rng);
  Solution off = mpeax3(a, a, a, inst, rng);
  CHECK(off == a);
}

TEST_CASE("three-parent crossover conserves the customer set") {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    Instance inst = test::random_instance(rng, 10, 3, 3, 2, 1.5);
    Solution a = test::random_solution(inst, rng);
    Solution b = test::random_solution(inst, rng);
    Solution c = test::random_solution(inst, rng);
    Solution off = mpeax3(a, b, c, inst, rng);
    CHECK_NOTHROW(off.check_structure(inst));
    CHECK(customer_multiset(off) == customer_multiset(a));
  }
}

TEST_CASE("crossover is deterministic under a fixed seed") {
  Rng rng(17);
  Instance inst = test::random_instance(rng, 10, 3, 3, 2, 1.5);
  Solution a = test::random_solution(inst, rng);
  Solution b = test::random_solution(inst, rng);
  Solution c = test::random_solution(inst, rng);
  Rng r1(99), r2(99);
  Solution o1 = mpeax3(a, b, c, inst, r1);
  Solution o2 = mpeax3(a, b, c, inst, r2);
  CHECK(o1 == o2);
}

TEST_CASE("assembly fixes a hand-built sub-tour and two-depot route") {
  // structure: route S(d0) -> c0 -> c1 -> S(d1) (two different depots) and a
  // detached cycle c2 -> c3 -> c2, fleet of 1
  std::ostringstream text;
  text << "NAME fig\nVEHICLES 1\nMAX_DEPOTS 2\nCAPACITY 100\nDEPOTS 2\n"
       << "1 0 0\n2 100 0\n"
       << "CUSTOMERS 4\n3 10 0 1\n4 20 0 1\n5 10 5 1\n6 20 5 1\nEOF\n";
  std::istringstream in(text.str());
  Instance inst = Instance::parse_canonical(in);
  const int d0 = 0, d1 = 1, c0 = 2, c1 = 3, c2 = 4, c3 = 5;

  std::vector<DirectedArc> arcs;
  arcs.push_back({-1, c0, d0, -1});
  arcs.push_back({c0, c1, -1, -1});
  arcs.push_back({c1, -1, -1, d1});
  arcs.push_back({c2, c3, -1, -1});
  arcs.push_back({c3, c2, -1, -1});

  auto res = assemble_from_arcs(inst, arcs, 1.0);
  CHECK(res.depot_fixes == 1);
  CHECK(res.subtours_spliced == 1);
  CHECK_NOTHROW(res.sol.check_structure(inst));
  REQUIRE(res.sol.routes.size() == 1);
  // the first node is c0 at distance 10 from depot 1 and 90 from depot 2
  CHECK(res.sol.routes[0].depot == d0);
  // all four customers are on the single route now
  CHECK(res.sol.routes[0].seq.size() == 4);
}

TEST_CASE("order crossover keeps the copied slice and parent-2 order") {
  // 8-element permutations; verify OX structure against the textbook rule
  Rng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> p1 = {1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<int> p2 = {1, 2, 3, 4, 5, 6, 7, 8};
    rng.shuffle(p1);
    rng.shuffle(p2);
    Rng ox_rng(trial);
    auto child = order_crossover(p1, p2, ox_rng);
    REQUIRE(child.size() == 8);
    // child is a permutation
    auto sorted = child;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>({1, 2, 3, 4, 5, 6, 7, 8}));
    // the slice copied from p1 is contiguous in p1's positions: recover the
    // cut by re-drawing with an identical rng
    Rng probe(trial);
    int i = probe.uniform_int(8), j = probe.uniform_int(8);
    if (i > j) std::swap(i, j);
    for (int t = i; t <= j; ++t) CHECK(child[t] == p1[t]);
    // remaining values appear in p2's cyclic order starting after j
    std::vector<int> rest_child, rest_p2;
    for (int t = j + 1; t < 8 + j + 1; ++t)
      if (std::find(p1.begin() + i, p1.begin() + j + 1, child[t % 8]) == p1.begin() + j + 1)
        rest_child.push_back(child[t % 8]);
    for (int t = j + 1; t < 8 + j + 1; ++t)
      if (std::find(p1.begin() + i, p1.begin() + j + 1, p2[t % 8]) == p1.begin() + j + 1)
        rest_p2.push_back(p2[t % 8]);
    CHECK(rest_child == rest_p2);
  }
}

TEST_CASE("giant-tour OX offspring is structurally valid") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    Instance inst = test::random_instance(rng, 9, 3, 3, 2, 1.5);
    Solution a = test::random_solution(inst, rng);
    Solution b = test::random_solution(inst, rng);
    Solution off = ox_offspring(a, b, inst, rng);
    CHECK_NOTHROW(off.check_structure(inst));
    CHECK(off.open_depots == a.open_depots);
  }
}

TEST_SUITE_END();
