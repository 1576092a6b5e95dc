#pragma once

#include <string>
#include <vector>

#include "llrp/config.hpp"
#include "llrp/instance.hpp"
#include "llrp/population.hpp"
#include "llrp/qlearn.hpp"
#include "llrp/solution.hpp"

namespace llrp {

struct TracePoint {
  long long generation;
  double best_f;
};

struct PopulationSnapshotRow {
  int id;
  double f;
  int pdist;
  long long age;
};

struct RunResult {
  Solution best;
  double best_f = 0.0;
  long long best_generation = 0;   // generation at which the best was found
  double best_time_s = 0.0;
  double total_time_s = 0.0;
  long long generations_run = 0;
  bool target_reached = false;
  std::uint64_t seed = 0;
  std::string config_fingerprint;
  std::vector<TracePoint> trace;  // filled when cfg.record_trace
  std::vector<PopulationSnapshotRow> final_population;
  QModel final_model{0.2, 0.85, 0.7};
};

// One full search run. Deterministic given (instance, config): every random
// decision comes from named sub-streams of cfg.seed (engine, construction,
// descent, crossover, mutation, repair).
RunResult run(const Instance& inst, const SearchConfig& cfg);

}  // namespace llrp
