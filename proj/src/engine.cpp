#include "llrp/engine.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "llrp/crossover.hpp"
#include "llrp/sovnd.hpp"
#include "llrp/variation.hpp"

namespace llrp {

// ---- SearchConfig -------------------------------------------------------

const char* to_string(CrossoverKind k) {
  switch (k) {
    case CrossoverKind::mpeax3: return "mpeax3";
    case CrossoverKind::mpeax2: return "mpeax2";
    case CrossoverKind::ox: return "ox";
  }
  return "?";
}

const char* to_string(VndOrder o) {
  switch (o) {
    case VndOrder::qlearning: return "qlearning";
    case VndOrder::random_order: return "random";
    case VndOrder::fixed_order: return "fixed";
  }
  return "?";
}

const char* to_string(Oscillation o) {
  switch (o) {
    case Oscillation::adaptive: return "adaptive";
    case Oscillation::feasible_only: return "feasible_only";
    case Oscillation::fixed_beta: return "fixed_beta";
  }
  return "?";
}

void SearchConfig::apply_preset(const std::string& name) {
  if (name == "rlhea") return;
  if (name == "rlhea1") {
    crossover = CrossoverKind::ox;
  } else if (name == "rlhea2") {
    crossover = CrossoverKind::mpeax2;
  } else if (name == "rlhea3") {
    vnd_order = VndOrder::random_order;
  } else if (name == "rlhea4") {
    vnd_order = VndOrder::fixed_order;
  } else if (name == "rlhea5") {
    oscillation = Oscillation::feasible_only;
  } else if (name == "rlhea6") {
    oscillation = Oscillation::fixed_beta;
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
}

void SearchConfig::set_kv(const std::string& key, const std::string& value) {
  auto as_d = [&] { return std::stod(value); };
  auto as_i = [&] { return std::stoi(value); };
  if (key == "mutation_prob") mutation_prob = as_d();
  else if (key == "mutation_len") mutation_len = as_i();
  else if (key == "alpha") alpha = as_d();
  else if (key == "gamma") gamma = as_d();
  else if (key == "epsilon") epsilon = as_d();
  else if (key == "penalty_window") penalty_window = as_i();
  else if (key == "granularity") granularity = as_i();
  else if (key == "population_size") population_size = as_i();
  else if (key == "stagnation_threshold") stagnation_threshold = as_i();
  else if (key == "max_generations") max_generations = std::stoll(value);
  else if (key == "seed") seed = std::stoull(value);
  else if (key == "time_limit_s") time_limit_s = as_d();
  else if (key == "target_objective") target_objective = as_d();
  else if (key == "record_trace") record_trace = value == "1" || value == "true";
  else if (key == "random_parents") random_parents = value == "1" || value == "true";
  else if (key == "mutation_both_ops") mutation_both_ops = value == "1" || value == "true";
  else if (key == "crossover") {
    if (value == "mpeax3") crossover = CrossoverKind::mpeax3;
    else if (value == "mpeax2") crossover = CrossoverKind::mpeax2;
    else if (value == "ox") crossover = CrossoverKind::ox;
    else throw std::invalid_argument("bad crossover '" + value + "'");
  } else if (key == "vnd_order") {
    if (value == "qlearning") vnd_order = VndOrder::qlearning;
    else if (value == "random") vnd_order = VndOrder::random_order;
    else if (value == "fixed") vnd_order = VndOrder::fixed_order;
    else throw std::invalid_argument("bad vnd_order '" + value + "'");
  } else if (key == "oscillation") {
    if (value == "adaptive") oscillation = Oscillation::adaptive;
    else if (value == "feasible_only") oscillation = Oscillation::feasible_only;
    else if (value == "fixed_beta") oscillation = Oscillation::fixed_beta;
    else throw std::invalid_argument("bad oscillation '" + value + "'");
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

std::string SearchConfig::to_kv() const {
  std::ostringstream out;
  out << "mutation_prob=" << mutation_prob << "\n";
  out << "mutation_len=" << mutation_len << "\n";
  out << "alpha=" << alpha << "\n";
  out << "gamma=" << gamma << "\n";
  out << "epsilon=" << epsilon << "\n";
  out << "penalty_window=" << penalty_window << "\n";
  out << "granularity=" << granularity << "\n";
  out << "population_size=" << population_size << "\n";
  out << "stagnation_threshold=" << stagnation_threshold << "\n";
  out << "max_generations=" << max_generations << "\n";
  out << "seed=" << seed << "\n";
  out << "crossover=" << to_string(crossover) << "\n";
  out << "vnd_order=" << to_string(vnd_order) << "\n";
  out << "oscillation=" << to_string(oscillation) << "\n";
  out << "random_parents=" << (random_parents ? 1 : 0) << "\n";
  out << "mutation_both_ops=" << (mutation_both_ops ? 1 : 0) << "\n";
  out << "time_limit_s=" << time_limit_s << "\n";
  out << "target_objective=" << target_objective << "\n";
  return out.str();
}

SearchConfig SearchConfig::from_kv(const std::string& text) {
  SearchConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bad config line: " + line);
    cfg.set_kv(line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

std::string SearchConfig::fingerprint() const {
  // FNV-1a over the kv text with the seed line dropped.
  std::istringstream in(to_kv());
  std::string line, text;
  while (std::getline(in, line))
    if (line.rfind("seed=", 0) != 0) text += line + "\n";
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---- run ----------------------------------------------------------------

namespace {

struct Parents {
  int a, b, c;
};

Parents select_parents(const Population& pop, bool random_third, Rng& rng) {
  const int n = pop.size();
  Parents p{0, 0, 0};
  if (n == 1) return p;
  p.a = rng.uniform_int(n);
  do {
    p.b = rng.uniform_int(n);
  } while (p.b == p.a);
  if (n == 2) {
    p.c = pop.newest_index();
    return p;
  }
  if (random_third) {
    do {
      p.c = rng.uniform_int(n);
    } while (p.c == p.a || p.c == p.b);
  } else {
    p.c = pop.newest_index();
  }
  return p;
}

}  // namespace

RunResult run(const Instance& inst, const SearchConfig& cfg) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(clock::now() - t0).count();
  };

  Rng master(cfg.seed);
  Rng engine_rng = master.split(1);
  Rng construct_rng = master.split(2);
  Rng sovnd_rng = master.split(3);
  Rng crossover_rng = master.split(4);
  Rng mutation_rng = master.split(5);
  Rng repair_rng = master.split(6);

  QModel model(cfg.alpha, cfg.gamma, cfg.epsilon);
  DepotFrequency freq(inst.n_depots);
  AdaptiveMemory memory;
  SovndContext ctx{inst, cfg, model, freq, memory,
                   std::numeric_limits<double>::infinity(), construct_rng, sovnd_rng};

  Population pop(cfg.population_size, inst);
  initialize_population(pop, ctx);

  RunResult res;
  res.seed = cfg.seed;
  res.config_fingerprint = cfg.fingerprint();
  res.best = pop.best().sol;
  res.best_f = pop.best().f;
  res.best_generation = 0;
  res.best_time_s = elapsed();
  if (cfg.record_trace) res.trace.push_back({0, res.best_f});

  auto target_hit = [&] {
    return cfg.target_objective >= 0 && res.best_f <= cfg.target_objective + 1e-6;
  };

  long long no_improve = 0;  // I_n
  long long gen = 0;
  if (!target_hit()) {
    for (gen = 1; gen <= cfg.max_generations; ++gen) {
      if (cfg.time_limit_s > 0 && elapsed() >= cfg.time_limit_s) break;

      Parents par = select_parents(pop, cfg.random_parents, engine_rng);
      Solution child = crossover_offspring(pop.member(par.a).sol, pop.member(par.b).sol,
                                           pop.member(par.c).sol, inst, cfg, crossover_rng);
      if (!child.depot_feasible(inst) || !child.capacity_feasible(inst))
        child = repair(std::move(child), inst, freq, repair_rng);
      child = mutate(std::move(child), inst, cfg, mutation_rng);

      auto out = rl_sovnd(std::move(child), inst, model, cfg, ctx.best_f, sovnd_rng);
      Solution local;
      bool have_local = false;
      if (out.has_feasible) {
        local = std::move(out.best_feasible);
        have_local = true;
      } else {
        // No feasible point seen during the descent: push the end point
        // through the repair and keep it only if that made it feasible.
        Solution fixed = repair(std::move(out.final_current), inst, freq, repair_rng);
        if (fixed.is_feasible(inst)) {
          local = std::move(fixed);
          have_local = true;
        }
      }

      if (have_local) {
        freq.record(local);
        memory.push(local);
        if (local.objective < ctx.best_f) ctx.best_f = local.objective;
        if (local.objective < res.best_f - 1e-9) {
          res.best = local;
          res.best_f = local.objective;
          res.best_generation = gen;
          res.best_time_s = elapsed();
          no_improve = 0;
          if (cfg.record_trace) res.trace.push_back({gen, res.best_f});
        } else {
          ++no_improve;
        }
        pop.update(std::move(local));
      } else {
        ++no_improve;
      }

      if (target_hit()) break;
      if (no_improve > cfg.stagnation_threshold) {
        pop.replace_on_stagnation(ctx);
        no_improve = 0;
      }
    }
  }

  res.generations_run = std::min(gen, cfg.max_generations);
  res.target_reached = target_hit();
  res.total_time_s = elapsed();
  res.final_model = model;

  std::vector<Solution> members;
  for (int i = 0; i < pop.size(); ++i) members.push_back(pop.member(i).sol);
  for (int i = 0; i < pop.size(); ++i) {
    PopulationSnapshotRow row;
    row.id = i;
    row.f = pop.member(i).f;
    row.pdist = pop.size() > 1 ? population_distance(members[i], members, inst, i) : 0;
    row.age = pop.member(i).stamp;
    res.final_population.push_back(row);
  }

  // The reported objective must survive an independent re-evaluation.
  const double check = evaluate(res.best, inst);
  if (std::abs(check - res.best_f) > 1e-6)
    throw std::runtime_error("cached best objective diverged from re-evaluation");
  res.best.objective = check;
  res.best_f = check;
  return res;
}

}  // namespace llrp
