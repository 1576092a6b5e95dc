#include "cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "llrp/engine.hpp"
#include "llrp/instance.hpp"
#include "llrp/solution.hpp"

namespace fs = std::filesystem;

namespace llrp {

namespace {

struct InstanceArgs {
  std::string path;
  std::string format = "canonical";
  int vehicles = 0;
  int max_depots = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--instance", path, "instance file")->required();
    cmd->add_option("--format", format, "canonical|prodhon|tuzun|barreto");
    cmd->add_option("--vehicles", vehicles, "fleet size (raw formats)");
    cmd->add_option("--max-depots", max_depots, "open-depot limit (raw formats)");
  }

  Instance load(int delta) const {
    InstanceFormat fmt = format_from_string(format);
    if (fmt == InstanceFormat::canonical) return Instance::parse_file(path, fmt, {}, delta);
    RawMeta meta{vehicles, max_depots};
    return Instance::parse_file(path, fmt, meta, delta);
  }
};

struct ConfigArgs {
  std::string preset = "rlhea";
  std::uint64_t seed = 1;
  long long generations = -1;
  double time_limit = 0.0;
  std::vector<std::string> overrides;

  void attach(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "rlhea or rlhea1..rlhea6");
    cmd->add_option("--seed", seed, "master RNG seed (env LLRP_SEED overrides)");
    cmd->add_option("--generations", generations, "generation budget");
    cmd->add_option("--time-limit", time_limit, "wall-clock limit per run, seconds");
    cmd->add_option("--set", overrides, "raw config override key=value")->take_all();
  }

  SearchConfig build() const {
    SearchConfig cfg;
    cfg.apply_preset(preset);
    cfg.seed = seed;
    if (const char* env = std::getenv("LLRP_SEED")) cfg.seed = std::strtoull(env, nullptr, 10);
    if (generations >= 0) cfg.max_generations = generations;
    if (time_limit > 0) cfg.time_limit_s = time_limit;
    for (const auto& kv : overrides) {
      auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
      cfg.set_kv(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
  }
};

// write-temp-then-rename so a crashed run never leaves a half-written report
void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << content;
  }
  fs::rename(tmp, path);
}

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int cmd_solve(const InstanceArgs& iargs, const ConfigArgs& cargs, double target,
              const std::string& out_path, const std::string& trace_path,
              const std::string& qtable_path, const std::string& pop_path) {
  SearchConfig cfg = cargs.build();
  if (target >= 0) cfg.target_objective = target;
  if (!trace_path.empty()) cfg.record_trace = true;
  Instance inst = iargs.load(cfg.granularity);

  RunResult res = run(inst, cfg);

  std::string path = out_path.empty() ? inst.name + ".sol" : out_path;
  std::ostringstream sol_text;
  write_solution(sol_text, res.best, inst);
  atomic_write(path, sol_text.str());

  if (!trace_path.empty()) {
    std::ostringstream t;
    t << "# llrp-trace-v1\ngeneration,best_f\n";
    for (const auto& p : res.trace) t << p.generation << "," << fmt2(p.best_f) << "\n";
    atomic_write(trace_path, t.str());
  }
  if (!qtable_path.empty()) {
    std::ostringstream q;
    res.final_model.dump_csv(q);
    atomic_write(qtable_path, q.str());
  }
  if (!pop_path.empty()) {
    std::ostringstream p;
    p << "# llrp-pop-v1\nmember,f,pdist,age\n";
    for (const auto& row : res.final_population)
      p << row.id << "," << fmt2(row.f) << "," << row.pdist << "," << row.age << "\n";
    atomic_write(pop_path, p.str());
  }

  std::cout << "f=" << fmt2(res.best_f) << " time=" << fmt2(res.total_time_s)
            << "s seed=" << res.seed << " generations=" << res.generations_run << " solution="
            << path << "\n";
  return 0;
}

int cmd_validate(const InstanceArgs& iargs, const std::string& sol_path, int delta) {
  Instance inst = iargs.load(delta);
  double declared = -1.0;
  Solution sol = read_solution_file(sol_path, inst, &declared);

  bool all_ok = true;
  auto check = [&](const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << " " << name;
    if (!ok && !detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    all_ok = all_ok && ok;
  };

  // every customer exactly once
  std::vector<int> seen(inst.n_vertices(), 0);
  std::string dup_detail, missing_detail;
  for (const auto& r : sol.routes)
    for (int v : r.seq)
      if (++seen[v] > 1) dup_detail = "customer " + std::to_string(inst.orig_ids[v]);
  for (int v = inst.n_depots; v < inst.n_vertices(); ++v)
    if (!seen[v]) missing_detail = "customer " + std::to_string(inst.orig_ids[v]);
  check("customers visited exactly once", dup_detail.empty() && missing_detail.empty(),
        dup_detail.empty() ? missing_detail : dup_detail);

  check("route count within fleet size",
        static_cast<int>(sol.routes.size()) <= inst.fleet_size,
        std::to_string(sol.routes.size()) + " > " + std::to_string(inst.fleet_size));

  std::vector<int> used;
  for (const auto& r : sol.routes) used.push_back(r.depot);
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  check("open depots within limit", static_cast<int>(used.size()) <= inst.max_open_depots,
        std::to_string(used.size()) + " > " + std::to_string(inst.max_open_depots));

  bool caps_ok = true;
  std::string cap_detail;
  for (std::size_t i = 0; i < sol.routes.size(); ++i) {
    double load = 0.0;
    for (int v : sol.routes[i].seq) load += inst.demand_of(v);
    if (load > inst.capacity + 1e-9) {
      caps_ok = false;
      cap_detail = "route " + std::to_string(i + 1) + " load " + fmt2(load);
    }
  }
  check("route loads within capacity", caps_ok, cap_detail);

  const double f = evaluate(sol, inst);
  check("declared objective matches recomputation",
        declared >= 0 && std::abs(f - declared) <= 1e-2,
        "declared " + fmt2(declared) + ", recomputed " + fmt2(f));

  std::cout << (all_ok ? "PASS" : "FAIL") << " overall (f=" << fmt2(f) << ")\n";
  return all_ok ? 0 : 1;
}

int cmd_convert(const InstanceArgs& iargs, const std::string& name, const std::string& out_path,
                int delta) {
  Instance inst = iargs.load(delta);
  if (!name.empty()) inst.name = name;
  std::ostringstream text;
  inst.write_canonical(text);
  atomic_write(out_path, text.str());
  std::cout << "wrote " << out_path << " (" << inst.n_customers << " customers, "
            << inst.n_depots << " depots)\n";
  return 0;
}

int cmd_ttt(const InstanceArgs& iargs, const ConfigArgs& cargs, double target, int runs,
            double budget, int threads, const std::string& out_path) {
  SearchConfig base = cargs.build();
  base.target_objective = target;
  base.time_limit_s = budget;
  Instance inst = iargs.load(base.granularity);

  struct Row {
    double t = 0.0;
    bool censored = false;
  };
  std::vector<Row> rows(runs);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < runs; i = next.fetch_add(1)) {
      SearchConfig cfg = base;
      cfg.seed = Rng(base.seed).split(1000 + i).seed();
      RunResult res = run(inst, cfg);
      rows[i].censored = !res.target_reached;
      rows[i].t = res.target_reached ? res.best_time_s : budget;
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::max(1, threads);
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
  std::ostringstream out;
  out << "# llrp-ttt-v1\n";
  out << "i,time_s,rho,censored\n";
  for (int i = 1; i <= runs; ++i) {
    const double rho = (2.0 * i - 1.0) / (2.0 * runs);  // (i - 0.5) / runs
    out << i << "," << fmt_g(rows[i - 1].t) << "," << fmt_g(rho) << ","
        << (rows[i - 1].censored ? 1 : 0) << "\n";
  }
  atomic_write(out_path, out.str());
  std::cout << "wrote " << out_path << " (" << runs << " runs, target " << fmt2(target) << ")\n";
  return 0;
}

int cmd_analyze_edges(const InstanceArgs& iargs, const std::string& dir,
                      const std::string& out_prefix, int delta) {
  Instance inst = iargs.load(delta);
  struct Entry {
    std::string file;
    Solution sol;
    double f;
    std::vector<std::uint64_t> arcs;
  };
  std::vector<Entry> entries;
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      Entry en;
      en.file = fs::path(f).filename().string();
      en.sol = read_solution_file(f, inst);
      en.f = evaluate(en.sol, inst);
      en.arcs = arc_set(en.sol, inst);
      entries.push_back(std::move(en));
    } catch (const std::exception& e) {
      std::cerr << "skipping " << f << ": " << e.what() << "\n";
    }
  }
  if (entries.size() < 2) throw std::runtime_error("need at least 2 parseable solutions");
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.f < b.f; });

  std::ostringstream matrix;
  matrix << "# llrp-edges-matrix-v1\n";
  matrix << "rank";
  for (std::size_t j = 0; j < entries.size(); ++j) matrix << "," << j + 1;
  matrix << "\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    matrix << i + 1;
    for (std::size_t j = 0; j < entries.size(); ++j)
      matrix << "," << common_arc_count(entries[i].arcs, entries[j].arcs);
    matrix << "\n";
  }
  atomic_write(out_prefix + "_matrix.csv", matrix.str());

  std::ostringstream ratio;
  ratio << "# llrp-edges-ratio-v1\n";
  ratio << "rank,file,f,shared_with_best\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    double r = static_cast<double>(common_arc_count(entries[0].arcs, entries[i].arcs)) /
               static_cast<double>(entries[i].arcs.size());
    ratio << i + 1 << "," << entries[i].file << "," << fmt2(entries[i].f) << "," << fmt_g(r)
          << "\n";
  }
  atomic_write(out_prefix + "_ratio.csv", ratio.str());
  std::cout << "wrote " << out_prefix << "_matrix.csv and " << out_prefix << "_ratio.csv ("
            << entries.size() << " solutions)\n";
  return 0;
}

int cmd_bench(const std::string& manifest_path, const ConfigArgs& cargs, int runs, int threads,
              const std::string& out_path, bool no_times) {
  SearchConfig base = cargs.build();
  auto rows = read_manifest(manifest_path);
  if (rows.empty()) throw std::runtime_error("manifest is empty");
  const fs::path manifest_dir = fs::path(manifest_path).parent_path();

  struct InstanceSlot {
    std::optional<Instance> inst;
    std::string error;
  };
  std::vector<InstanceSlot> instances(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    try {
      fs::path p = rows[i].path;
      if (p.is_relative()) p = manifest_dir / p;
      if (rows[i].format == InstanceFormat::canonical) {
        instances[i].inst = Instance::parse_file(p.string(), rows[i].format, {}, base.granularity);
      } else {
        RawMeta meta{rows[i].n_vehicles, rows[i].max_open_depots};
        instances[i].inst = Instance::parse_file(p.string(), rows[i].format, meta, base.granularity);
      }
    } catch (const std::exception& e) {
      instances[i].error = e.what();
    }
  }

  struct RunOut {
    double f = 0.0;
    double t = 0.0;
    std::uint64_t seed = 0;
    std::string error;
  };
  std::vector<std::vector<RunOut>> results(rows.size(), std::vector<RunOut>(runs));
  struct Task {
    std::size_t row;
    int run_idx;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!instances[i].inst) continue;
    for (int r = 0; r < runs; ++r) tasks.push_back({i, r});
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next.fetch_add(1); t < tasks.size(); t = next.fetch_add(1)) {
      const Task& task = tasks[t];
      RunOut& out = results[task.row][task.run_idx];
      try {
        SearchConfig cfg = base;
        cfg.seed = Rng(base.seed).split(task.row * 1000003ULL + task.run_idx).seed();
        out.seed = cfg.seed;
        RunResult res = run(*instances[task.row].inst, cfg);
        // independent re-check before anything reaches the report
        const double f = evaluate(res.best, *instances[task.row].inst);
        if (std::abs(f - res.best_f) > 1e-6) throw std::runtime_error("objective re-check failed");
        if (!res.best.is_feasible(*instances[task.row].inst))
          throw std::runtime_error("reported solution is infeasible");
        out.f = f;
        out.t = res.total_time_s;
      } catch (const std::exception& e) {
        out.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::max(1, threads);
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::ostringstream out;
  out << "# llrp-bench-v1\n";
  out << "name,runs,f_best,f_avg,t_avg,seeds,config,bks,gap_percent,status\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << rows[i].name << ",";
    if (!instances[i].inst) {
      std::string msg = instances[i].error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      out << "0,,,,,,,," << "error: " << msg << "\n";
      continue;
    }
    double f_best = 0.0, f_sum = 0.0, t_sum = 0.0;
    int ok = 0;
    std::string seeds, status = "ok";
    for (int r = 0; r < runs; ++r) {
      const RunOut& ro = results[i][r];
      if (!ro.error.empty()) {
        status = "error: " + ro.error;
        std::replace(status.begin(), status.end(), ',', ';');
        continue;
      }
      if (ok == 0 || ro.f < f_best) f_best = ro.f;
      f_sum += ro.f;
      t_sum += ro.t;
      if (!seeds.empty()) seeds += " ";
      seeds += std::to_string(ro.seed);
      ++ok;
    }
    if (ok == 0) {
      out << "0,,,,,,,," << status << "\n";
      continue;
    }
    out << ok << "," << fmt2(f_best) << "," << fmt2(f_sum / ok) << ","
        << (no_times ? std::string("-") : fmt2(t_sum / ok)) << "," << seeds << ","
        << base.fingerprint() << ",";
    if (rows[i].bks >= 0) {
      out << fmt2(rows[i].bks) << "," << fmt_g(100.0 * (f_best - rows[i].bks) / rows[i].bks);
    } else {
      out << ",";
    }
    out << "," << status << "\n";
  }
  atomic_write(out_path, out.str());
  std::cout << "wrote " << out_path << " (" << rows.size() << " instances x " << runs
            << " runs)\n";
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"llrp: latency location routing solver"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "run the solver on one instance");
  InstanceArgs solve_inst;
  ConfigArgs solve_cfg;
  solve_inst.attach(solve);
  solve_cfg.attach(solve);
  double solve_target = -1.0;
  std::string solve_out, solve_trace, solve_qtable, solve_pop;
  solve->add_option("--target", solve_target, "stop when the objective reaches this value");
  solve->add_option("--out", solve_out, "solution file (default <name>.sol)");
  solve->add_option("--trace", solve_trace, "write the best-objective trace CSV");
  solve->add_option("--dump-qtable", solve_qtable, "write the final Q-table CSV");
  solve->add_option("--dump-population", solve_pop, "write the final population CSV");

  // bench
  auto* bench = app.add_subcommand("bench", "batch benchmark over a manifest");
  ConfigArgs bench_cfg;
  bench_cfg.attach(bench);
  std::string bench_manifest, bench_out = "bench.csv";
  int bench_runs = 1, bench_threads = 1;
  bool bench_no_times = false;
  bench->add_option("--manifest", bench_manifest, "manifest CSV")->required();
  bench->add_option("--runs", bench_runs, "runs per instance")->check(CLI::PositiveNumber);
  bench->add_option("--threads", bench_threads, "parallel worker slots");
  bench->add_option("--out", bench_out, "report CSV path");
  bench->add_flag("--no-times", bench_no_times, "omit wall-clock columns (CI determinism)");

  // ttt
  auto* ttt = app.add_subcommand("ttt", "time-to-target experiment");
  InstanceArgs ttt_inst;
  ConfigArgs ttt_cfg;
  ttt_inst.attach(ttt);
  ttt_cfg.attach(ttt);
  double ttt_target = -1.0, ttt_budget = 60.0;
  int ttt_runs = 100, ttt_threads = 1;
  std::string ttt_out = "ttt.csv";
  ttt->add_option("--target", ttt_target, "target objective value")->required();
  ttt->add_option("--runs", ttt_runs, "independent runs")->check(CLI::PositiveNumber);
  ttt->add_option("--budget", ttt_budget, "per-run wall-clock budget, seconds");
  ttt->add_option("--threads", ttt_threads, "parallel worker slots");
  ttt->add_option("--out", ttt_out, "output CSV path");

  // validate
  auto* validate = app.add_subcommand("validate", "re-check a solution file");
  InstanceArgs val_inst;
  val_inst.attach(validate);
  std::string val_solution;
  validate->add_option("--solution", val_solution, "solution file")->required();

  // analyze-edges
  auto* edges = app.add_subcommand("analyze-edges", "shared-edge analysis of solutions");
  InstanceArgs edge_inst;
  edge_inst.attach(edges);
  std::string edge_dir, edge_out = "edges";
  edges->add_option("--dir", edge_dir, "directory of solution files")->required();
  edges->add_option("--out", edge_out, "output file prefix");

  // convert
  auto* convert = app.add_subcommand("convert", "convert a raw instance to canonical form");
  InstanceArgs conv_inst;
  conv_inst.attach(convert);
  std::string conv_out, conv_name;
  convert->add_option("--out", conv_out, "canonical output path")->required();
  convert->add_option("--name", conv_name, "instance name override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*solve)
      return cmd_solve(solve_inst, solve_cfg, solve_target, solve_out, solve_trace, solve_qtable,
                       solve_pop);
    if (*bench)
      return cmd_bench(bench_manifest, bench_cfg, bench_runs, bench_threads, bench_out,
                       bench_no_times);
    if (*ttt) {
      if (ttt_target <= 0) {
        std::cerr << "error: --target must be positive\n";
        return 2;
      }
      return cmd_ttt(ttt_inst, ttt_cfg, ttt_target, ttt_runs, ttt_budget, ttt_threads, ttt_out);
    }
    if (*validate) return cmd_validate(val_inst, val_solution, SearchConfig{}.granularity);
    if (*edges) return cmd_analyze_edges(edge_inst, edge_dir, edge_out, SearchConfig{}.granularity);
    if (*convert)
      return cmd_convert(conv_inst, conv_name, conv_out, SearchConfig{}.granularity);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {  // bad --set keys/values and the like
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace llrp
