// misvqa: generate graphs, solve one instance, run sweeps, aggregate results.
//
//   misvqa generate --n 10 --P 0.2 --count 5 --seed 3 --out graphs/
//   misvqa solve --graph g.txt --algorithm dqva --budget 5 --m 3
//   misvqa sweep --config fig2.yaml --workers 4
//   misvqa aggregate --input out/runs.jsonl --group P,p,lambda
//
// Exit codes: 0 success, 1 configuration error, 2 partial or runtime failure.

#include <bit>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "misvqa/errors.hpp"
#include "misvqa/experiment.hpp"
#include "misvqa/random.hpp"
#include "misvqa/record.hpp"

using namespace misvqa;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

std::string default_output_dir() {
  const char* env = std::getenv("MISVQA_OUTPUT_DIR");
  return env ? env : "";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct OptimizerFlags {
  std::string method = "nelder_mead";
  int max_evals = 0;
  double xtol = 1e-6;
  double ftol = 1e-6;
  int restarts = 1;
  double initial_step = 0.5;
  std::string measurement = "exact";
  std::int64_t shots = 1024;
  double support_cutoff = 1e-3;

  void attach(CLI::App* app) {
    app->add_option("--optimizer", method, "nelder_mead or coordinate_descent");
    app->add_option("--max-evals", max_evals, "objective budget per optimizer call (0: 500 x dim)");
    app->add_option("--xtol", xtol);
    app->add_option("--ftol", ftol);
    app->add_option("--restarts", restarts);
    app->add_option("--initial-step", initial_step);
    app->add_option("--mode", measurement, "exact or sampled");
    app->add_option("--shots", shots);
    app->add_option("--support-cutoff", support_cutoff, "exact-mode probability needed to count as observed");
  }

  void apply(ExperimentConfig& cfg) const {
    cfg.optimizer.method = parse_optimizer_method(method);
    cfg.optimizer.max_evals = max_evals;
    cfg.optimizer.xtol = xtol;
    cfg.optimizer.ftol = ftol;
    cfg.optimizer.restarts = restarts;
    cfg.optimizer.initial_step = initial_step;
    if (measurement == "exact") {
      cfg.measurement.mode = MeasurementMode::Exact;
    } else if (measurement == "sampled") {
      cfg.measurement.mode = MeasurementMode::Sampled;
    } else {
      throw ConfigError("--mode must be exact or sampled");
    }
    cfg.measurement.shots = shots;
    cfg.measurement.support_cutoff = support_cutoff;
  }
};

int report(const ExperimentResult& result) {
  for (const auto& e : result.errors) std::cerr << "run failed: " << e << '\n';
  std::cerr << result.records.size() << " runs completed, " << result.errors.size() << " failed\n";
  return result.errors.empty() ? 0 : kExitPartial;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational MIS solvers on an exact statevector simulator"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write seeded Erdos-Renyi graphs as edge lists");
  int gen_n = 10, gen_count = 1;
  double gen_p = 0.2;
  std::uint64_t gen_seed = 1;
  bool gen_connected = false;
  std::string gen_out = default_output_dir();
  gen->add_option("--n", gen_n, "nodes")->required();
  gen->add_option("--P", gen_p, "edge probability");
  gen->add_option("--count", gen_count);
  gen->add_option("--seed", gen_seed, "root seed");
  gen->add_flag("--connected-only", gen_connected);
  gen->add_option("--out", gen_out, "directory for graph files (stdout when empty)");

  // solve
  auto* solve = app.add_subcommand("solve", "run one solver on one graph and print its record as JSON");
  ExperimentConfig one;
  one.id = "solve";
  std::string solve_graph;
  int depth = 1, budget = 3;
  double lambda = 1.0, solve_p = 0.2;
  bool vector_beta = false;
  std::string initial = "zero";
  std::string solve_out;
  OptimizerFlags solve_opt;
  solve->add_option("--graph", solve_graph, "edge-list file; otherwise one graph is generated");
  solve->add_option("--n", one.n);
  solve->add_option("--P", solve_p);
  solve->add_flag("--connected-only", one.connected_only);
  solve->add_option("--seed", one.seed, "root seed");
  solve->add_option("--algorithm", one.algorithm, "qaoa_plus, qao or dqva");
  solve->add_option("--p", depth, "ansatz depth");
  solve->add_option("--lambda", lambda, "penalty weight (qaoa_plus)");
  solve->add_flag("--vector-beta", vector_beta, "one mixer angle per node (qao)");
  solve->add_option("--initial", initial, "zero or w (qao)");
  solve->add_option("--budget", budget, "active mixers (dqva)");
  solve->add_option("--m", one.rounds, "randomization rounds (dqva)");
  solve->add_option("--greedy-starts", one.greedy_starts, "greedy warm starts (dqva)");
  solve->add_option("--output", solve_out, "write the record here instead of stdout");
  solve_opt.attach(solve);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run an experiment from a YAML config");
  std::string sweep_config, sweep_out;
  int sweep_workers = 0;
  std::uint64_t sweep_seed = 0;
  bool seed_set = false;
  sweep->add_option("--config", sweep_config, "experiment YAML")->required()->check(CLI::ExistingFile);
  sweep->add_option("--workers", sweep_workers, "worker threads (overrides config)");
  sweep->add_option("--output-dir", sweep_out, "output directory (overrides config and MISVQA_OUTPUT_DIR)");
  auto* seed_opt = sweep->add_option("--seed", sweep_seed, "root seed (overrides config)");

  // aggregate
  auto* agg = app.add_subcommand("aggregate", "group run records into a long-format mean/std table");
  std::string agg_input, agg_group, agg_metrics, agg_out;
  agg->add_option("--input", agg_input, "runs.jsonl from a sweep")->required()->check(CLI::ExistingFile);
  agg->add_option("--group", agg_group, "comma-separated group keys, e.g. P,p,lambda or budget,round")->required();
  agg->add_option("--metrics", agg_metrics, "comma-separated metrics");
  agg->add_option("--output", agg_out, "CSV path (stdout when empty)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  seed_set = seed_opt->count() > 0;

  try {
    if (*gen) {
      if (!gen_out.empty()) std::filesystem::create_directories(gen_out);
      for (int i = 0; i < gen_count; ++i) {
        const std::uint64_t seed =
            derive_seed(gen_seed, {1, static_cast<std::uint64_t>(gen_n), std::bit_cast<std::uint64_t>(gen_p),
                                   static_cast<std::uint64_t>(i)});
        const Graph g = gen_connected ? erdos_renyi_connected(gen_n, gen_p, seed) : erdos_renyi(gen_n, gen_p, seed);
        if (gen_out.empty()) {
          std::cout << "# seed " << seed << '\n' << g.to_edge_list();
        } else {
          const auto path = std::filesystem::path(gen_out) /
                            ("er_n" + std::to_string(gen_n) + "_P" + format_number(gen_p) + "_" +
                             std::to_string(i) + ".txt");
          g.save(path.string());
          std::cout << path.string() << '\n';
        }
      }
      return 0;
    }

    if (*solve) {
      one.depths = {depth};
      one.lambdas = {lambda};
      one.vector_beta = {vector_beta};
      one.initials = {initial};
      one.budgets = {budget};
      one.edge_probabilities = {solve_p};
      one.graph_file = solve_graph;
      solve_opt.apply(one);
      const ExperimentResult result = run_experiment(one);
      if (!result.errors.empty()) {
        std::cerr << result.errors.front() << '\n';
        return kExitPartial;
      }
      const std::string text = to_json(result.records.front()).dump(2) + "\n";
      if (solve_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream(solve_out) << text;
      }
      return 0;
    }

    if (*sweep) {
      ExperimentConfig cfg = load_experiment_config(sweep_config);
      if (sweep_workers > 0) cfg.workers = sweep_workers;
      if (seed_set) cfg.seed = sweep_seed;
      if (!sweep_out.empty()) {
        cfg.output_dir = sweep_out;
      } else if (cfg.output_dir.empty()) {
        cfg.output_dir = default_output_dir();
      }
      if (cfg.output_dir.empty()) throw ConfigError("no output directory: set output_dir, --output-dir or MISVQA_OUTPUT_DIR");
      const ExperimentResult result = run_experiment(cfg);
      std::cerr << "results in " << cfg.output_dir << '\n';
      return report(result);
    }

    if (*agg) {
      const auto records = load_records(agg_input);
      const PlotTable table = emit_plot_data(records, split_list(agg_group), split_list(agg_metrics));
      if (agg_out.empty()) {
        std::cout << table.to_csv();
      } else {
        std::ofstream(agg_out) << table.to_csv();
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParameterError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPartial;
  }
  return 0;
}
