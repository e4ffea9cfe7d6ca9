#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "misvqa/optimize.hpp"
#include "misvqa/solver.hpp"

namespace misvqa {

/// One experiment: a grid over the list-valued knobs, run on `graph_count`
/// graphs per edge probability, `repetitions` times each.
///
/// Seed derivation from the root `seed`:
///   graph   = derive_seed(seed, {1, n, bits(P), graph_index})
///   run     = derive_seed(seed, {2, graph_seed, repetition})
/// so every grid cell sees the same graphs and the same optimizer streams.
struct ExperimentConfig {
  std::string id = "experiment";
  std::uint64_t seed = 1;
  int repetitions = 1;
  int workers = 1;
  std::string output_dir;  // empty: nothing is written

  // algorithm
  std::string algorithm = "qao";  // qaoa_plus | qao | dqva
  std::vector<int> depths{1};
  std::vector<double> lambdas{1.0};
  std::vector<bool> vector_beta{false};
  std::vector<std::string> initials{"zero"};  // zero | w (qao)
  std::vector<int> budgets{3};
  int rounds = 1;
  bool zero_start = true;
  int greedy_starts = 1;

  // graph family
  int n = 8;
  std::vector<double> edge_probabilities{0.2};
  int graph_count = 1;
  bool connected_only = false;
  std::string graph_file;  // overrides generation when set

  OptimizerConfig optimizer;
  Measurement measurement;

  void validate() const;
};

ExperimentConfig parse_experiment_config(const std::string& yaml_text);
ExperimentConfig load_experiment_config(const std::string& path);
std::string to_yaml(const ExperimentConfig& cfg);

struct ExperimentResult {
  std::vector<RunRecord> records;   // grid order, independent of worker count
  std::vector<std::string> errors;  // one line per failed run
};

/// Generates graphs, runs every (cell, graph, repetition) job, and when
/// `cfg.output_dir` is set writes runs.csv, runs.jsonl, trace.csv,
/// summary.csv and the config echo config.yaml there.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Long-format aggregate: group columns, metric, mean, std (sample), count,
/// and the contributing run ids.
struct PlotTable {
  std::vector<std::string> group_keys;
  struct Row {
    std::vector<std::string> group_values;
    std::string metric;
    double mean = 0.0;
    double std = 0.0;
    int count = 0;
    std::vector<std::string> run_ids;
  };
  std::vector<Row> rows;

  std::string to_csv() const;
};

/// Metrics: ratio, pruned_expectation, sp_opt, sp_subopt, best_weight,
/// best_ratio, infeasible_mass, toffolis, free_parameters, evals. Grouping
/// by "round" expands each record into one row per randomization round with
/// metrics incumbent and incumbent_ratio. Other keys name record fields
/// (algorithm, n, P, graph_index) or config echo entries (p, lambda, ...).
PlotTable emit_plot_data(const std::vector<RunRecord>& records, const std::vector<std::string>& group_keys,
                         const std::vector<std::string>& metrics = {});

std::vector<RunRecord> load_records(const std::string& jsonl_path);

}  // namespace misvqa
