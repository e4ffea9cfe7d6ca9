#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "misvqa/ansatz.hpp"
#include "misvqa/graph.hpp"
#include "misvqa/metrics.hpp"
#include "misvqa/optimize.hpp"
#include "misvqa/statevector.hpp"

namespace misvqa {

enum class MeasurementMode { Exact, Sampled };

/// How an optimized state is read out. Exact mode keeps every probability;
/// an outcome counts as "observed" (eligible to become the reported or
/// incumbent bitstring) when its probability exceeds `support_cutoff`.
/// Sampled mode draws `shots` outcomes and observes whatever was drawn.
struct Measurement {
  MeasurementMode mode = MeasurementMode::Exact;
  std::int64_t shots = 1024;
  double support_cutoff = 1e-3;
};

struct SolveConfig {
  OptimizerConfig optimizer;
  Measurement measurement;
  std::uint64_t seed = 0;
};

struct DqvaConfig {
  int mixer_budget = 1;  // clamped into [1, n]
  int rounds = 1;        // randomization rounds m
  bool zero_start = true;
  int greedy_starts = 1;
  std::vector<BitString> extra_starts;
  /// Reshuffle mixer order after every ansatz update instead of only at the
  /// start of each randomization round.
  bool reshuffle_on_update = false;
  OptimizerConfig optimizer;
  Measurement measurement;
  std::uint64_t seed = 0;
};

/// One optimizer call inside a solve.
struct TraceEntry {
  int warm_start = 0;
  int round = 1;   // randomization round (1-based)
  int update = 1;  // ansatz update within the round (1-based)
  int incumbent_weight = 0;
  double objective = 0.0;
  int active_mixers = 0;
  int layers = 0;
  int evals = 0;
};

struct GraphInfo {
  int n = 0;
  int edges = 0;
  double edge_probability = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  int index = 0;
  std::string source = "generated";
};

struct RunRecord {
  static constexpr int kSchemaVersion = 1;

  std::string run_id;
  std::string algorithm;  // qaoa_plus | qao | dqva
  GraphInfo graph;
  /// Flat echo of the knobs that produced this run (p, lambda, initial, ...).
  std::map<std::string, std::string> config;

  BitString best_bitstring;
  int best_weight = 0;
  int e_max = 0;
  double approximation_ratio = 0.0;
  double pruned_expectation = 0.0;
  double objective_value = 0.0;
  std::vector<double> sp_table;  // all mass by Hamming weight
  double sp_opt = 0.0;           // feasible mass at weight e_max
  double sp_subopt = 0.0;        // feasible mass below e_max
  double infeasible_mass = 0.0;
  ResourceCount resources;
  int evals = 0;
  int optimizer_calls = 0;
  std::vector<TraceEntry> trace;
  double wall_time_s = 0.0;

  /// First randomization round whose incumbent reached `weight`, or -1.
  int first_round_reaching(int weight) const;
  /// 1-based index of the first optimizer call whose incumbent reached
  /// `weight`, or -1.
  int first_call_reaching(int weight) const;
};

RunRecord solve_qaoa_plus(const Graph& g, int depth, double lambda, const SolveConfig& cfg);

RunRecord solve_qao(const Graph& g, int depth, bool vector_beta, const InitialState& initial,
                    const SolveConfig& cfg);

RunRecord solve_dqva(const Graph& g, const DqvaConfig& cfg);

/// Active partial mixers as one node bitmask per layer. Draws `budget` of the
/// unmasked nodes uniformly when enough are available; otherwise fills whole
/// layers with every unmasked node and adds layers until the budget is used.
/// Empty when every node is masked.
std::vector<std::uint64_t> select_active_mixers(const Graph& g, std::uint64_t mask, int budget, std::uint64_t seed);

/// Observed outcome with the largest feasible Hamming weight; ties go to the
/// lexicographically smallest string. Falls back to all zeros.
BitString best_observed(const Distribution& dist, const Graph& g, double support_cutoff);

}  // namespace misvqa
