#pragma once

#include <vector>

#include "misvqa/ansatz.hpp"
#include "misvqa/graph.hpp"
#include "misvqa/statevector.hpp"

namespace misvqa {

/// Gate-level resource tally. Each applied partial mixer costs two
/// multi-controlled Toffolis whose control count is the node's degree;
/// isolated-node mixers are bare rotations and cost none.
struct ResourceCount {
  int multi_controlled_toffolis = 0;
  std::vector<int> control_arities;  // one per applied mixer, sorted
  int free_parameters = 0;
  int mixer_applications = 0;
};

/// Hamming weight summed over feasible outcomes only, divided by the full
/// total (shots, or 1 for probabilities). Infeasible mass counts as zero.
double pruned_expectation(const Distribution& dist, const Graph& g);

/// pruned_expectation / e_max. Throws UndefinedRatioError when e_max < 1.
double approximation_ratio(const Distribution& dist, const Graph& g, int e_max);

/// Probability mass on outcomes of Hamming weight exactly h, optionally
/// counting feasible outcomes only.
double summed_probability(const Distribution& dist, const Graph& g, int h, bool feasible_only = false);

/// summed_probability for every h in [0, n].
std::vector<double> summed_probability_table(const Distribution& dist, const Graph& g, bool feasible_only = false);

ResourceCount count_resources(const AnsatzPlan& plan);

}  // namespace misvqa
