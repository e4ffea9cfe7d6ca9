#include "misvqa/metrics.hpp"

#include <algorithm>
#include <bit>

#include "misvqa/errors.hpp"

namespace misvqa {

namespace {

void check_pair(const Distribution& dist, const Graph& g) {
  if (dist.n != g.node_count()) throw ParameterError("distribution width does not match graph");
  if (!(dist.total > 0.0)) throw ParameterError("distribution total must be positive");
}

bool feasible(const Graph& g, std::uint64_t z) {
  for (std::uint64_t m = z; m != 0; m &= m - 1) {
    if (g.neighbor_mask(std::countr_zero(m)) & z) return false;
  }
  return true;
}

}  // namespace

double pruned_expectation(const Distribution& dist, const Graph& g) {
  check_pair(dist, g);
  if (dist.entries.empty()) throw ParameterError("distribution is empty");
  double numerator = 0.0;
  for (const auto& e : dist.entries) {
    if (feasible(g, e.index)) numerator += e.weight * std::popcount(e.index);
  }
  return numerator / dist.total;
}

double approximation_ratio(const Distribution& dist, const Graph& g, int e_max) {
  if (e_max < 1) throw UndefinedRatioError("approximation ratio needs a maximum independent set of size >= 1");
  return pruned_expectation(dist, g) / e_max;
}

double summed_probability(const Distribution& dist, const Graph& g, int h, bool feasible_only) {
  check_pair(dist, g);
  if (h < 0 || h > g.node_count()) throw ParameterError("Hamming weight out of range");
  double mass = 0.0;
  for (const auto& e : dist.entries) {
    if (std::popcount(e.index) != h) continue;
    if (feasible_only && !feasible(g, e.index)) continue;
    mass += e.weight;
  }
  return mass / dist.total;
}

std::vector<double> summed_probability_table(const Distribution& dist, const Graph& g, bool feasible_only) {
  check_pair(dist, g);
  std::vector<double> table(static_cast<std::size_t>(g.node_count()) + 1, 0.0);
  for (const auto& e : dist.entries) {
    if (feasible_only && !feasible(g, e.index)) continue;
    table[static_cast<std::size_t>(std::popcount(e.index))] += e.weight;
  }
  for (double& v : table) v /= dist.total;
  return table;
}

ResourceCount count_resources(const AnsatzPlan& plan) {
  ResourceCount rc;
  rc.free_parameters = free_parameter_count(plan);
  if (plan.kind == AnsatzKind::QaoaPlus) return rc;
  for (int k = 0; k < plan.depth; ++k) {
    for (int v = 0; v < plan.node_count(); ++v) {
      if (plan.masked(k, v)) continue;
      const int arity = plan.graph.degree(v);
      ++rc.mixer_applications;
      rc.control_arities.push_back(arity);
      if (arity > 0) rc.multi_controlled_toffolis += 2;
    }
  }
  std::sort(rc.control_arities.begin(), rc.control_arities.end());
  return rc;
}

}  // namespace misvqa
