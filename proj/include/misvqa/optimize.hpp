#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "misvqa/ansatz.hpp"

namespace misvqa {

enum class OptimizerMethod { NelderMead, CoordinateDescent };

std::string to_string(OptimizerMethod method);
OptimizerMethod parse_optimizer_method(const std::string& text);

struct OptimizerConfig {
  OptimizerMethod method = OptimizerMethod::NelderMead;
  int max_evals = 0;  // 0 means 500 * dim
  double xtol = 1e-6;
  double ftol = 1e-6;
  std::uint64_t seed = 0;
  int restarts = 1;  // fresh simplices built around the incumbent after the first run
  double initial_step = 0.5;
  bool periodic = true;  // reduce every coordinate into [0, 2*pi) before evaluating

  int eval_budget(int dim) const { return max_evals > 0 ? max_evals : 500 * dim; }
  void validate() const;
};

struct OptimResult {
  std::vector<double> best_point;  // already reduced when cfg.periodic
  double best_value = 0.0;
  int evals_used = 0;
  bool converged = false;
  std::vector<double> incumbent_history;  // best value after each evaluation
};

/// The objective returned NaN or infinity.
class ObjectiveError : public std::runtime_error {
 public:
  ObjectiveError(const std::string& what, std::vector<double> params)
      : std::runtime_error(what), params_(std::move(params)) {}
  const std::vector<double>& params() const { return params_; }

 private:
  std::vector<double> params_;
};

using Objective = std::function<double(std::span<const double>)>;

/// Derivative-free maximization starting from `start` (zeros if empty).
/// The returned value is never below the starting value.
OptimResult maximize(const Objective& objective, int dim, const OptimizerConfig& cfg,
                     std::span<const double> start = {});

/// Reduces an angle into [0, 2*pi).
double wrap_angle(double theta);

enum class ObjectiveKind { Penalized, Hamming };

std::string to_string(ObjectiveKind kind);

/// <C_obj> for a plan: weight - lambda * violations (penalized) or weight
/// (hamming), as a function of the packed free-parameter vector.
class AnsatzObjective {
 public:
  AnsatzObjective(AnsatzPlan plan, ObjectiveKind kind);

  double operator()(std::span<const double> free);
  double evaluate(const ParameterSet& params);

  const AnsatzPlan& plan() const { return executor_.plan(); }
  PlanExecutor& executor() { return executor_; }
  int dimension() const { return free_parameter_count(executor_.plan()); }

 private:
  PlanExecutor executor_;
  ObjectiveKind kind_;
  std::vector<double> values_;
};

double evaluate_objective(const AnsatzPlan& plan, const ParameterSet& params, ObjectiveKind kind);

}  // namespace misvqa
