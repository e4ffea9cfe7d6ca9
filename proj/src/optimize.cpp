#include "misvqa/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "misvqa/errors.hpp"
#include "misvqa/random.hpp"

namespace misvqa {

std::string to_string(OptimizerMethod method) {
  return method == OptimizerMethod::NelderMead ? "nelder_mead" : "coordinate_descent";
}

OptimizerMethod parse_optimizer_method(const std::string& text) {
  if (text == "nelder_mead" || text == "simplex") return OptimizerMethod::NelderMead;
  if (text == "coordinate_descent") return OptimizerMethod::CoordinateDescent;
  throw ParameterError("unknown optimizer method '" + text + "'");
}

std::string to_string(ObjectiveKind kind) { return kind == ObjectiveKind::Penalized ? "penalized" : "hamming"; }

void OptimizerConfig::validate() const {
  if (max_evals < 0) throw ParameterError("max_evals must be >= 1 (or 0 for the default)");
  if (!(xtol > 0.0) || !(ftol > 0.0)) throw ParameterError("tolerances must be positive");
  if (restarts < 0) throw ParameterError("restarts must be >= 0");
  if (!(initial_step > 0.0)) throw ParameterError("initial_step must be positive");
}

double wrap_angle(double theta) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative can round back up to exactly 2*pi.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

namespace {

struct BudgetExhausted {};

using Point = std::vector<double>;

// Counts evaluations, reduces angles, rejects non-finite values, and keeps
// the incumbent.
class Evaluator {
 public:
  Evaluator(const Objective& f, const OptimizerConfig& cfg, int budget, OptimResult& result)
      : f_(f), cfg_(cfg), budget_(budget), result_(result) {}

  double operator()(const Point& x) {
    if (result_.evals_used >= budget_) throw BudgetExhausted{};
    Point arg = x;
    if (cfg_.periodic) {
      for (double& v : arg) v = wrap_angle(v);
    }
    const double value = f_(arg);
    ++result_.evals_used;
    if (!std::isfinite(value)) {
      std::ostringstream os;
      os << "objective returned " << value << " at (";
      for (std::size_t i = 0; i < arg.size(); ++i) os << (i ? ", " : "") << arg[i];
      os << ")";
      throw ObjectiveError(os.str(), arg);
    }
    if (result_.evals_used == 1 || value > result_.best_value) {
      result_.best_value = value;
      result_.best_point = arg;
    }
    result_.incumbent_history.push_back(result_.best_value);
    return value;
  }

 private:
  const Objective& f_;
  const OptimizerConfig& cfg_;
  int budget_;
  OptimResult& result_;
};

// Adaptive-coefficient Nelder-Mead (Gao & Han), written for maximization.
// Returns true when the simplex collapsed below both tolerances.
bool nelder_mead(Evaluator& eval, const Point& start, double start_value, const OptimizerConfig& cfg,
                 std::span<const double> step_signs) {
  const std::size_t n = start.size();
  const double dn = static_cast<double>(n);
  // The adaptive coefficients reduce to the classic (1, 2, 1/2, 1/2) at n = 2
  // and degenerate below it.
  const bool adaptive = n >= 2;
  const double reflect = 1.0;
  const double expand = adaptive ? 1.0 + 2.0 / dn : 2.0;
  const double contract = adaptive ? 0.75 - 1.0 / (2.0 * dn) : 0.5;
  const double shrink = adaptive ? 1.0 - 1.0 / dn : 0.5;

  std::vector<Point> x(n + 1, start);
  std::vector<double> fx(n + 1);
  fx[0] = start_value;
  for (std::size_t i = 0; i < n; ++i) {
    x[i + 1][i] += cfg.initial_step * step_signs[i];
    fx[i + 1] = eval(x[i + 1]);
  }

  std::vector<std::size_t> idx(n + 1);
  Point centroid(n);
  auto along = [&](double t, const Point& from) {
    Point p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = centroid[i] + t * (from[i] - centroid[i]);
    return p;
  };

  while (true) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fx[a] > fx[b]; });
    {
      std::vector<Point> xs(n + 1);
      std::vector<double> fs(n + 1);
      for (std::size_t k = 0; k <= n; ++k) {
        xs[k] = std::move(x[idx[k]]);
        fs[k] = fx[idx[k]];
      }
      x = std::move(xs);
      fx = std::move(fs);
    }

    double fspread = 0.0;
    double xspread = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      fspread = std::max(fspread, std::abs(fx[0] - fx[k]));
      for (std::size_t i = 0; i < n; ++i) xspread = std::max(xspread, std::abs(x[k][i] - x[0][i]));
    }
    if (fspread <= cfg.ftol && xspread <= cfg.xtol) return true;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += x[k][i] / dn;
    }
    const Point& worst = x[n];

    const Point xr = along(-reflect, worst);
    const double fr = eval(xr);
    if (fr > fx[0]) {
      const Point xe = along(-reflect * expand, worst);
      const double fe = eval(xe);
      if (fe > fr) {
        x[n] = xe;
        fx[n] = fe;
      } else {
        x[n] = xr;
        fx[n] = fr;
      }
      continue;
    }
    if (fr > fx[n - 1]) {
      x[n] = xr;
      fx[n] = fr;
      continue;
    }
    if (fr > fx[n]) {
      const Point xc = along(-reflect * contract, worst);
      const double fc = eval(xc);
      if (fc >= fr) {
        x[n] = xc;
        fx[n] = fc;
        continue;
      }
    } else {
      const Point xc = along(contract, worst);
      const double fc = eval(xc);
      if (fc > fx[n]) {
        x[n] = xc;
        fx[n] = fc;
        continue;
      }
    }
    for (std::size_t k = 1; k <= n; ++k) {
      for (std::size_t i = 0; i < n; ++i) x[k][i] = x[0][i] + shrink * (x[k][i] - x[0][i]);
      fx[k] = eval(x[k]);
    }
  }
}

// Compass search: probe +-step along each axis, halve the step after a sweep
// without improvement.
bool coordinate_descent(Evaluator& eval, Point x, double fx, const OptimizerConfig& cfg) {
  double step = cfg.initial_step;
  while (step > cfg.xtol) {
    bool improved = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (double dir : {1.0, -1.0}) {
        Point trial = x;
        trial[i] += dir * step;
        const double ft = eval(trial);
        if (ft > fx) {
          x = std::move(trial);
          fx = ft;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return true;
}

}  // namespace

OptimResult maximize(const Objective& objective, int dim, const OptimizerConfig& cfg,
                     std::span<const double> start) {
  if (dim < 1) throw ParameterError("optimizer dimension must be >= 1");
  cfg.validate();
  if (!start.empty() && start.size() != static_cast<std::size_t>(dim)) {
    throw ParameterError("start point has wrong dimension");
  }
  OptimResult result;
  Evaluator eval(objective, cfg, cfg.eval_budget(dim), result);
  Rng rng(cfg.seed);

  Point x0 = start.empty() ? Point(static_cast<std::size_t>(dim), 0.0) : Point(start.begin(), start.end());
  try {
    double f0 = eval(x0);
    std::vector<double> signs(static_cast<std::size_t>(dim), 1.0);
    for (int run = 0; run <= cfg.restarts; ++run) {
      if (run > 0) {
        // Restart around the incumbent with a freshly oriented simplex.
        x0 = result.best_point;
        f0 = result.best_value;
        for (double& s : signs) s = (rng() & 1U) ? 1.0 : -1.0;
      }
      result.converged = cfg.method == OptimizerMethod::NelderMead ? nelder_mead(eval, x0, f0, cfg, signs)
                                                                   : coordinate_descent(eval, x0, f0, cfg);
    }
  } catch (const BudgetExhausted&) {
    result.converged = false;
  }
  return result;
}

AnsatzObjective::AnsatzObjective(AnsatzPlan plan, ObjectiveKind kind) : executor_(std::move(plan)), kind_(kind) {
  if (kind_ == ObjectiveKind::Penalized) {
    const auto& t = executor_.tables();
    const double lambda = executor_.plan().lambda;
    values_.resize(t.weight.size());
    for (std::size_t z = 0; z < values_.size(); ++z) values_[z] = t.weight[z] - lambda * t.violations[z];
  }
}

double AnsatzObjective::evaluate(const ParameterSet& params) {
  const StateVector& sv = executor_.run(params);
  return kind_ == ObjectiveKind::Penalized ? sv.expectation_values(values_)
                                           : sv.expectation_levels(executor_.tables().weight);
}

double AnsatzObjective::operator()(std::span<const double> free) {
  return evaluate(unpack_parameters(executor_.plan(), free));
}

double evaluate_objective(const AnsatzPlan& plan, const ParameterSet& params, ObjectiveKind kind) {
  AnsatzObjective objective(plan, kind);
  return objective.evaluate(params);
}

}  // namespace misvqa
