#include "misvqa/solver.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <numeric>
#include <sstream>

#include "misvqa/errors.hpp"
#include "misvqa/random.hpp"

namespace misvqa {

namespace {

// Stream tags for derive_seed.
enum SeedTag : std::uint64_t {
  kTagOptimizer = 1,
  kTagSample = 2,
  kTagGreedy = 3,
  kTagSelect = 4,
  kTagOrder = 5,
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Distribution measure(const StateVector& sv, const Measurement& m, std::uint64_t seed) {
  if (m.mode == MeasurementMode::Sampled) return sv.sample(m.shots, seed);
  return sv.full_distribution(0.0);
}

bool feasible(const Graph& g, std::uint64_t z) {
  for (std::uint64_t m = z; m != 0; m &= m - 1) {
    if (g.neighbor_mask(std::countr_zero(m)) & z) return false;
  }
  return true;
}

// Fills the distribution-derived metrics of a record.
void summarize(RunRecord& rec, const Distribution& dist, const Graph& g, const Measurement& m) {
  rec.pruned_expectation = pruned_expectation(dist, g);
  rec.approximation_ratio = approximation_ratio(dist, g, rec.e_max);
  rec.sp_table = summed_probability_table(dist, g, false);
  const auto feasible_sp = summed_probability_table(dist, g, true);
  rec.sp_opt = feasible_sp[static_cast<std::size_t>(rec.e_max)];
  rec.sp_subopt = 0.0;
  for (int h = 0; h < rec.e_max; ++h) rec.sp_subopt += feasible_sp[static_cast<std::size_t>(h)];
  const double feasible_mass = std::accumulate(feasible_sp.begin(), feasible_sp.end(), 0.0);
  rec.infeasible_mass = std::max(0.0, 1.0 - feasible_mass);
  rec.best_bitstring = best_observed(dist, g, m.support_cutoff);
  rec.best_weight = rec.best_bitstring.weight();
}

GraphInfo describe(const Graph& g) {
  GraphInfo info;
  info.n = g.node_count();
  info.edges = static_cast<int>(g.edge_count());
  return info;
}

void check_measurement(const Measurement& m) {
  if (m.mode == MeasurementMode::Sampled && m.shots < 1) throw ParameterError("shots must be >= 1");
  if (!(m.support_cutoff >= 0.0)) throw ParameterError("support cutoff must be >= 0");
}

// Shared body of the fixed-ansatz solvers: optimize from zero angles, read
// out the optimized state once.
RunRecord solve_fixed(AnsatzPlan plan, ObjectiveKind kind, const SolveConfig& cfg, RunRecord rec) {
  const auto start = Clock::now();
  check_measurement(cfg.measurement);
  rec.resources = count_resources(plan);
  AnsatzObjective objective(std::move(plan), kind);
  const Graph& g = objective.plan().graph;
  rec.graph = describe(g);
  rec.e_max = exact_mis(g).size;

  OptimizerConfig opt = cfg.optimizer;
  opt.seed = derive_seed(cfg.seed, {kTagOptimizer});
  const OptimResult res =
      maximize([&](std::span<const double> x) { return objective(x); }, objective.dimension(), opt);

  const StateVector& sv = objective.executor().run(unpack_parameters(objective.plan(), res.best_point));
  const Distribution dist = measure(sv, cfg.measurement, derive_seed(cfg.seed, {kTagSample}));
  summarize(rec, dist, g, cfg.measurement);
  rec.objective_value = res.best_value;
  rec.evals = res.evals_used;
  rec.optimizer_calls = 1;
  TraceEntry t;
  t.incumbent_weight = rec.best_weight;
  t.objective = res.best_value;
  t.active_mixers = rec.resources.mixer_applications;
  t.layers = objective.plan().depth;
  t.evals = res.evals_used;
  rec.trace.push_back(t);
  rec.config["optimizer.converged"] = res.converged ? "true" : "false";
  rec.wall_time_s = seconds_since(start);
  return rec;
}

}  // namespace

int RunRecord::first_round_reaching(int weight) const {
  for (const auto& t : trace) {
    if (t.incumbent_weight >= weight) return t.round;
  }
  return -1;
}

int RunRecord::first_call_reaching(int weight) const {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].incumbent_weight >= weight) return static_cast<int>(i) + 1;
  }
  return -1;
}

BitString best_observed(const Distribution& dist, const Graph& g, double support_cutoff) {
  const double threshold = dist.sampled ? 0.0 : support_cutoff;
  BitString best = BitString::zeros(g.node_count());
  bool have = false;
  for (const auto& e : dist.entries) {
    if (!(dist.probability(e) > threshold) || !feasible(g, e.index)) continue;
    const BitString s = dist.bitstring(e);
    if (!have || s.weight() > best.weight() || (s.weight() == best.weight() && s < best)) {
      best = s;
      have = true;
    }
  }
  return best;
}

RunRecord solve_qaoa_plus(const Graph& g, int depth, double lambda, const SolveConfig& cfg) {
  if (depth < 1) throw ParameterError("depth must be >= 1");
  RunRecord rec;
  rec.algorithm = "qaoa_plus";
  rec.config["p"] = std::to_string(depth);
  rec.config["lambda"] = format_double(lambda);
  return solve_fixed(build_qaoa_plus(g, depth, lambda), ObjectiveKind::Penalized, cfg, std::move(rec));
}

RunRecord solve_qao(const Graph& g, int depth, bool vector_beta, const InitialState& initial,
                    const SolveConfig& cfg) {
  if (depth < 1) throw ParameterError("depth must be >= 1");
  RunRecord rec;
  rec.algorithm = "qao";
  rec.config["p"] = std::to_string(depth);
  rec.config["vector_beta"] = vector_beta ? "true" : "false";
  rec.config["initial"] = initial.kind == InitialState::Kind::Basis && initial.basis.weight() == 0
                              ? std::string("zero")
                              : initial.to_string();
  return solve_fixed(build_qao(g, depth, vector_beta, initial), ObjectiveKind::Hamming, cfg, std::move(rec));
}

std::vector<std::uint64_t> select_active_mixers(const Graph& g, std::uint64_t mask, int budget,
                                                std::uint64_t seed) {
  const int n = g.node_count();
  budget = std::clamp(budget, 1, n);
  const std::uint64_t full = (1ULL << n) - 1;
  std::vector<int> unmasked;
  for (std::uint64_t m = full & ~mask; m != 0; m &= m - 1) unmasked.push_back(std::countr_zero(m));
  if (unmasked.empty()) return {};

  Rng rng(seed);
  auto draw = [&](int count) {
    std::vector<int> pool = unmasked;
    std::shuffle(pool.begin(), pool.end(), rng);
    std::uint64_t layer = 0;
    for (int i = 0; i < count; ++i) layer |= 1ULL << pool[static_cast<std::size_t>(i)];
    return layer;
  };

  const int u = static_cast<int>(unmasked.size());
  if (u >= budget) return {draw(budget)};
  const int layers = (budget + u - 1) / u;
  std::vector<std::uint64_t> out(static_cast<std::size_t>(layers - 1), full & ~mask);
  out.push_back(draw(budget - (layers - 1) * u));
  return out;
}

namespace {

struct WarmStartResult {
  BitString best;
  Distribution last_dist;
  AnsatzPlan last_plan;
  double last_objective = 0.0;
  bool ran = false;
};

std::vector<BitString> collect_warm_starts(const Graph& g, const DqvaConfig& cfg) {
  std::vector<BitString> starts;
  auto add = [&](const BitString& s) {
    if (s.size() != g.node_count()) throw ParameterError("warm start length does not match graph");
    if (!is_independent(g, s)) throw FeasibilityError("warm start " + s.to_string() + " is not an independent set");
    if (std::find(starts.begin(), starts.end(), s) == starts.end()) starts.push_back(s);
  };
  for (const auto& s : cfg.extra_starts) add(s);
  if (cfg.zero_start) add(BitString::zeros(g.node_count()));
  for (int i = 0; i < cfg.greedy_starts; ++i) {
    add(greedy_mis(g, derive_seed(cfg.seed, {kTagGreedy, static_cast<std::uint64_t>(i)})));
  }
  if (starts.empty()) throw ParameterError("DQVA needs at least one warm start");
  return starts;
}

// Mixer order over every node, shuffled among the nodes not fixed by `state`.
std::vector<int> shuffle_free_slots(const Graph& g, const std::vector<int>& order, const BitString& state,
                                    std::uint64_t seed) {
  AnsatzPlan probe = build_dqva(g, 1, BitString::zeros(g.node_count()));
  probe.mixer_order[0] = order;
  probe = randomize_order(apply_mask(probe, state), seed);
  return probe.mixer_order[0];
}

}  // namespace

RunRecord solve_dqva(const Graph& g, const DqvaConfig& cfg) {
  const auto start = Clock::now();
  if (cfg.rounds < 1) throw ParameterError("DQVA needs at least one randomization round");
  check_measurement(cfg.measurement);
  const int n = g.node_count();
  const int budget = std::clamp(cfg.mixer_budget, 1, n);
  const std::vector<BitString> starts = collect_warm_starts(g, cfg);

  RunRecord rec;
  rec.algorithm = "dqva";
  rec.graph = describe(g);
  rec.e_max = exact_mis(g).size;
  rec.config["budget"] = std::to_string(budget);
  rec.config["m"] = std::to_string(cfg.rounds);
  rec.config["warm_starts"] = std::to_string(starts.size());

  std::vector<WarmStartResult> results(starts.size());
  // Incumbent across all warm starts, so the trace never decreases.
  int global_best = 0;
  for (std::size_t j = 0; j < starts.size(); ++j) {
    WarmStartResult& out = results[j];
    BitString init = starts[j];
    out.best = init;
    global_best = std::max(global_best, init.weight());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    for (int r = 1; r <= cfg.rounds; ++r) {
      const auto tag_j = static_cast<std::uint64_t>(j);
      const auto tag_r = static_cast<std::uint64_t>(r);
      if (r > 1) order = shuffle_free_slots(g, order, init, derive_seed(cfg.seed, {kTagOrder, tag_j, tag_r, 0}));
      int h_new = init.weight();
      int h_old = -1;
      int update = 0;
      while (h_new > h_old) {
        ++update;
        const auto tag_u = static_cast<std::uint64_t>(update);
        if (cfg.reshuffle_on_update && update > 1) {
          order = shuffle_free_slots(g, order, init, derive_seed(cfg.seed, {kTagOrder, tag_j, tag_r, tag_u}));
        }
        const auto active =
            select_active_mixers(g, init.bits(), budget, derive_seed(cfg.seed, {kTagSelect, tag_j, tag_r, tag_u}));
        // Every node fixed: nothing left to mix.
        if (active.empty()) break;

        AnsatzPlan plan = build_dqva(g, static_cast<int>(active.size()), init);
        const std::uint64_t full = (1ULL << n) - 1;
        for (std::size_t k = 0; k < active.size(); ++k) {
          plan.mixer_order[k] = order;
          plan.mask[k] = full & ~active[k];
        }

        AnsatzObjective objective(plan, ObjectiveKind::Hamming);
        OptimizerConfig opt = cfg.optimizer;
        opt.seed = derive_seed(cfg.seed, {kTagOptimizer, tag_j, tag_r, tag_u});
        const OptimResult res =
            maximize([&](std::span<const double> x) { return objective(x); }, objective.dimension(), opt);
        const StateVector& sv = objective.executor().run(unpack_parameters(plan, res.best_point));
        Distribution dist = measure(sv, cfg.measurement, derive_seed(cfg.seed, {kTagSample, tag_j, tag_r, tag_u}));

        const BitString q = best_observed(dist, g, cfg.measurement.support_cutoff);
        h_old = init.weight();
        h_new = q.weight();
        init = q;
        if (h_new > out.best.weight()) out.best = q;
        global_best = std::max(global_best, out.best.weight());

        TraceEntry t;
        t.warm_start = static_cast<int>(j);
        t.round = r;
        t.update = update;
        t.incumbent_weight = global_best;
        t.objective = res.best_value;
        t.active_mixers = plan.unmasked_mixer_count();
        t.layers = plan.depth;
        t.evals = res.evals_used;
        rec.trace.push_back(t);
        rec.evals += res.evals_used;
        ++rec.optimizer_calls;

        out.last_dist = std::move(dist);
        out.last_plan = std::move(plan);
        out.last_objective = res.best_value;
        out.ran = true;
      }
    }
  }

  std::size_t winner = 0;
  for (std::size_t j = 1; j < results.size(); ++j) {
    const BitString& a = results[j].best;
    const BitString& b = results[winner].best;
    if (a.weight() > b.weight() || (a.weight() == b.weight() && a < b)) winner = j;
  }
  const WarmStartResult& best = results[winner];
  if (best.ran) {
    summarize(rec, best.last_dist, g, cfg.measurement);
    rec.resources = count_resources(best.last_plan);
    rec.objective_value = best.last_objective;
  } else {
    // The warm start was already fully fixed; its basis state is the output.
    Distribution d;
    d.n = n;
    d.entries.push_back({best.best.bits(), 1.0});
    summarize(rec, d, g, cfg.measurement);
    rec.objective_value = best.best.weight();
  }
  rec.best_bitstring = best.best;
  rec.best_weight = best.best.weight();
  rec.config["winning_start"] = starts[winner].to_string();
  rec.wall_time_s = seconds_since(start);
  return rec;
}

}  // namespace misvqa
