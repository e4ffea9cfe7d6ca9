#include "misvqa/ansatz.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "misvqa/errors.hpp"
#include "misvqa/random.hpp"

namespace misvqa {

std::string to_string(AnsatzKind kind) {
  switch (kind) {
    case AnsatzKind::QaoaPlus: return "qaoa_plus";
    case AnsatzKind::QaoScalar: return "qao_scalar";
    case AnsatzKind::QaoVector: return "qao_vector";
    case AnsatzKind::Dqva: return "dqva";
  }
  return "unknown";
}

AnsatzKind parse_ansatz_kind(const std::string& text) {
  if (text == "qaoa_plus") return AnsatzKind::QaoaPlus;
  if (text == "qao_scalar") return AnsatzKind::QaoScalar;
  if (text == "qao_vector") return AnsatzKind::QaoVector;
  if (text == "dqva") return AnsatzKind::Dqva;
  throw ParameterError("unknown ansatz kind '" + text + "'");
}

std::string InitialState::to_string() const {
  switch (kind) {
    case Kind::Plus: return "plus";
    case Kind::W: return "w";
    case Kind::Basis: return basis.to_string();
  }
  return "?";
}

int AnsatzPlan::unmasked_mixer_count() const {
  int count = 0;
  for (int k = 0; k < depth; ++k) {
    count += node_count() - std::popcount(mask[static_cast<std::size_t>(k)]);
  }
  return count;
}

void AnsatzPlan::validate() const {
  const int n = node_count();
  if (depth < 1) throw ParameterError("depth must be >= 1");
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be >= 0");
  if (mixer_order.size() != static_cast<std::size_t>(depth) || mask.size() != static_cast<std::size_t>(depth)) {
    throw ParameterError("mixer order / mask layer count does not match depth");
  }
  const std::uint64_t full = (1ULL << n) - 1;
  for (int k = 0; k < depth; ++k) {
    const auto& order = mixer_order[static_cast<std::size_t>(k)];
    if (order.size() != static_cast<std::size_t>(n)) throw ParameterError("mixer order must list every node");
    std::uint64_t seen = 0;
    for (int v : order) {
      if (v < 0 || v >= n) throw ParameterError("mixer order entry out of range");
      seen |= 1ULL << v;
    }
    if (seen != full) throw ParameterError("mixer order is not a permutation");
    if (mask[static_cast<std::size_t>(k)] & ~full) throw ParameterError("mask has bits beyond node count");
  }
  if (kind == AnsatzKind::QaoaPlus) {
    if (initial.kind != InitialState::Kind::Plus) throw ParameterError("qaoa_plus starts from |+>^n");
  } else {
    if (initial.kind == InitialState::Kind::Plus) {
      throw FeasibilityError("constraint-preserving ansatz needs a feasible initial state");
    }
    if (initial.kind == InitialState::Kind::Basis) {
      if (initial.basis.size() != n) throw ParameterError("initial bitstring length does not match graph");
      if (!is_independent(graph, initial.basis)) {
        throw FeasibilityError("initial state " + initial.basis.to_string() + " is not an independent set");
      }
    }
  }
}

double ParameterSet::beta(const AnsatzPlan& plan, int layer, int node) const {
  if (has_vector_angles(plan.kind)) {
    return betas[static_cast<std::size_t>(layer * plan.node_count() + node)];
  }
  return betas[static_cast<std::size_t>(layer)];
}

int free_parameter_count(const AnsatzPlan& plan) {
  if (has_vector_angles(plan.kind)) return plan.depth + plan.unmasked_mixer_count();
  return 2 * plan.depth;
}

ParameterSet zero_parameters(const AnsatzPlan& plan) {
  ParameterSet p;
  p.gammas.assign(static_cast<std::size_t>(plan.depth), 0.0);
  const int per_layer = has_vector_angles(plan.kind) ? plan.node_count() : 1;
  p.betas.assign(static_cast<std::size_t>(plan.depth * per_layer), 0.0);
  return p;
}

namespace {

void check_shape(const AnsatzPlan& plan, const ParameterSet& params) {
  const std::size_t per_layer = has_vector_angles(plan.kind) ? static_cast<std::size_t>(plan.node_count()) : 1;
  const auto depth = static_cast<std::size_t>(plan.depth);
  if (params.gammas.size() != depth || params.betas.size() != depth * per_layer) {
    throw ParameterError("parameter set shape does not match plan: expected " + std::to_string(depth) +
                         " gammas and " + std::to_string(depth * per_layer) + " betas, got " +
                         std::to_string(params.gammas.size()) + " and " + std::to_string(params.betas.size()));
  }
}

}  // namespace

std::vector<double> pack_parameters(const AnsatzPlan& plan, const ParameterSet& params) {
  check_shape(plan, params);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(free_parameter_count(plan)));
  const int n = plan.node_count();
  for (int k = 0; k < plan.depth; ++k) {
    out.push_back(params.gammas[static_cast<std::size_t>(k)]);
    if (has_vector_angles(plan.kind)) {
      for (int j = 0; j < n; ++j) {
        if (!plan.masked(k, j)) out.push_back(params.beta(plan, k, j));
      }
    } else {
      out.push_back(params.betas[static_cast<std::size_t>(k)]);
    }
  }
  return out;
}

ParameterSet unpack_parameters(const AnsatzPlan& plan, std::span<const double> free) {
  if (free.size() != static_cast<std::size_t>(free_parameter_count(plan))) {
    throw ParameterError("free vector has " + std::to_string(free.size()) + " entries, plan needs " +
                         std::to_string(free_parameter_count(plan)));
  }
  ParameterSet p = zero_parameters(plan);
  const int n = plan.node_count();
  std::size_t i = 0;
  for (int k = 0; k < plan.depth; ++k) {
    p.gammas[static_cast<std::size_t>(k)] = free[i++];
    if (has_vector_angles(plan.kind)) {
      for (int j = 0; j < n; ++j) {
        if (!plan.masked(k, j)) p.betas[static_cast<std::size_t>(k * n + j)] = free[i++];
      }
    } else {
      p.betas[static_cast<std::size_t>(k)] = free[i++];
    }
  }
  return p;
}

namespace {

AnsatzPlan base_plan(AnsatzKind kind, const Graph& g, int depth, const InitialState& initial) {
  if (depth < 1) throw ParameterError("depth must be >= 1");
  AnsatzPlan plan;
  plan.kind = kind;
  plan.graph = g;
  plan.depth = depth;
  plan.initial = initial;
  std::vector<int> identity(static_cast<std::size_t>(g.node_count()));
  std::iota(identity.begin(), identity.end(), 0);
  plan.mixer_order.assign(static_cast<std::size_t>(depth), identity);
  plan.mask.assign(static_cast<std::size_t>(depth), 0);
  return plan;
}

}  // namespace

AnsatzPlan build_qaoa_plus(const Graph& g, int depth, double lambda) {
  AnsatzPlan plan = base_plan(AnsatzKind::QaoaPlus, g, depth, InitialState::plus());
  plan.lambda = lambda;
  plan.validate();
  return plan;
}

AnsatzPlan build_qao(const Graph& g, int depth, bool vector_beta, const InitialState& initial,
                     std::optional<std::uint64_t> order_seed) {
  AnsatzPlan plan =
      base_plan(vector_beta ? AnsatzKind::QaoVector : AnsatzKind::QaoScalar, g, depth, initial);
  plan.validate();
  if (order_seed) plan = randomize_order(plan, *order_seed);
  return plan;
}

AnsatzPlan build_dqva(const Graph& g, int depth, const BitString& warm_start) {
  AnsatzPlan plan = base_plan(AnsatzKind::Dqva, g, depth, InitialState::of(warm_start));
  plan.validate();
  return plan;
}

AnsatzPlan apply_mask(const AnsatzPlan& plan, const BitString& state) {
  if (state.size() != plan.node_count()) throw ParameterError("mask state length does not match plan");
  AnsatzPlan out = plan;
  for (auto& m : out.mask) m |= state.bits();
  return out;
}

AnsatzPlan randomize_order(const AnsatzPlan& plan, std::uint64_t seed) {
  AnsatzPlan out = plan;
  Rng rng(seed);
  for (int k = 0; k < out.depth; ++k) {
    auto& order = out.mixer_order[static_cast<std::size_t>(k)];
    std::vector<std::size_t> slots;
    std::vector<int> nodes;
    for (std::size_t s = 0; s < order.size(); ++s) {
      if (!out.masked(k, order[s])) {
        slots.push_back(s);
        nodes.push_back(order[s]);
      }
    }
    std::shuffle(nodes.begin(), nodes.end(), rng);
    for (std::size_t i = 0; i < slots.size(); ++i) order[slots[i]] = nodes[i];
  }
  return out;
}

PlanExecutor::PlanExecutor(AnsatzPlan plan)
    : plan_(std::move(plan)), tables_(plan_.graph), state_(StateVector::plus(plan_.node_count())) {
  plan_.validate();
  for (int v = 0; v < plan_.node_count(); ++v) controls_.push_back(plan_.graph.neighbor_mask(v));
}

void PlanExecutor::prepare_initial() {
  switch (plan_.initial.kind) {
    case InitialState::Kind::Plus: state_.set_plus(); break;
    case InitialState::Kind::Basis: state_.set_basis(plan_.initial.basis); break;
    case InitialState::Kind::W: state_ = StateVector::w_state(plan_.node_count()); break;
  }
}

const StateVector& PlanExecutor::run(const ParameterSet& params) {
  check_shape(plan_, params);
  prepare_initial();
  if (plan_.kind == AnsatzKind::QaoaPlus) {
    // Phase separator first, then the transverse-field mixer.
    for (int k = 0; k < plan_.depth; ++k) {
      state_.apply_phase_levels(tables_.violations, params.gammas[static_cast<std::size_t>(k)]);
      state_.apply_rx_all(params.betas[static_cast<std::size_t>(k)]);
    }
    return state_;
  }
  // Partial mixers in slot order, then the Hamming-weight phase.
  for (int k = 0; k < plan_.depth; ++k) {
    for (int node : plan_.mixer_order[static_cast<std::size_t>(k)]) {
      if (plan_.masked(k, node)) continue;
      state_.apply_partial_mixer(node, controls_[static_cast<std::size_t>(node)], params.beta(plan_, k, node));
    }
    state_.apply_phase_levels(tables_.weight, params.gammas[static_cast<std::size_t>(k)]);
  }
  return state_;
}

StateVector execute_plan(const AnsatzPlan& plan, const ParameterSet& params) {
  PlanExecutor exec(plan);
  return exec.run(params);
}

}  // namespace misvqa
