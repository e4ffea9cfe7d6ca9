#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "misvqa/graph.hpp"
#include "misvqa/statevector.hpp"

namespace misvqa {

enum class AnsatzKind { QaoaPlus, QaoScalar, QaoVector, Dqva };

std::string to_string(AnsatzKind kind);
AnsatzKind parse_ansatz_kind(const std::string& text);

/// Whether the kind carries one mixer angle per (layer, node).
inline bool has_vector_angles(AnsatzKind kind) {
  return kind == AnsatzKind::QaoVector || kind == AnsatzKind::Dqva;
}

struct InitialState {
  enum class Kind { Plus, Basis, W };

  Kind kind = Kind::Basis;
  BitString basis;  // meaningful for Kind::Basis only

  static InitialState plus() { return {Kind::Plus, {}}; }
  static InitialState w() { return {Kind::W, {}}; }
  static InitialState zero(int n) { return {Kind::Basis, BitString::zeros(n)}; }
  static InitialState of(const BitString& s) { return {Kind::Basis, s}; }

  /// "plus", "w", or the basis bitstring.
  std::string to_string() const;
};

/// Declarative circuit description. Within a layer, `mixer_order[k]` lists
/// node slots in application (time) order; a set mask bit turns that slot's
/// partial mixer into the identity without moving the other slots.
struct AnsatzPlan {
  AnsatzKind kind = AnsatzKind::QaoScalar;
  Graph graph;
  int depth = 1;
  InitialState initial;
  std::vector<std::vector<int>> mixer_order;  // depth x n
  std::vector<std::uint64_t> mask;            // depth bitmasks over nodes
  double lambda = 0.0;                        // QAOA+ penalty weight

  int node_count() const { return graph.node_count(); }
  bool masked(int layer, int node) const { return (mask[static_cast<std::size_t>(layer)] >> node) & 1U; }
  /// Partial mixers that are not identities, summed over layers.
  int unmasked_mixer_count() const;

  /// Throws ParameterError / FeasibilityError if the plan is malformed.
  void validate() const;
};

/// Variational angles. `betas` holds one angle per layer for the scalar
/// kinds and a depth x n row-major block for the vector kinds.
struct ParameterSet {
  std::vector<double> gammas;
  std::vector<double> betas;

  double beta(const AnsatzPlan& plan, int layer, int node) const;
};

int free_parameter_count(const AnsatzPlan& plan);

/// All-zero angles shaped for `plan`.
ParameterSet zero_parameters(const AnsatzPlan& plan);

/// Free-variable vector handed to the optimizer: per layer, gamma first, then
/// the layer's unmasked mixer angles in node order (or its single beta).
std::vector<double> pack_parameters(const AnsatzPlan& plan, const ParameterSet& params);
ParameterSet unpack_parameters(const AnsatzPlan& plan, std::span<const double> free);

AnsatzPlan build_qaoa_plus(const Graph& g, int depth, double lambda);

/// Constraint-preserving ansatz. `initial` must be W or an independent basis
/// state. With `order_seed`, mixer order is randomized; otherwise it is the
/// identity permutation.
AnsatzPlan build_qao(const Graph& g, int depth, bool vector_beta, const InitialState& initial,
                     std::optional<std::uint64_t> order_seed = std::nullopt);

/// Vector-angle ansatz started from an independent warm-start basis state,
/// with no mask applied yet.
AnsatzPlan build_dqva(const Graph& g, int depth, const BitString& warm_start);

/// Masks every layer's mixer at each node where `state` has a 1.
AnsatzPlan apply_mask(const AnsatzPlan& plan, const BitString& state);

/// Shuffles, per layer, which nodes occupy the unmasked slots. Masked slots
/// keep both their node and their position.
AnsatzPlan randomize_order(const AnsatzPlan& plan, std::uint64_t seed);

/// Runs plans repeatedly against one graph without reallocating: diagonal
/// tables are computed once and the state buffer is reused.
class PlanExecutor {
 public:
  explicit PlanExecutor(AnsatzPlan plan);

  const AnsatzPlan& plan() const { return plan_; }
  const DiagonalTables& tables() const { return tables_; }

  const StateVector& run(const ParameterSet& params);
  const StateVector& state() const { return state_; }

 private:
  void prepare_initial();

  AnsatzPlan plan_;
  DiagonalTables tables_;
  std::vector<std::uint64_t> controls_;
  StateVector state_;
};

StateVector execute_plan(const AnsatzPlan& plan, const ParameterSet& params);

}  // namespace misvqa
