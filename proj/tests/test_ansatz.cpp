#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>
#include <random>

#include "dense_oracle.hpp"
#include "misvqa/errors.hpp"
#include "misvqa/metrics.hpp"
#include "misvqa/optimize.hpp"
#include "misvqa/random.hpp"

using namespace misvqa;

namespace {

ParameterSet random_parameters(const AnsatzPlan& plan, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> free(static_cast<std::size_t>(free_parameter_count(plan)));
  for (double& x : free) x = 2 * std::numbers::pi * uniform01(rng) - std::numbers::pi;
  return unpack_parameters(plan, free);
}

double oracle_error(const AnsatzPlan& plan, const ParameterSet& params) {
  const StateVector sv = execute_plan(plan, params);
  const oracle::Vec ref = oracle::evolve(plan, params);
  double err = 0.0;
  for (std::size_t z = 0; z < sv.dimension(); ++z) {
    err = std::max(err, std::abs(sv[z] - ref(static_cast<Eigen::Index>(z))));
  }
  return err;
}

double infeasible_mass(const StateVector& sv, const Graph& g) {
  double m = 0.0;
  for (std::size_t z = 0; z < sv.dimension(); ++z) {
    if (g.violations(z) > 0) m += sv.probability(z);
  }
  return m;
}

}  // namespace

TEST_CASE("kind names round trip") {
  for (auto k : {AnsatzKind::QaoaPlus, AnsatzKind::QaoScalar, AnsatzKind::QaoVector, AnsatzKind::Dqva}) {
    CHECK(parse_ansatz_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_ansatz_kind("qaoa"), ParameterError);
}

TEST_CASE("parameter counts") {
  const Graph g = Graph::ring(5);
  CHECK(free_parameter_count(build_qaoa_plus(g, 3, 1.0)) == 6);
  CHECK(free_parameter_count(build_qao(g, 3, false, InitialState::w())) == 6);
  CHECK(free_parameter_count(build_qao(g, 2, true, InitialState::w())) == 12);
  const AnsatzPlan d = apply_mask(build_dqva(g, 2, BitString::parse("10100")), BitString::parse("10100"));
  CHECK(free_parameter_count(d) == 2 + 2 * 3);
}

TEST_CASE("pack and unpack are inverse on the free coordinates") {
  const Graph g = erdos_renyi(6, 0.4, 3);
  AnsatzPlan plan = build_dqva(g, 2, BitString::zeros(6));
  plan.mask = {0b000101, 0b110000};
  std::vector<double> free(static_cast<std::size_t>(free_parameter_count(plan)));
  for (std::size_t i = 0; i < free.size(); ++i) free[i] = 0.1 * (i + 1);
  const ParameterSet ps = unpack_parameters(plan, free);
  CHECK(pack_parameters(plan, ps) == free);
  CHECK(ps.beta(plan, 0, 0) == 0.0);
  CHECK(ps.beta(plan, 1, 5) == 0.0);
  CHECK(ps.gammas[0] == doctest::Approx(0.1));
  CHECK_THROWS_AS(unpack_parameters(plan, std::vector<double>(3)), ParameterError);
}

TEST_CASE("plan validation") {
  const Graph g = Graph::ring(4);
  AnsatzPlan plus = build_qaoa_plus(g, 1, 1.0);
  plus.initial = InitialState::zero(4);
  CHECK_THROWS_AS(plus.validate(), ParameterError);

  CHECK_THROWS_AS(build_qao(g, 1, false, InitialState::of(BitString::parse("1100"))), FeasibilityError);
  CHECK_THROWS_AS(build_dqva(g, 1, BitString::parse("0110")), FeasibilityError);
  CHECK_THROWS_AS(build_qao(g, 0, false, InitialState::w()), ParameterError);

  AnsatzPlan bad = build_qao(g, 1, false, InitialState::w());
  bad.mixer_order[0] = {0, 1, 1, 3};
  CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("zero angles leave a basis warm start untouched") {
  const Graph g = erdos_renyi(7, 0.3, 1);
  const BitString start = greedy_mis(g, 1);
  const AnsatzPlan plan = apply_mask(build_dqva(g, 2, start), start);
  const StateVector sv = execute_plan(plan, zero_parameters(plan));
  CHECK(sv.probability(start.bits()) == doctest::Approx(1.0));
}

TEST_CASE("masked mixer angles have no effect") {
  const Graph g = Graph::path(4);
  const BitString start = BitString::parse("1000");
  const AnsatzPlan plan = apply_mask(build_dqva(g, 1, start), start);
  CHECK(plan.masked(0, 0));
  ParameterSet a = random_parameters(plan, 2);
  ParameterSet b = a;
  b.betas[0] = 2.5;  // node 0 of layer 0, which is masked
  const StateVector sa = execute_plan(plan, a);
  const StateVector sb = execute_plan(plan, b);
  for (std::size_t z = 0; z < sa.dimension(); ++z) CHECK(std::abs(sa[z] - sb[z]) < 1e-15);
}

TEST_CASE("randomized order permutes only the unmasked slots") {
  const Graph g = erdos_renyi(8, 0.3, 6);
  const BitString s = BitString::parse("10010000");
  const AnsatzPlan plan = apply_mask(build_qao(g, 2, true, InitialState::of(s)), s);
  const AnsatzPlan r = randomize_order(plan, 77);
  for (int k = 0; k < 2; ++k) {
    auto sorted = r.mixer_order[k];
    std::sort(sorted.begin(), sorted.end());
    for (int v = 0; v < 8; ++v) CHECK(sorted[v] == v);
    for (int slot = 0; slot < 8; ++slot) {
      if (plan.masked(k, plan.mixer_order[k][slot])) CHECK(r.mixer_order[k][slot] == plan.mixer_order[k][slot]);
    }
  }
  CHECK(randomize_order(plan, 77).mixer_order == r.mixer_order);
}

TEST_CASE("executor matches the dense construction on four nodes") {
  const Graph g(4, {{0, 1}, {1, 2}, {1, 3}});
  std::uint64_t seed = 1;
  for (int p = 1; p <= 2; ++p) {
    CHECK(oracle_error(build_qaoa_plus(g, p, 1.5), random_parameters(build_qaoa_plus(g, p, 1.5), seed++)) < 1e-12);
    for (bool vec : {false, true}) {
      for (const auto& init : {InitialState::w(), InitialState::zero(4), InitialState::of(BitString::parse("0011"))}) {
        const AnsatzPlan plan = randomize_order(build_qao(g, p, vec, init), seed++);
        CHECK(oracle_error(plan, random_parameters(plan, seed++)) < 1e-12);
      }
    }
    const BitString s = BitString::parse("1000");
    const AnsatzPlan d = randomize_order(apply_mask(build_dqva(g, p, s), s), seed++);
    CHECK(oracle_error(d, random_parameters(d, seed++)) < 1e-12);
  }
}

TEST_CASE("constraint-preserving ansatz never leaks into infeasible states") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Graph g = erdos_renyi(9, 0.35, s);
    const AnsatzPlan plan = randomize_order(build_qao(g, 2, s % 2 == 0, InitialState::w()), s);
    CHECK(infeasible_mass(execute_plan(plan, random_parameters(plan, s)), g) <= 1e-12);
  }
}

TEST_CASE("penalized objective equals weight minus lambda times violations") {
  const Graph g = Graph::ring(4);
  const AnsatzPlan plan = build_qaoa_plus(g, 1, 2.0);
  // |+>: mean weight 2, mean violations 4 * 1/4 = 1.
  CHECK(evaluate_objective(plan, zero_parameters(plan), ObjectiveKind::Penalized) == doctest::Approx(2.0 - 2.0 * 1.0));
  CHECK(evaluate_objective(plan, zero_parameters(plan), ObjectiveKind::Hamming) == doctest::Approx(2.0));
}

TEST_CASE("mask follows the one bits of the state") {
  const Graph g(6, {});
  const AnsatzPlan a = apply_mask(build_dqva(g, 2, BitString::parse("010010")), BitString::parse("010010"));
  for (int k = 0; k < 2; ++k) {
    for (int v = 0; v < 6; ++v) CHECK(a.masked(k, v) == (v == 1 || v == 4));
  }
  const AnsatzPlan b = apply_mask(build_dqva(g, 1, BitString::parse("010110")), BitString::parse("010110"));
  for (int v = 0; v < 6; ++v) CHECK(b.masked(0, v) == (v == 1 || v == 3 || v == 4));
  const AnsatzPlan c = apply_mask(build_dqva(g, 1, BitString::zeros(6)), BitString::zeros(6));
  for (int v = 0; v < 6; ++v) CHECK_FALSE(c.masked(0, v));
}

TEST_CASE("fully masked plans keep their order and ignore their angles") {
  const Graph g(3, {});
  const BitString all = BitString::parse("111");
  const AnsatzPlan plan = apply_mask(build_dqva(g, 1, all), all);
  CHECK(randomize_order(plan, 5).mixer_order == plan.mixer_order);
  CHECK(free_parameter_count(plan) == 1);
  for (double gamma : {0.0, 0.4, 2.9}) {
    const std::vector<double> x{gamma};
    CHECK(evaluate_objective(plan, unpack_parameters(plan, x), ObjectiveKind::Hamming) == doctest::Approx(3.0));
  }
}

TEST_CASE("basis start at zero angles scores its own weight") {
  const Graph g = Graph::path(5);
  const BitString s = BitString::parse("10101");
  const AnsatzPlan plan = build_qao(g, 2, true, InitialState::of(s));
  CHECK(evaluate_objective(plan, zero_parameters(plan), ObjectiveKind::Hamming) == 3.0);
}

TEST_CASE("mixer order changes the output distribution") {
  // Partial mixers on adjacent nodes do not commute.
  const Graph g = Graph::path(3);
  AnsatzPlan a = build_qao(g, 1, true, InitialState::zero(3));
  AnsatzPlan b = a;
  b.mixer_order[0] = {2, 1, 0};
  const std::vector<double> x{0.7, 0.4, 1.1, -0.6};
  const StateVector sa = execute_plan(a, unpack_parameters(a, x));
  const StateVector sb = execute_plan(b, unpack_parameters(b, x));
  double diff = 0.0;
  for (std::size_t z = 0; z < sa.dimension(); ++z) diff = std::max(diff, std::abs(sa.probability(z) - sb.probability(z)));
  CHECK(diff > 1e-3);
}

TEST_CASE("qaoa+ at zero angles is uniform") {
  const Graph g = erdos_renyi(6, 0.5, 4);
  const AnsatzPlan plan = build_qaoa_plus(g, 3, 1.7);
  const StateVector sv = execute_plan(plan, zero_parameters(plan));
  for (std::size_t z = 0; z < sv.dimension(); ++z) CHECK(sv.probability(z) == doctest::Approx(1.0 / 64).epsilon(1e-14));
}
