#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>

#include "misvqa/errors.hpp"
#include "misvqa/solver.hpp"

using namespace misvqa;

namespace {

Distribution dist_of(int n, std::initializer_list<std::pair<const char*, double>> items) {
  Distribution d;
  d.n = n;
  for (auto [text, w] : items) d.entries.push_back({BitString::parse(text).bits(), w});
  std::sort(d.entries.begin(), d.entries.end(), [](auto& a, auto& b) { return a.index < b.index; });
  return d;
}

void check_consistent(const RunRecord& rec, const Graph& g) {
  CHECK(is_independent(g, rec.best_bitstring));
  CHECK(rec.best_weight == rec.best_bitstring.weight());
  CHECK(rec.best_weight <= rec.e_max);
  CHECK(rec.approximation_ratio <= 1.0 + 1e-12);
  CHECK(rec.sp_opt + rec.sp_subopt + rec.infeasible_mass == doctest::Approx(1.0));
  CHECK(rec.evals > 0);
}

}  // namespace

TEST_CASE("best observed prefers weight, then the smaller string") {
  const Graph ring = Graph::ring(4);
  CHECK(best_observed(dist_of(4, {{"1010", 0.4}, {"0101", 0.4}, {"1100", 0.2}}), ring, 0.0).to_string() == "0101");
  CHECK(best_observed(dist_of(4, {{"1010", 0.0005}, {"1000", 0.9995}}), ring, 1e-3).to_string() == "1000");
  CHECK(best_observed(dist_of(4, {{"1111", 1.0}}), ring, 0.0).to_string() == "0000");
}

TEST_CASE("active mixer selection") {
  const Graph g = erdos_renyi(8, 0.3, 1);
  const std::uint64_t mask = 0b00010001;
  const auto one = select_active_mixers(g, mask, 4, 7);
  REQUIRE(one.size() == 1);
  CHECK(std::popcount(one[0]) == 4);
  CHECK((one[0] & mask) == 0);
  CHECK(select_active_mixers(g, mask, 4, 7) == one);

  // Two free nodes, budget five: two full layers plus one partial.
  const std::uint64_t tight = 0b11110011;
  const auto grown = select_active_mixers(g, tight, 5, 3);
  REQUIRE(grown.size() == 3);
  CHECK(grown[0] == 0b00001100);
  CHECK(grown[1] == 0b00001100);
  CHECK(std::popcount(grown[2]) == 1);
  CHECK((grown[2] & tight) == 0);

  CHECK(select_active_mixers(g, 0xFF, 3, 1).empty());
  CHECK(select_active_mixers(g, 0, 100, 1).size() == 1);
  CHECK(std::popcount(select_active_mixers(g, 0, 100, 1)[0]) == 8);
}

TEST_CASE("qaoa+ and qao records are internally consistent") {
  const Graph g = erdos_renyi(7, 0.3, 11);
  SolveConfig cfg;
  cfg.seed = 5;
  const auto plus = solve_qaoa_plus(g, 2, 2.0, cfg);
  check_consistent(plus, g);
  CHECK(plus.algorithm == "qaoa_plus");
  CHECK(plus.config.at("p") == "2");
  CHECK(plus.resources.multi_controlled_toffolis == 0);

  const auto qao = solve_qao(g, 1, true, InitialState::w(), cfg);
  check_consistent(qao, g);
  CHECK(qao.infeasible_mass < 1e-10);
  CHECK(qao.config.at("initial") == "w");
  CHECK(qao.config.at("vector_beta") == "true");
  REQUIRE(qao.trace.size() == 1);
  CHECK(qao.optimizer_calls == 1);
}

TEST_CASE("exact-mode solves are reproducible") {
  const Graph g = erdos_renyi(6, 0.4, 2);
  SolveConfig cfg;
  cfg.seed = 17;
  cfg.optimizer.restarts = 2;
  const auto a = solve_qao(g, 2, false, InitialState::zero(6), cfg);
  const auto b = solve_qao(g, 2, false, InitialState::zero(6), cfg);
  CHECK(a.objective_value == b.objective_value);
  CHECK(a.sp_table == b.sp_table);
  CHECK(a.evals == b.evals);
}

TEST_CASE("sampled readout is seeded") {
  const Graph g = erdos_renyi(6, 0.4, 2);
  SolveConfig cfg;
  cfg.measurement.mode = MeasurementMode::Sampled;
  cfg.measurement.shots = 500;
  cfg.seed = 3;
  const auto a = solve_qao(g, 1, true, InitialState::w(), cfg);
  const auto b = solve_qao(g, 1, true, InitialState::w(), cfg);
  CHECK(a.sp_table == b.sp_table);
  CHECK(a.infeasible_mass == 0.0);
  cfg.measurement.shots = 0;
  CHECK_THROWS_AS(solve_qao(g, 1, true, InitialState::w(), cfg), ParameterError);
}

TEST_CASE("dqva traces never decrease and end on an independent set") {
  for (std::uint64_t s = 0; s < 4; ++s) {
    const Graph g = erdos_renyi(9, 0.25, s);
    DqvaConfig cfg;
    cfg.mixer_budget = 3;
    cfg.rounds = 3;
    cfg.greedy_starts = 1;
    cfg.seed = s;
    const auto rec = solve_dqva(g, cfg);
    check_consistent(rec, g);
    CHECK(rec.infeasible_mass < 1e-10);
    for (std::size_t i = 1; i < rec.trace.size(); ++i) {
      CHECK(rec.trace[i].incumbent_weight >= rec.trace[i - 1].incumbent_weight);
    }
    CHECK(rec.trace.back().incumbent_weight == rec.best_weight);
    CHECK(rec.optimizer_calls == static_cast<int>(rec.trace.size()));
    for (const auto& t : rec.trace) CHECK(t.active_mixers <= 3);
  }
}

TEST_CASE("dqva with every mixer active finds the optimum of a small graph") {
  const Graph g = Graph::path(5);
  DqvaConfig cfg;
  cfg.mixer_budget = 5;
  cfg.rounds = 2;
  cfg.greedy_starts = 0;
  const auto rec = solve_dqva(g, cfg);
  CHECK(rec.best_weight == 3);
  CHECK(rec.first_round_reaching(3) >= 1);
}

TEST_CASE("dqva warm starts") {
  const Graph empty(4, {});
  DqvaConfig cfg;
  cfg.zero_start = false;
  cfg.greedy_starts = 0;
  cfg.extra_starts = {BitString::parse("1111")};
  const auto rec = solve_dqva(empty, cfg);
  CHECK(rec.best_weight == 4);
  CHECK(rec.optimizer_calls == 0);
  CHECK(rec.approximation_ratio == 1.0);

  cfg.extra_starts = {BitString::parse("1100")};
  CHECK_THROWS_AS(solve_dqva(Graph::ring(4), cfg), FeasibilityError);
  cfg.extra_starts.clear();
  CHECK_THROWS_AS(solve_dqva(Graph::ring(4), cfg), ParameterError);
}

TEST_CASE("dqva runs are reproducible per seed") {
  const Graph g = erdos_renyi(8, 0.3, 9);
  DqvaConfig cfg;
  cfg.mixer_budget = 3;
  cfg.rounds = 2;
  cfg.seed = 44;
  const auto a = solve_dqva(g, cfg);
  const auto b = solve_dqva(g, cfg);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].objective == b.trace[i].objective);
    CHECK(a.trace[i].incumbent_weight == b.trace[i].incumbent_weight);
  }
  CHECK(a.best_bitstring == b.best_bitstring);
}

TEST_CASE("qaoa+ on the square ring beats its uniform start") {
  SolveConfig cfg;
  const auto rec = solve_qaoa_plus(Graph::ring(4), 2, 2.0, cfg);
  CHECK(rec.approximation_ratio > 0.25);
  CHECK(rec.pruned_expectation > 0.5);
}

TEST_CASE("single node") {
  const Graph one(1, {});
  SolveConfig cfg;
  // The penalty phase is trivial without edges and |+> is a mixer eigenstate.
  CHECK(solve_qaoa_plus(one, 1, 1.0, cfg).approximation_ratio == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(solve_qao(one, 1, false, InitialState::zero(1), cfg).approximation_ratio > 1.0 - 1e-3);
  CHECK(solve_qao(one, 1, true, InitialState::w(), cfg).approximation_ratio > 1.0 - 1e-3);
}

TEST_CASE("without a penalty qaoa+ drifts into infeasible states") {
  SolveConfig cfg;
  const auto rec = solve_qaoa_plus(Graph::complete(5), 2, 0.0, cfg);
  CHECK(rec.infeasible_mass > 0.9);
  CHECK(rec.approximation_ratio < 0.1);
}

TEST_CASE("qao on a three node path") {
  SolveConfig cfg;
  const auto rec = solve_qao(Graph::path(3), 1, true, InitialState::zero(3), cfg);
  CHECK(rec.best_weight == 2);
  CHECK(rec.best_bitstring.to_string() == "101");

  const auto ring = solve_qao(Graph::ring(4), 1, true, InitialState::zero(4), cfg);
  CHECK(ring.infeasible_mass < 1e-12);
  // Uniform over the seven independent sets of the ring has mean weight 8/7.
  CHECK(ring.approximation_ratio >= 4.0 / 7.0);
}

TEST_CASE("dqva small instances") {
  DqvaConfig cfg;
  cfg.mixer_budget = 5;
  cfg.rounds = 1;
  cfg.greedy_starts = 0;
  const auto empty = solve_dqva(Graph(5, {}), cfg);
  CHECK(empty.best_bitstring.to_string() == "11111");
  CHECK(empty.first_round_reaching(5) == 1);

  cfg.mixer_budget = 4;
  cfg.rounds = 2;
  const auto ring = solve_dqva(Graph::ring(4), cfg);
  CHECK(ring.best_weight == 2);
}

TEST_CASE("active mixer selection on masked small graphs") {
  const Graph six(6, {});
  const std::uint64_t mask = (1ULL << 1) | (1ULL << 4);
  const auto sel = select_active_mixers(six, mask, 3, 12);
  REQUIRE(sel.size() == 1);
  CHECK(std::popcount(sel[0]) == 3);
  CHECK((sel[0] & mask) == 0);

  const Graph four(4, {});
  const auto spill = select_active_mixers(four, 0b1110, 3, 1);
  int active = 0;
  for (auto m : spill) {
    CHECK(m == 0b0001);
    active += std::popcount(m);
  }
  CHECK(active == 3);
  CHECK(spill.size() == 3);

  const Graph g14 = erdos_renyi(14, 0.2, 1);
  const auto full = select_active_mixers(g14, 0, 14, 1);
  REQUIRE(full.size() == 1);
  CHECK(full[0] == (1ULL << 14) - 1);
}
