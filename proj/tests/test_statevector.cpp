#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "dense_oracle.hpp"
#include "misvqa/errors.hpp"
#include "misvqa/statevector.hpp"

using namespace misvqa;

namespace {

double max_error(const StateVector& sv, const oracle::Vec& ref) {
  double err = 0.0;
  for (std::size_t z = 0; z < sv.dimension(); ++z) {
    err = std::max(err, std::abs(sv[z] - ref(static_cast<Eigen::Index>(z))));
  }
  return err;
}

oracle::Vec to_dense(const StateVector& sv) {
  oracle::Vec v(static_cast<Eigen::Index>(sv.dimension()));
  for (std::size_t z = 0; z < sv.dimension(); ++z) v(static_cast<Eigen::Index>(z)) = sv[z];
  return v;
}

// Random normalized state so gate checks are not limited to special inputs.
StateVector random_state(int n, std::uint64_t seed) {
  StateVector sv = StateVector::plus(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  double norm = 0.0;
  for (auto& a : sv.amplitudes()) {
    a = {d(rng), d(rng)};
    norm += std::norm(a);
  }
  for (auto& a : sv.amplitudes()) a /= std::sqrt(norm);
  return sv;
}

}  // namespace

TEST_CASE("preparations") {
  const auto b = StateVector::basis(3, BitString::parse("101"));
  CHECK(b.probability(0b101) == 1.0);
  CHECK(b.norm_squared() == doctest::Approx(1.0));

  const auto p = StateVector::plus(4);
  for (std::size_t z = 0; z < p.dimension(); ++z) CHECK(p.probability(z) == doctest::Approx(1.0 / 16));

  const auto w = StateVector::w_state(5);
  double single = 0.0;
  for (int q = 0; q < 5; ++q) single += w.probability(1ULL << q);
  CHECK(single == doctest::Approx(1.0));
  CHECK(w.probability(0) == 0.0);

  CHECK_THROWS_AS(StateVector::plus(kMaxQubits + 1), ParameterError);
  CHECK_THROWS_AS(StateVector::plus(0), ParameterError);
}

TEST_CASE("transverse mixer matches the dense exponential") {
  for (int n = 1; n <= 4; ++n) {
    StateVector sv = random_state(n, static_cast<std::uint64_t>(n));
    const oracle::Vec before = to_dense(sv);
    oracle::Mat xsum = oracle::Mat::Zero(1 << n, 1 << n);
    for (int q = 0; q < n; ++q) xsum += oracle::pauli_x(n, q);
    sv.apply_rx_all(0.731);
    CHECK(max_error(sv, oracle::expi(xsum, 0.731) * before) < 1e-12);
  }
}

TEST_CASE("partial mixer matches the controlled dense gate") {
  const Graph g(4, {{0, 1}, {0, 2}, {2, 3}});
  for (int node = 0; node < 4; ++node) {
    StateVector sv = random_state(4, 10 + static_cast<std::uint64_t>(node));
    const oracle::Vec before = to_dense(sv);
    sv.apply_partial_mixer(node, g.neighbor_mask(node), -1.2);
    CHECK(max_error(sv, oracle::partial_mixer(g, node, -1.2) * before) < 1e-12);

    StateVector sv2 = random_state(4, 10 + static_cast<std::uint64_t>(node));
    const auto nbrs = g.neighbors(node);
    sv2.apply_partial_mixer(node, std::span<const int>(nbrs), -1.2);
    CHECK(max_error(sv2, oracle::partial_mixer(g, node, -1.2) * before) < 1e-12);
  }
}

TEST_CASE("partial mixer rejects a target among its controls") {
  StateVector sv = StateVector::plus(3);
  CHECK_THROWS_AS(sv.apply_partial_mixer(1, 0b010, 0.3), ParameterError);
  CHECK_THROWS_AS(sv.apply_partial_mixer(3, 0b001, 0.3), ParameterError);
}

TEST_CASE("phase tables agree with the generic diagonal phase") {
  const Graph g = Graph::ring(5);
  const DiagonalTables t(g);
  StateVector a = random_state(5, 3);
  StateVector b = a;
  a.apply_phase_levels(t.violations, 0.9);
  b.apply_diagonal_phase([&](const BitString& s) { return 0.9 * g.violations(s.bits()); });
  CHECK(max_error(a, to_dense(b)) < 1e-13);

  a.apply_phase_levels(t.weight, -2.1);
  b.apply_diagonal_phase([&](const BitString& s) { return -2.1 * s.weight(); });
  CHECK(max_error(a, to_dense(b)) < 1e-13);
}

TEST_CASE("expectations agree across entry points") {
  const Graph g = erdos_renyi(6, 0.4, 2);
  const DiagonalTables t(g);
  const StateVector sv = random_state(6, 8);
  std::vector<double> values(t.weight.begin(), t.weight.end());
  const double e1 = sv.expectation_levels(t.weight);
  CHECK(sv.expectation_values(values) == doctest::Approx(e1).epsilon(1e-14));
  CHECK(sv.expectation_diagonal([](const BitString& s) { return s.weight(); }) ==
        doctest::Approx(e1).epsilon(1e-14));
}

TEST_CASE("gates preserve the norm") {
  StateVector sv = StateVector::w_state(10);
  const Graph g = erdos_renyi(10, 0.3, 4);
  const DiagonalTables t(g);
  for (int rep = 0; rep < 5; ++rep) {
    for (int v = 0; v < 10; ++v) sv.apply_partial_mixer(v, g.neighbor_mask(v), 0.1 * (v + rep));
    sv.apply_phase_levels(t.weight, 0.37 * rep);
    sv.apply_rx_all(0.2);
  }
  CHECK(std::abs(sv.norm_squared() - 1.0) < 1e-12);
}

TEST_CASE("full distribution and sampling") {
  const StateVector sv = random_state(5, 21);
  const Distribution full = sv.full_distribution();
  CHECK(full.entries.size() == 32);
  CHECK(full.weight_sum() == doctest::Approx(1.0));
  CHECK_FALSE(full.sampled);

  const Distribution s1 = sv.sample(20000, 9);
  const Distribution s2 = sv.sample(20000, 9);
  CHECK(s1.sampled);
  CHECK(s1.total == 20000);
  CHECK(s1.weight_sum() == 20000);
  REQUIRE(s1.entries.size() == s2.entries.size());
  for (std::size_t i = 0; i < s1.entries.size(); ++i) {
    CHECK(s1.entries[i].index == s2.entries[i].index);
    CHECK(s1.entries[i].weight == s2.entries[i].weight);
  }
  // Frequencies converge on the Born probabilities.
  for (const auto& e : s1.entries) {
    const double p = sv.probability(e.index);
    CHECK(std::abs(s1.probability(e) - p) < 5.0 * std::sqrt(p * (1 - p) / 20000) + 1e-3);
  }

  const Distribution cut = StateVector::w_state(4).full_distribution(1e-9);
  CHECK(cut.entries.size() == 4);
  CHECK(cut.weight_of(BitString::parse("0100")) == doctest::Approx(0.25));
  CHECK(cut.weight_of(BitString::parse("0110")) == 0.0);
}
