#include "misvqa/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "misvqa/errors.hpp"
#include "misvqa/random.hpp"

namespace misvqa {

double Distribution::weight_of(const BitString& s) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), s.bits(),
                             [](const Entry& e, std::uint64_t z) { return e.index < z; });
  return (it != entries.end() && it->index == s.bits()) ? it->weight : 0.0;
}

double Distribution::weight_sum() const {
  double sum = 0.0;
  for (const auto& e : entries) sum += e.weight;
  return sum;
}

StateVector::StateVector(int n) : n_(n) {
  if (n < 1 || n > kMaxQubits) {
    throw ParameterError("qubit count must be in [1, " + std::to_string(kMaxQubits) + "], got " +
                         std::to_string(n));
  }
  amps_.assign(std::size_t{1} << n, Amplitude{0.0, 0.0});
}

StateVector StateVector::basis(int n, const BitString& s) {
  StateVector sv(n);
  sv.set_basis(s);
  return sv;
}

StateVector StateVector::plus(int n) {
  StateVector sv(n);
  sv.set_plus();
  return sv;
}

StateVector StateVector::w_state(int n) {
  StateVector sv(n);
  const double a = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) sv.amps_[std::size_t{1} << i] = a;
  return sv;
}

void StateVector::set_basis(const BitString& s) {
  if (s.size() != n_) {
    throw ParameterError("basis string length " + std::to_string(s.size()) + " does not match " +
                         std::to_string(n_) + " qubits");
  }
  std::fill(amps_.begin(), amps_.end(), Amplitude{0.0, 0.0});
  amps_[s.bits()] = 1.0;
}

void StateVector::set_plus() {
  const double a = std::pow(2.0, -0.5 * n_);
  std::fill(amps_.begin(), amps_.end(), Amplitude{a, 0.0});
}

double StateVector::norm_squared() const {
  double sum = 0.0;
  for (const auto& a : amps_) sum += std::norm(a);
  return sum;
}

void StateVector::apply_diagonal_phase(const std::function<double(const BitString&)>& phase_of) {
  for (std::size_t z = 0; z < amps_.size(); ++z) {
    amps_[z] *= std::polar(1.0, phase_of(BitString(n_, z)));
  }
}

void StateVector::apply_phase_levels(std::span<const std::uint16_t> levels, double gamma) {
  if (levels.size() != amps_.size()) throw ParameterError("phase table size does not match state");
  const std::uint16_t top = levels.empty() ? 0 : *std::max_element(levels.begin(), levels.end());
  std::vector<Amplitude> phase(static_cast<std::size_t>(top) + 1);
  for (std::size_t k = 0; k < phase.size(); ++k) phase[k] = std::polar(1.0, gamma * static_cast<double>(k));
  for (std::size_t z = 0; z < amps_.size(); ++z) amps_[z] *= phase[levels[z]];
}

void StateVector::apply_rx_all(double beta) {
  const double c = std::cos(beta);
  const double s = std::sin(beta);
  const std::size_t dim = amps_.size();
  for (int q = 0; q < n_; ++q) {
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t block = 0; block < dim; block += 2 * stride) {
      for (std::size_t z = block; z < block + stride; ++z) {
        const Amplitude a0 = amps_[z];
        const Amplitude a1 = amps_[z + stride];
        // [[c, i s], [i s, c]]
        amps_[z] = c * a0 + Amplitude{-s * a1.imag(), s * a1.real()};
        amps_[z + stride] = c * a1 + Amplitude{-s * a0.imag(), s * a0.real()};
      }
    }
  }
}

void StateVector::apply_partial_mixer(int target, std::uint64_t neighbors, double beta) {
  if (target < 0 || target >= n_) throw ParameterError("mixer target out of range");
  const std::uint64_t tbit = 1ULL << target;
  if (neighbors & tbit) throw ParameterError("mixer target " + std::to_string(target) + " is among its controls");
  const std::uint64_t full = (n_ == 64) ? ~0ULL : ((1ULL << n_) - 1);
  if (neighbors & ~full) throw ParameterError("mixer control out of range");
  if (beta == 0.0) return;

  const double c = std::cos(beta);
  const double s = std::sin(beta);
  // Walk every index whose target and control bits are all 0 by enumerating
  // the subsets of the remaining free bits.
  const std::uint64_t free_bits = full & ~(neighbors | tbit);
  std::uint64_t z = 0;
  while (true) {
    Amplitude& a0 = amps_[z];
    Amplitude& a1 = amps_[z | tbit];
    const Amplitude x0 = a0;
    const Amplitude x1 = a1;
    // [[c, -i s], [-i s, c]]
    a0 = c * x0 + Amplitude{s * x1.imag(), -s * x1.real()};
    a1 = c * x1 + Amplitude{s * x0.imag(), -s * x0.real()};
    if (z == free_bits) break;
    z = (z - free_bits) & free_bits;
  }
}

void StateVector::apply_partial_mixer(int target, std::span<const int> neighbors, double beta) {
  std::uint64_t mask = 0;
  for (int v : neighbors) {
    if (v < 0 || v >= n_) throw ParameterError("mixer control out of range");
    mask |= 1ULL << v;
  }
  apply_partial_mixer(target, mask, beta);
}

double StateVector::expectation_diagonal(const std::function<double(const BitString&)>& value_of) const {
  double sum = 0.0;
  for (std::size_t z = 0; z < amps_.size(); ++z) {
    const double p = std::norm(amps_[z]);
    if (p != 0.0) sum += p * value_of(BitString(n_, z));
  }
  return sum;
}

double StateVector::expectation_levels(std::span<const std::uint16_t> levels) const {
  if (levels.size() != amps_.size()) throw ParameterError("value table size does not match state");
  double sum = 0.0;
  for (std::size_t z = 0; z < amps_.size(); ++z) sum += std::norm(amps_[z]) * levels[z];
  return sum;
}

double StateVector::expectation_values(std::span<const double> values) const {
  if (values.size() != amps_.size()) throw ParameterError("value table size does not match state");
  double sum = 0.0;
  for (std::size_t z = 0; z < amps_.size(); ++z) sum += std::norm(amps_[z]) * values[z];
  return sum;
}

Distribution StateVector::full_distribution(double cutoff) const {
  if (!(cutoff >= 0.0)) throw ParameterError("cutoff must be non-negative");
  Distribution d;
  d.n = n_;
  for (std::size_t z = 0; z < amps_.size(); ++z) {
    const double p = std::norm(amps_[z]);
    if (p > cutoff) d.entries.push_back({z, p});
  }
  return d;
}

Distribution StateVector::sample(std::int64_t shots, std::uint64_t seed) const {
  if (shots < 1) throw ParameterError("shots must be >= 1");
  std::vector<double> cdf(amps_.size());
  double acc = 0.0;
  for (std::size_t z = 0; z < amps_.size(); ++z) {
    acc += std::norm(amps_[z]);
    cdf[z] = acc;
  }
  std::vector<std::int64_t> counts(amps_.size(), 0);
  Rng rng(seed);
  for (std::int64_t k = 0; k < shots; ++k) {
    const double u = uniform01(rng) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    // Zero-probability states share their predecessor's cdf value and are
    // never selected by upper_bound.
    ++counts[static_cast<std::size_t>(it - cdf.begin())];
  }
  Distribution d;
  d.n = n_;
  d.sampled = true;
  d.total = static_cast<double>(shots);
  for (std::size_t z = 0; z < counts.size(); ++z) {
    if (counts[z] > 0) d.entries.push_back({z, static_cast<double>(counts[z])});
  }
  return d;
}

DiagonalTables::DiagonalTables(const Graph& g) {
  const int n = g.node_count();
  if (n > kMaxQubits) throw ParameterError("graph too large for dense simulation");
  const std::size_t dim = std::size_t{1} << n;
  weight.resize(dim);
  violations.resize(dim);
  for (std::size_t z = 0; z < dim; ++z) {
    weight[z] = static_cast<std::uint16_t>(std::popcount(z));
    violations[z] = static_cast<std::uint16_t>(g.violations(z));
  }
}

}  // namespace misvqa
