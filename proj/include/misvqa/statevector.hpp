#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "misvqa/graph.hpp"

namespace misvqa {

using Amplitude = std::complex<double>;

/// Largest register the dense simulator accepts (2^26 amplitudes = 1 GiB).
inline constexpr int kMaxQubits = 26;

/// Outcome weights over basis states. In exact mode `weight` is a
/// probability and `total` is 1; in sampled mode `weight` is a shot count and
/// `total` is the shot number. Entries are sorted by basis index.
struct Distribution {
  struct Entry {
    std::uint64_t index = 0;
    double weight = 0.0;
  };

  int n = 0;
  double total = 1.0;
  bool sampled = false;
  std::vector<Entry> entries;

  BitString bitstring(const Entry& e) const { return BitString(n, e.index); }
  double probability(const Entry& e) const { return e.weight / total; }
  /// Weight of one bitstring, zero when absent.
  double weight_of(const BitString& s) const;
  double weight_sum() const;
};

/// Dense n-qubit state. Basis index z encodes qubit i in bit i of z.
class StateVector {
 public:
  StateVector() = default;

  static StateVector basis(int n, const BitString& s);
  static StateVector plus(int n);
  static StateVector w_state(int n);

  int qubits() const { return n_; }
  std::size_t dimension() const { return amps_.size(); }
  std::span<const Amplitude> amplitudes() const { return amps_; }
  std::span<Amplitude> amplitudes() { return amps_; }
  const Amplitude& operator[](std::uint64_t z) const { return amps_[z]; }

  double norm_squared() const;
  double probability(std::uint64_t z) const { return std::norm(amps_[z]); }

  /// Reset to |s> without reallocating.
  void set_basis(const BitString& s);
  void set_plus();

  /// amps[z] *= exp(i * phase_of(z)).
  void apply_diagonal_phase(const std::function<double(const BitString&)>& phase_of);

  /// amps[z] *= exp(i * gamma * levels[z]) for small non-negative integer
  /// levels (Hamming weight, violated-edge count). One sincos per distinct
  /// level instead of one per amplitude.
  void apply_phase_levels(std::span<const std::uint16_t> levels, double gamma);

  /// exp(i*beta*X) on every qubit.
  void apply_rx_all(double beta);

  /// exp(-i*beta*X) on `target`, conditioned on every qubit in `neighbors`
  /// being 0. Throws ParameterError if target is one of the neighbors.
  void apply_partial_mixer(int target, std::uint64_t neighbors, double beta);
  void apply_partial_mixer(int target, std::span<const int> neighbors, double beta);

  double expectation_diagonal(const std::function<double(const BitString&)>& value_of) const;
  double expectation_levels(std::span<const std::uint16_t> levels) const;
  double expectation_values(std::span<const double> values) const;

  /// Every basis state whose probability exceeds `cutoff`.
  Distribution full_distribution(double cutoff = 0.0) const;

  /// Multinomial draw of `shots` outcomes; reproducible per seed.
  Distribution sample(std::int64_t shots, std::uint64_t seed) const;

 private:
  explicit StateVector(int n);

  int n_ = 0;
  std::vector<Amplitude> amps_;
};

/// Per-basis-state tables used by the phase separators and objectives.
struct DiagonalTables {
  std::vector<std::uint16_t> weight;      // Hamming weight of z
  std::vector<std::uint16_t> violations;  // edges with both endpoints in z

  explicit DiagonalTables(const Graph& g);
};

}  // namespace misvqa
