#pragma once

// Dense-matrix reference: builds each gate as a full 2^n x 2^n operator and
// exponentiates Hermitian generators with Eigen. Slow, but shares no code
// with the statevector kernels.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <complex>

#include "misvqa/ansatz.hpp"

namespace oracle {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using cd = std::complex<double>;

inline Mat pauli_x(int n, int q) {
  const int dim = 1 << n;
  Mat m = Mat::Zero(dim, dim);
  for (int z = 0; z < dim; ++z) m(z ^ (1 << q), z) = 1.0;
  return m;
}

// b_q = (1 - Z_q) / 2
inline Mat occupation(int n, int q) {
  const int dim = 1 << n;
  Mat m = Mat::Zero(dim, dim);
  for (int z = 0; z < dim; ++z) m(z, z) = (z >> q) & 1;
  return m;
}

inline Mat identity(int n) { return Mat::Identity(1 << n, 1 << n); }

inline Mat expi(const Mat& generator, double theta) { return (cd(0.0, theta) * generator).exp(); }

inline Mat hamming(int n) {
  Mat h = Mat::Zero(1 << n, 1 << n);
  for (int q = 0; q < n; ++q) h += occupation(n, q);
  return h;
}

inline Mat penalty(const misvqa::Graph& g) {
  const int n = g.node_count();
  Mat c = Mat::Zero(1 << n, 1 << n);
  for (auto [i, j] : g.edges()) c += occupation(n, i) * occupation(n, j);
  return c;
}

// V_i(beta) = I + (exp(-i beta X_i) - I) * prod_j (I - b_j) over neighbors j
inline Mat partial_mixer(const misvqa::Graph& g, int node, double beta) {
  const int n = g.node_count();
  Mat bbar = identity(n);
  for (int j : g.neighbors(node)) bbar = bbar * (identity(n) - occupation(n, j));
  return identity(n) + (expi(pauli_x(n, node), -beta) - identity(n)) * bbar;
}

inline Vec initial(const misvqa::AnsatzPlan& plan) {
  const int n = plan.node_count();
  const int dim = 1 << n;
  Vec v = Vec::Zero(dim);
  switch (plan.initial.kind) {
    case misvqa::InitialState::Kind::Plus:
      v.setConstant(1.0 / std::sqrt(static_cast<double>(dim)));
      break;
    case misvqa::InitialState::Kind::W:
      for (int q = 0; q < n; ++q) v(1 << q) = 1.0 / std::sqrt(static_cast<double>(n));
      break;
    case misvqa::InitialState::Kind::Basis:
      v(static_cast<Eigen::Index>(plan.initial.basis.bits())) = 1.0;
      break;
  }
  return v;
}

/// Final state of `plan` at `params`, built from the printed unitaries.
inline Vec evolve(const misvqa::AnsatzPlan& plan, const misvqa::ParameterSet& params) {
  const misvqa::Graph& g = plan.graph;
  const int n = g.node_count();
  Vec psi = initial(plan);
  if (plan.kind == misvqa::AnsatzKind::QaoaPlus) {
    Mat xsum = Mat::Zero(1 << n, 1 << n);
    for (int q = 0; q < n; ++q) xsum += pauli_x(n, q);
    const Mat cpen = penalty(g);
    for (int k = 0; k < plan.depth; ++k) {
      psi = expi(cpen, params.gammas[k]) * psi;
      psi = expi(xsum, params.betas[k]) * psi;
    }
    return psi;
  }
  const Mat h = hamming(n);
  for (int k = 0; k < plan.depth; ++k) {
    for (int node : plan.mixer_order[k]) {
      if (plan.masked(k, node)) continue;
      psi = partial_mixer(g, node, params.beta(plan, k, node)) * psi;
    }
    psi = expi(h, params.gammas[k]) * psi;
  }
  return psi;
}

}  // namespace oracle
