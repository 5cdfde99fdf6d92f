#pragma once

// Test-only reference implementations. Nothing here calls into the
// library's operator or decoding code; states and operators are explicit
// matrices built from their defining formulas.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "mqka/protocol.hpp"
#include "mqka/qstate.hpp"

namespace oracle {

using Vec4 = Eigen::Vector4cd;
using Mat4 = Eigen::Matrix4cd;

inline Eigen::Vector2cd plus_minus(int sign_bit) {
  Eigen::Vector2cd v;
  v << 1.0, (sign_bit ? -1.0 : 1.0);
  return v / std::sqrt(2.0);
}

inline Vec4 kron(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
  Vec4 v;
  v << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
  return v;
}

// (|0> + (-1)^y |1>)(|0> + (-1)^x |1>) / 2
inline Vec4 hadamard_state(int x, int y) { return kron(plus_minus(y), plus_minus(x)); }

inline Vec4 basis_state(int m, int n) {
  Vec4 v = Vec4::Zero();
  v(2 * m + n) = 1.0;
  return v;
}

inline Mat4 u_matrix(int m, int n) {
  const Vec4 t = basis_state(m, n);
  return Mat4::Identity() - 2.0 * t * t.adjoint();
}

inline Mat4 v_matrix(int x, int y) {
  const Vec4 t = hadamard_state(x, y);
  return 2.0 * t * t.adjoint() - Mat4::Identity();
}

inline Vec4 to_vec(const mqka::qstate::TwoQubitState& s) {
  Vec4 v;
  for (int k = 0; k < 4; ++k) v(k) = s[static_cast<std::size_t>(k)];
  return v;
}

inline mqka::qstate::TwoQubitState from_vec(const Vec4& v) {
  mqka::qstate::TwoQubitState s;
  for (int k = 0; k < 4; ++k) s[static_cast<std::size_t>(k)] = v(k);
  return s;
}

inline bool same_ray(const Vec4& a, const Vec4& b, double tol = 1e-12) {
  return std::abs(a.dot(b)) >= 1.0 - tol;
}

// Projectors of a two-qubit product measurement.
inline std::array<Mat4, 4> projectors(bool x_basis) {
  std::array<Mat4, 4> p;
  for (int k = 0; k < 4; ++k) {
    const Vec4 v = x_basis ? hadamard_state(k >> 1, k & 1) : basis_state(k >> 1, k & 1);
    p[static_cast<std::size_t>(k)] = v * v.adjoint();
  }
  return p;
}

// Probability that the last decoding step returns `expected` after an
// intercept-resend between `before` and `after`.
//   parity 0: measure in the Hadamard family, outcome (x, y)
//   parity 1: apply V_prep then measure computational, outcome (a, b)
// eve_x_weight is the probability Eve picks the Hadamard family.
inline double correct_decode_probability(const Vec4& prepared, const Mat4& before, const Mat4& after,
                                         double eve_x_weight, int parity, int prep_x, int prep_y,
                                         int expected_index) {
  Mat4 rho = prepared * prepared.adjoint();
  rho = before * rho * before.adjoint();
  Mat4 attacked = Mat4::Zero();
  for (int basis = 0; basis < 2; ++basis) {
    const double w = basis == 1 ? eve_x_weight : 1.0 - eve_x_weight;
    if (w == 0.0) continue;
    for (const auto& p : projectors(basis == 1)) attacked += w * (p * rho * p);
  }
  Mat4 final_rho = after * attacked * after.adjoint();
  if (parity == 1) {
    const Mat4 v = v_matrix(prep_x, prep_y);
    final_rho = v * final_rho * v.adjoint();
  }
  const Vec4 target = parity == 0 ? hadamard_state(expected_index >> 1, expected_index & 1)
                                  : basis_state(expected_index >> 1, expected_index & 1);
  return std::real(target.dot(final_rho * target));
}

// Numerical rank by complex Gaussian elimination with full pivoting.
inline std::size_t rank(Eigen::MatrixXcd m, double tol) {
  const Eigen::Index rows = m.rows(), cols = m.cols();
  std::size_t r = 0;
  for (Eigen::Index step = 0; step < std::min(rows, cols); ++step) {
    Eigen::Index pr = step, pc = step;
    double best = 0.0;
    for (Eigen::Index i = step; i < rows; ++i) {
      for (Eigen::Index j = step; j < cols; ++j) {
        if (std::abs(m(i, j)) > best) {
          best = std::abs(m(i, j));
          pr = i;
          pc = j;
        }
      }
    }
    if (best <= tol) break;
    m.row(step).swap(m.row(pr));
    m.col(step).swap(m.col(pc));
    for (Eigen::Index i = step + 1; i < rows; ++i) {
      const std::complex<double> f = m(i, step) / m(step, step);
      m.row(i) -= f * m.row(step);
    }
    ++r;
  }
  return r;
}

// Expected error probability of one attacked block, rebuilt from the
// session's classical inputs with explicit matrices. The ring is walked as
// initiator, then nodes (i+1) mod (M+1), ... back to the initiator; edge e
// leaves node e. Returns {error probability, U count before the edge}.
struct BlockPrediction {
  double error{0.0};
  unsigned ops_before{0};
};

inline BlockPrediction attacked_block_error(const mqka::protocol::SessionState& s, std::size_t initiator,
                                            std::size_t t, std::size_t edge, double eve_x_weight) {
  const std::size_t ring = s.config.nodes + 1;
  const std::size_t big_n = s.config.parties;
  Mat4 before = Mat4::Identity(), after = Mat4::Identity();
  unsigned ops_before = 0;
  bool past_edge = false;
  std::size_t node = initiator;
  for (std::size_t step = 0; step < ring; ++step, node = (node + 1) % ring) {
    Mat4 local = Mat4::Identity();
    unsigned count = 0;
    if (node >= 1 && node <= big_n) {
      const auto& p = s.parties[node - 1];
      if (node != initiator) {
        local = u_matrix(p.private_input[2 * t], p.private_input[2 * t + 1]) * local;
        ++count;
      }
      const int doubled = s.encoding_tags[node][t] ^ p.basis_pad[2 * t];
      local = (doubled ? Mat4(u_matrix(0, 1) * u_matrix(1, 0)) : u_matrix(0, 0)) * local;
      count += doubled ? 2 : 1;
    } else if (node == 0) {
      const int doubled = s.encoding_tags[0][t];
      local = (doubled ? Mat4(u_matrix(0, 1) * u_matrix(1, 0)) : u_matrix(0, 0)) * local;
      count += doubled ? 2 : 1;
    }
    if (past_edge) {
      after = local * after;
    } else {
      before = local * before;
      ops_before += count;
    }
    if (node == edge) past_edge = true;
  }
  int parity = 0;
  for (const auto& p : s.parties) parity ^= p.basis_pad[2 * t];
  const auto& owner = s.parties[initiator - 1];
  const int lx = owner.preparation_pad[2 * t], ly = owner.preparation_pad[2 * t + 1];
  int expected_x = 0, expected_y = 0;
  for (const auto& p : s.parties) {
    expected_x ^= p.private_input[2 * t];
    expected_y ^= p.private_input[2 * t + 1];
  }
  // The honest outcome w satisfies k = s ^ w ^ l (parity 0) or k = s ^ w ^ 11 (parity 1).
  const int sx = owner.private_input[2 * t], sy = owner.private_input[2 * t + 1];
  const int wx = expected_x ^ sx ^ (parity == 0 ? lx : 1);
  const int wy = expected_y ^ sy ^ (parity == 0 ? ly : 1);
  const double ok = correct_decode_probability(hadamard_state(lx, ly), before, after, eve_x_weight, parity, lx, ly,
                                               2 * wx + wy);
  return {1.0 - ok, ops_before};
}

}  // namespace oracle
