#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>

#include "mqka/bits.hpp"
#include "mqka/rng.hpp"

namespace mqka::qstate {

using Amplitude = std::complex<double>;

inline constexpr double kTolerance = 1e-12;

// Pure state of one two-qubit carrier. amp[2a + b] is the amplitude of |ab>,
// a being the first tensor factor.
struct TwoQubitState {
  std::array<Amplitude, 4> amp{};

  const Amplitude& operator[](std::size_t ab) const { return amp[ab]; }
  Amplitude& operator[](std::size_t ab) { return amp[ab]; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amp) s += std::norm(a);
    return s;
  }

  friend bool operator==(const TwoQubitState&, const TwoQubitState&) = default;
};

enum class Basis { Z, X };

inline const char* to_string(Basis b) { return b == Basis::Z ? "Z" : "X"; }

inline Amplitude inner(const TwoQubitState& bra, const TwoQubitState& ket) {
  Amplitude s{0.0, 0.0};
  for (std::size_t k = 0; k < 4; ++k) s += std::conj(bra[k]) * ket[k];
  return s;
}

// True iff the amplitudes lie in {0, +-1/2, +-1} after removing the phase of
// the first nonzero amplitude.
inline bool in_protocol_amplitude_set(const TwoQubitState& s, double tol = 1e-9) {
  Amplitude phase{1.0, 0.0};
  for (const auto& a : s.amp) {
    if (std::abs(a) > tol) {
      phase = a / std::abs(a);
      break;
    }
  }
  for (const auto& a : s.amp) {
    const Amplitude r = a / phase;
    if (std::abs(r.imag()) > tol) return false;
    const double m = std::abs(r.real());
    if (std::abs(m) > tol && std::abs(m - 0.5) > tol && std::abs(m - 1.0) > tol) return false;
  }
  return true;
}

namespace detail {

// Closure check: operators map the protocol amplitude set into itself.
inline void check_closure(const TwoQubitState& in, const TwoQubitState& out) {
#ifdef MQKA_CHECK_AMPLITUDES
  if (in_protocol_amplitude_set(in) && !in_protocol_amplitude_set(out)) {
    throw std::logic_error("two-qubit operator left the protocol amplitude set");
  }
#else
  (void)in;
  (void)out;
#endif
}

}  // namespace detail

inline TwoQubitState make_basis_state(Bit m, Bit n) {
  TwoQubitState s;
  s[BitPair{m, n}.index()] = 1.0;
  return s;
}

// |phi~_xy> = 1/2 (|0> + (-1)^y |1>) (|0> + (-1)^x |1>); the first factor
// carries y, the second carries x.
inline TwoQubitState make_hadamard_state(Bit x, Bit y) {
  TwoQubitState s;
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      const int parity = static_cast<int>((y & a) ^ (x & b));
      s[2 * a + b] = parity ? -0.5 : 0.5;
    }
  }
  return s;
}

inline TwoQubitState make_hadamard_state(BitPair xy) { return make_hadamard_state(xy.first, xy.second); }
inline TwoQubitState make_basis_state(BitPair mn) { return make_basis_state(mn.first, mn.second); }

// U_mn = I - 2|mn><mn|.
inline TwoQubitState apply_u(const TwoQubitState& s, Bit m, Bit n) {
  TwoQubitState out = s;
  auto& a = out[BitPair{m, n}.index()];
  a = -a;
  detail::check_closure(s, out);
  return out;
}

// V_xy = 2|phi~_xy><phi~_xy| - I.
inline TwoQubitState apply_v(const TwoQubitState& s, Bit x, Bit y) {
  const TwoQubitState axis = make_hadamard_state(x, y);
  const Amplitude overlap = inner(axis, s);
  TwoQubitState out;
  for (std::size_t k = 0; k < 4; ++k) out[k] = 2.0 * overlap * axis[k] - s[k];
  detail::check_closure(s, out);
  return out;
}

inline TwoQubitState apply_u(const TwoQubitState& s, BitPair mn) { return apply_u(s, mn.first, mn.second); }
inline TwoQubitState apply_v(const TwoQubitState& s, BitPair xy) { return apply_v(s, xy.first, xy.second); }

// Outcome probabilities indexed by the decoded pair's index().
inline std::array<double, 4> z_probabilities(const TwoQubitState& s) {
  std::array<double, 4> p{};
  for (std::size_t k = 0; k < 4; ++k) p[k] = std::norm(s[k]);
  return p;
}

// Entry k = |<phi~_xy|s>|^2 with (x, y) = BitPair::from_index(k).
inline std::array<double, 4> x_probabilities(const TwoQubitState& s) {
  std::array<double, 4> p{};
  for (std::size_t k = 0; k < 4; ++k) p[k] = std::norm(inner(make_hadamard_state(BitPair::from_index(k)), s));
  return p;
}

inline std::array<double, 4> probabilities(const TwoQubitState& s, Basis basis) {
  return basis == Basis::Z ? z_probabilities(s) : x_probabilities(s);
}

namespace detail {

inline std::size_t sample_index(const std::array<double, 4>& p, Rng& rng) {
  const double u = rng.uniform01();
  double cumulative = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    if (p[k] <= 0.0) continue;
    cumulative += p[k];
    last_nonzero = k;
    if (u < cumulative) return k;
  }
  // Rounding left u above the cumulative sum.
  return last_nonzero;
}

}  // namespace detail

// Measures both qubits in {|0>,|1>}; returns (a, b) for collapse onto |ab>.
inline BitPair measure_z(const TwoQubitState& s, Rng& rng) {
  return BitPair::from_index(detail::sample_index(z_probabilities(s), rng));
}

// Measures both qubits in {|+>,|->}; returns (x, y) for collapse onto |phi~_xy>.
inline BitPair measure_x(const TwoQubitState& s, Rng& rng) {
  return BitPair::from_index(detail::sample_index(x_probabilities(s), rng));
}

inline BitPair measure(const TwoQubitState& s, Basis basis, Rng& rng) {
  return basis == Basis::Z ? measure_z(s, rng) : measure_x(s, rng);
}

// Post-measurement state for an outcome in the given basis.
inline TwoQubitState prepare(Basis basis, BitPair outcome) {
  return basis == Basis::Z ? make_basis_state(outcome) : make_hadamard_state(outcome);
}

inline bool equal_up_to_phase(const TwoQubitState& a, const TwoQubitState& b, double tol = kTolerance) {
  return std::abs(inner(a, b)) >= 1.0 - tol;
}

}  // namespace mqka::qstate
