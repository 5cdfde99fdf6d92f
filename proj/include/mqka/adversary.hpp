#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mqka/attack.hpp"
#include "mqka/auth.hpp"
#include "mqka/protocol.hpp"
#include "mqka/qstate.hpp"
#include "mqka/rng.hpp"

namespace mqka::adversary {

using qstate::TwoQubitState;

// ---------------------------------------------------------------------------
// Intercept-resend

struct Interception {
  TwoQubitState resent;
  qstate::Basis basis{qstate::Basis::X};
  BitPair outcome;
};

// Eve measures both qubits in a product basis and re-prepares the collapsed
// product state.
inline Interception intercept_resend(const TwoQubitState& s, BasisPolicy policy, Rng& rng) {
  Interception out;
  switch (policy) {
    case BasisPolicy::AlwaysX: out.basis = qstate::Basis::X; break;
    case BasisPolicy::AlwaysZ: out.basis = qstate::Basis::Z; break;
    case BasisPolicy::RandomXZ: out.basis = rng.bit() ? qstate::Basis::Z : qstate::Basis::X; break;
  }
  out.outcome = qstate::measure(s, out.basis, rng);
  out.resent = qstate::prepare(out.basis, out.outcome);
  return out;
}

// Set a carrier currently belongs to, from the parity of honest U's applied.
inline StateSet carrier_set(const protocol::TravellingSequence& seq, std::size_t t) {
  return seq.u_counts.at(t) % 2 == 0 ? StateSet::Even : StateSet::Odd;
}

struct EveObservation {
  std::size_t initiator{0};
  std::size_t position{0};
  std::size_t edge{0};
  StateSet set{StateSet::Even};
  qstate::Basis basis{qstate::Basis::X};
  BitPair outcome;
};

class InterceptResendHook : public protocol::HopHook {
 public:
  InterceptResendHook(std::vector<std::size_t> edges, BasisPolicy policy, StateSet target_set)
      : edges_(std::move(edges)), policy_(policy), target_set_(target_set) {}

  protocol::HopOutcome on_hop(const protocol::HopContext& ctx, protocol::TravellingSequence& seq,
                              Rng& rng) override {
    if (std::find(edges_.begin(), edges_.end(), ctx.edge) == edges_.end()) return protocol::HopOutcome::Delivered;
    for (std::size_t t = 0; t < seq.size(); ++t) {
      const StateSet set = carrier_set(seq, t);
      if (target_set_ != StateSet::Any && set != target_set_) continue;
      const Interception hit = intercept_resend(seq.states[t], policy_, rng);
      seq.states[t] = hit.resent;
      observations_.push_back({ctx.initiator, t, ctx.edge, set, hit.basis, hit.outcome});
    }
    return protocol::HopOutcome::Delivered;
  }

  const std::vector<EveObservation>& observations() const { return observations_; }

 private:
  std::vector<std::size_t> edges_;
  BasisPolicy policy_;
  StateSet target_set_;
  std::vector<EveObservation> observations_;
};

// Forwards everything untouched.
class PassiveHook : public protocol::HopHook {
 public:
  protocol::HopOutcome on_hop(const protocol::HopContext&, protocol::TravellingSequence&, Rng&) override {
    return protocol::HopOutcome::Delivered;
  }
};

// ---------------------------------------------------------------------------
// Forged identity tags

inline auth::IdentityTag make_fake_tag(FakeTagMode mode, const BitString& chosen, std::size_t n, Rng& rng) {
  switch (mode) {
    case FakeTagMode::Random: return {rng.bits(n)};
    case FakeTagMode::AllZero: return {BitString(n)};
    case FakeTagMode::Chosen:
      if (chosen.size() != n) throw ConfigError("[adversary] chosen_tag: length must equal n");
      return {chosen};
  }
  return {BitString(n)};
}

// The impersonator encodes identity with a forged tag at the target's node.
// The third party still aggregates the true tags and B is published honestly.
inline void impersonation_scenario(protocol::SessionState& s, std::size_t target, FakeTagMode mode,
                                   const BitString& chosen, Rng& rng) {
  if (s.phase != protocol::Phase::Ready) throw ProtocolOrderError("impersonation must be set up before the ring pass");
  if (target < 1 || target > s.parties_count()) throw ConfigError("[adversary] target: must be a participant 1..N");
  s.encoding_tags.at(target) = make_fake_tag(mode, chosen, s.config.states, rng);
}

inline void forged_tp_tag_scenario(protocol::SessionState& s, FakeTagMode mode, const BitString& chosen, Rng& rng) {
  if (s.phase != protocol::Phase::Ready) throw ProtocolOrderError("tag forgery must be set up before the ring pass");
  s.encoding_tags.at(0) = make_fake_tag(mode, chosen, s.config.states, rng);
}

// ---------------------------------------------------------------------------
// Attack statistics

struct AttackStats {
  AttackKind kind{AttackKind::None};
  std::size_t attacked_blocks{0};
  std::size_t erroneous_blocks{0};
  std::size_t attacked_even{0};
  std::size_t erroneous_even{0};
  std::size_t attacked_odd{0};
  std::size_t erroneous_odd{0};
  std::size_t eve_observations{0};
  std::size_t eve_correct_blocks{0};
  std::size_t forged_positions{0};

  double block_error_rate() const {
    return attacked_blocks == 0 ? 0.0 : static_cast<double>(erroneous_blocks) / static_cast<double>(attacked_blocks);
  }
  double eve_information_proxy() const {
    return eve_observations == 0 ? 0.0
                                 : static_cast<double>(eve_correct_blocks) / static_cast<double>(eve_observations);
  }

  friend bool operator==(const AttackStats&, const AttackStats&) = default;
};

// An attacked block is wrong when the initiator's extracted block differs
// from the corresponding block of S_1 xor ... xor S_N.
inline AttackStats intercept_stats(const protocol::SessionState& s, const std::vector<EveObservation>& obs) {
  AttackStats st;
  st.kind = AttackKind::InterceptResend;
  const BitString expected = protocol::xor_of_private_inputs(s);
  std::map<std::pair<std::size_t, std::size_t>, StateSet> blocks;
  for (const auto& o : obs) {
    blocks.emplace(std::make_pair(o.initiator, o.position), o.set);
    ++st.eve_observations;
    st.eve_correct_blocks += o.outcome == expected.pair(o.position);
  }
  for (const auto& [key, set] : blocks) {
    const auto& [initiator, t] = key;
    const bool wrong = !(s.party(initiator).key.pair(t) == expected.pair(t));
    ++st.attacked_blocks;
    st.erroneous_blocks += wrong;
    if (set == StateSet::Even) {
      ++st.attacked_even;
      st.erroneous_even += wrong;
    } else {
      ++st.attacked_odd;
      st.erroneous_odd += wrong;
    }
  }
  return st;
}

// Forged-tag runs: positions whose encoding tag differs from the true one,
// and blocks (over all sequences) that decode wrongly.
inline AttackStats forgery_stats(const protocol::SessionState& s, AttackKind kind, std::size_t node) {
  AttackStats st;
  st.kind = kind;
  const auth::IdentityTag& truth = node == 0 ? s.tp_tag : s.party(node).tag;
  st.forged_positions = truth.bits.hamming_distance(s.encoding_tags.at(node).bits);
  const BitString expected = protocol::xor_of_private_inputs(s);
  for (const auto& p : s.parties) {
    for (std::size_t t = 0; t < s.config.states; ++t) {
      if (truth[t] == s.encoding_tags[node][t]) continue;
      ++st.attacked_blocks;
      st.erroneous_blocks += !(p.key.pair(t) == expected.pair(t));
    }
  }
  return st;
}

// ---------------------------------------------------------------------------
// Entangle-measure: linear dependence of the encoded ancilla family

using Vector = Eigen::VectorXcd;

struct AncillaFamily {
  std::array<Vector, 4> e;      // e_00, e_01, e_10, e_11
  std::array<Vector, 8> alpha;  // composites of dimension 4d

  Eigen::Index ancilla_dim() const { return e[0].size(); }
};

// Sign pattern of composite k over |00>,|01>,|10>,|11>, scaled by 1/2.
// Rows 0-3: one U applied to the uniform state (odd encodings); rows 4-7:
// Hadamard-family states (even encodings). Global sign fixed so the |00>
// coefficient is +1/2.
inline std::array<double, 4> composite_coefficients(std::size_t k) {
  if (k >= 8) throw std::out_of_range("composite index must be 0..7");
  const BitPair label = BitPair::from_index(k % 4);
  const TwoQubitState s = k < 4 ? qstate::apply_u(qstate::make_hadamard_state(0, 0), label)
                                : qstate::make_hadamard_state(label);
  const double sign = s[0].real() < 0 ? -1.0 : 1.0;
  std::array<double, 4> c{};
  for (std::size_t ab = 0; ab < 4; ++ab) c[ab] = sign * s[ab].real();
  return c;
}

inline AncillaFamily build_entangled_family(const Vector& e00, const Vector& e01, const Vector& e10,
                                            const Vector& e11) {
  const Eigen::Index d = e00.size();
  if (d < 1) throw std::invalid_argument("ancilla dimension must be at least 1");
  if (e01.size() != d || e10.size() != d || e11.size() != d) {
    throw std::invalid_argument("ancilla vectors must share one dimension");
  }
  AncillaFamily f;
  f.e = {e00, e01, e10, e11};
  for (std::size_t k = 0; k < 8; ++k) {
    const auto c = composite_coefficients(k);
    Vector v(4 * d);
    for (std::size_t ab = 0; ab < 4; ++ab) v.segment(static_cast<Eigen::Index>(ab) * d, d) = c[ab] * f.e[ab];
    f.alpha[k] = std::move(v);
  }
  return f;
}

inline AncillaFamily random_ancilla_family(std::size_t d, Rng& rng) {
  std::array<Vector, 4> e;
  for (auto& v : e) {
    v.resize(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = {rng.normal(), rng.normal()};
    v.normalize();
  }
  return build_entangled_family(e[0], e[1], e[2], e[3]);
}

struct UsdCheck {
  bool feasible{false};
  std::size_t rank{0};
  std::array<double, 3> residuals{};
  std::vector<double> singular_values;
};

// Unambiguous discrimination of the eight composites is possible iff they
// are linearly independent, i.e. rank 8.
inline UsdCheck check_usd_feasible(const AncillaFamily& f, double tol = 1e-10) {
  const Eigen::Index rows = f.alpha[0].size();
  Eigen::MatrixXcd m(rows, 8);
  for (Eigen::Index k = 0; k < 8; ++k) m.col(k) = f.alpha[static_cast<std::size_t>(k)];

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  const double scale = std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);

  UsdCheck out;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    out.singular_values.push_back(sv[i]);
    if (sv[i] > tol * scale) ++out.rank;
  }
  out.feasible = out.rank == 8;

  const auto& a = f.alpha;
  out.residuals[0] = (a[7] - (a[0] + a[4] - a[3])).norm();
  out.residuals[1] = (a[7] - (a[1] + a[5] - a[3])).norm();
  out.residuals[2] = (a[7] - (a[2] + a[6] - a[3])).norm();
  return out;
}

}  // namespace mqka::adversary
