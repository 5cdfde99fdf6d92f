#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mqka/attack.hpp"
#include "mqka/auth.hpp"
#include "mqka/bits.hpp"
#include "mqka/errors.hpp"
#include "mqka/qstate.hpp"
#include "mqka/rng.hpp"

namespace mqka::protocol {

using qstate::TwoQubitState;

enum class TagMode { Derived, Injected };

// Optional per-party values that replace random draws. Empty id / r are
// drawn from the session rng.
struct PartyInputs {
  BitString id;
  BitString r;
  BitString private_input;    // S_i
  BitString preparation_pad;  // L_i
  BitString basis_pad;        // B_i

  friend bool operator==(const PartyInputs&, const PartyInputs&) = default;
};

struct SessionConfig {
  std::size_t nodes{3};        // M, ring size excluding the third party
  std::size_t parties{3};      // N, participants are nodes 1..N
  std::size_t states{4};       // n, two-qubit carriers per sequence
  std::size_t id_bits{6};      // l
  std::size_t random_bits{4};  // |r_i| and |r_0|
  std::size_t key_bytes{32};   // master key length
  double delta{0.0};
  double threshold{0.0};
  std::uint64_t seed{0};
  auth::MacAlgorithm mac{auth::MacAlgorithm::HmacSha256};
  TagMode tag_mode{TagMode::Derived};
  std::vector<auth::IdentityTag> injected_tags;  // h_1..h_N when injected
  bool explicit_inputs{false};
  std::vector<PartyInputs> inputs;  // one per party when explicit
  BitString tp_random;              // r_0; drawn when empty
  adversary::AttackScenario adversary;

  friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

// floor(delta * n / N), the number of key bits each user claims for detection.
inline std::size_t samples_per_party(const SessionConfig& cfg) {
  const double raw = cfg.delta * static_cast<double>(cfg.states) / static_cast<double>(cfg.parties);
  return static_cast<std::size_t>(std::floor(raw + 1e-9));
}

inline void validate_config(const SessionConfig& cfg) {
  const auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (cfg.parties < 2) fail("[network] N: need at least 2 participants (2 <= N <= M)");
  if (cfg.parties > cfg.nodes) fail("[network] N: participants exceed ring size (2 <= N <= M)");
  if (cfg.states < 1) fail("[session] n: need at least one two-qubit state per sequence (n >= 1)");
  if (cfg.id_bits < 1) fail("[session] l: identity length must be at least 1");
  if (cfg.random_bits < 1) fail("[session] r_bits: random string length must be at least 1");
  if (cfg.key_bytes < 1) fail("[session] key_bytes: master key length must be at least 1");
  if (!(cfg.delta >= 0.0 && cfg.delta < 1.0)) fail("[session] delta: detection fraction must satisfy 0 <= delta < 1");
  if (!(cfg.threshold >= 0.0 && cfg.threshold < 1.0)) fail("[session] threshold: must satisfy 0 <= threshold < 1");
  if (samples_per_party(cfg) * cfg.parties > 2 * cfg.states) {
    fail("[session] delta: sample overflow, floor(delta*n/N)*N must not exceed 2n");
  }

  if (cfg.tag_mode == TagMode::Injected) {
    if (cfg.injected_tags.size() != cfg.parties) {
      fail("[tags] injected mode needs exactly N tag values (h1..hN)");
    }
    for (std::size_t i = 0; i < cfg.injected_tags.size(); ++i) {
      if (cfg.injected_tags[i].size() != cfg.states) {
        fail("[tags] h" + std::to_string(i + 1) + ": tag length must equal n = " + std::to_string(cfg.states));
      }
    }
  }

  if (cfg.explicit_inputs) {
    if (cfg.inputs.size() != cfg.parties) fail("[inputs] explicit mode needs values for all N parties");
    for (std::size_t i = 0; i < cfg.inputs.size(); ++i) {
      const auto& in = cfg.inputs[i];
      const std::string k = std::to_string(i + 1);
      if (in.private_input.size() != 2 * cfg.states) fail("[inputs] S" + k + ": length must equal 2n");
      if (in.preparation_pad.size() != 2 * cfg.states) fail("[inputs] L" + k + ": length must equal 2n");
      if (in.basis_pad.size() != 2 * cfg.states) fail("[inputs] B" + k + ": length must equal 2n");
      if (!in.id.empty() && in.id.size() != cfg.id_bits) fail("[inputs] ID" + k + ": length must equal l");
      if (!in.r.empty() && in.r.size() != cfg.random_bits) fail("[inputs] r" + k + ": length must equal r_bits");
    }
  }
  if (!cfg.tp_random.empty() && cfg.tp_random.size() != cfg.random_bits) {
    fail("[inputs] r0: length must equal r_bits");
  }

  const auto& adv = cfg.adversary;
  for (std::size_t e : adv.edges) {
    if (e > cfg.nodes) fail("[adversary] edges: edge " + std::to_string(e) + " outside ring 0..M");
  }
  switch (adv.kind) {
    case adversary::AttackKind::None: break;
    case adversary::AttackKind::InterceptResend:
      if (adv.edges.empty()) fail("[adversary] edges: intercept-resend needs at least one edge");
      break;
    case adversary::AttackKind::ImpersonateUser:
      if (adv.target < 1 || adv.target > cfg.parties) fail("[adversary] target: must be a participant 1..N");
      [[fallthrough]];
    case adversary::AttackKind::ForgedTpTag:
      if (adv.fake_tag_mode == adversary::FakeTagMode::Chosen && adv.chosen_tag.size() != cfg.states) {
        fail("[adversary] chosen_tag: length must equal n");
      }
      break;
  }
}

struct PartyRecord {
  std::size_t index{0};
  BitString id;
  auth::MasterKey master_key;
  BitString r;
  BitString private_input;    // S_i, 2n bits
  BitString preparation_pad;  // L_i, 2n bits
  BitString basis_pad;        // B_i, 2n bits
  auth::IdentityTag tag;      // h_i, n bits
  BitString key;              // K_i, empty until extracted

  friend bool operator==(const PartyRecord&, const PartyRecord&) = default;
};

enum class HopAction { Prepare, IdentityEncode, PrivateEncode, Forward };

inline const char* to_string(HopAction a) {
  switch (a) {
    case HopAction::Prepare: return "prepare";
    case HopAction::IdentityEncode: return "identity";
    case HopAction::PrivateEncode: return "private";
    case HopAction::Forward: return "forward";
  }
  return "?";
}

inline constexpr std::size_t kAllPositions = std::numeric_limits<std::size_t>::max();

struct HopEntry {
  std::size_t holder{0};
  HopAction action{HopAction::Forward};
  std::size_t position{kAllPositions};
  std::uint8_t u_ops{0};  // elementary U applications at this position

  friend bool operator==(const HopEntry&, const HopEntry&) = default;
};

struct TravellingSequence {
  std::size_t initiator{0};
  std::size_t holder{0};
  std::vector<TwoQubitState> states;
  std::vector<unsigned> u_counts;  // honest U applications so far, per position
  std::vector<HopEntry> hop_log;

  std::size_t size() const { return states.size(); }

  friend bool operator==(const TravellingSequence&, const TravellingSequence&) = default;
};

enum class Phase { Ready, Returned, Published, Detected };

struct PositionDecode {
  Bit parity{0};  // C_t
  qstate::Basis basis{qstate::Basis::X};
  BitPair outcome;
  double outcome_probability{0.0};
  BitPair key_block;

  friend bool operator==(const PositionDecode&, const PositionDecode&) = default;
};

struct SessionState {
  SessionConfig config;
  Phase phase{Phase::Ready};
  BitString tp_random;  // r_0
  std::vector<PartyRecord> parties;
  auth::IdentityTag tp_tag;  // h_0 computed from the true user tags
  // Tags actually used for identity encoding; entry 0 is the third party.
  std::vector<auth::IdentityTag> encoding_tags;
  std::vector<TravellingSequence> sequences;  // sequences[i-1] initiated by P_i
  std::vector<std::size_t> publication_order;
  std::vector<BitString> published_bases;
  std::vector<std::vector<PositionDecode>> decode_trace;

  std::size_t parties_count() const { return parties.size(); }
  PartyRecord& party(std::size_t i) { return parties.at(i - 1); }
  const PartyRecord& party(std::size_t i) const { return parties.at(i - 1); }
  TravellingSequence& sequence_of(std::size_t i) { return sequences.at(i - 1); }
  const TravellingSequence& sequence_of(std::size_t i) const { return sequences.at(i - 1); }

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

// Expected agreement key S_1 xor ... xor S_N.
inline BitString xor_of_private_inputs(const SessionState& s) {
  BitString k(2 * s.config.states);
  for (const auto& p : s.parties) k ^= p.private_input;
  return k;
}

inline SessionState init_session(const SessionConfig& cfg, Rng& rng) {
  validate_config(cfg);

  const std::size_t n = cfg.states;
  SessionState s;
  s.config = cfg;
  s.tp_random = cfg.tp_random.empty() ? rng.bits(cfg.random_bits) : cfg.tp_random;

  std::vector<auth::IdentityTag> tags;
  for (std::size_t i = 1; i <= cfg.parties; ++i) {
    const PartyInputs* in = cfg.explicit_inputs ? &cfg.inputs[i - 1] : nullptr;
    PartyRecord p;
    p.index = i;
    p.id = (in && !in->id.empty()) ? in->id : rng.bits(cfg.id_bits);
    p.master_key = auth::MasterKey::random(cfg.key_bytes, rng);
    p.r = (in && !in->r.empty()) ? in->r : rng.bits(cfg.random_bits);
    p.private_input = in ? in->private_input : rng.bits(2 * n);
    p.preparation_pad = in ? in->preparation_pad : rng.bits(2 * n);
    p.basis_pad = in ? in->basis_pad : rng.bits(2 * n);
    p.tag = cfg.tag_mode == TagMode::Injected ? cfg.injected_tags[i - 1]
                                              : auth::derive_tag(p.master_key, p.id, p.r, s.tp_random, n, cfg.mac);
    tags.push_back(p.tag);
    s.parties.push_back(std::move(p));
  }
  s.tp_tag = auth::aggregate_tags(tags);
  s.encoding_tags.push_back(s.tp_tag);
  s.encoding_tags.insert(s.encoding_tags.end(), tags.begin(), tags.end());

  for (const auto& p : s.parties) {
    TravellingSequence seq;
    seq.initiator = p.index;
    seq.holder = p.index;
    seq.u_counts.assign(n, 0);
    for (std::size_t t = 0; t < n; ++t) {
      seq.states.push_back(qstate::make_hadamard_state(p.preparation_pad.pair(t)));
      seq.hop_log.push_back({p.index, HopAction::Prepare, t, 0});
    }
    s.sequences.push_back(std::move(seq));
  }
  s.decode_trace.resize(cfg.parties);
  s.phase = Phase::Ready;
  return s;
}

inline void encode_identity(TravellingSequence& seq, std::size_t t, auth::IdentityOpChoice choice) {
  auto& st = seq.states.at(t);
  std::uint8_t ops = 0;
  if (choice == auth::IdentityOpChoice::SingleU00) {
    st = qstate::apply_u(st, 0, 0);
    ops = 1;
  } else {
    st = qstate::apply_u(qstate::apply_u(st, 1, 0), 0, 1);
    ops = 2;
  }
  seq.u_counts[t] += ops;
  seq.hop_log.push_back({seq.holder, HopAction::IdentityEncode, t, ops});
}

inline void encode_private(TravellingSequence& seq, std::size_t t, Bit s_odd, Bit s_even) {
  auto& st = seq.states.at(t);
  st = qstate::apply_u(st, s_odd, s_even);
  seq.u_counts[t] += 1;
  seq.hop_log.push_back({seq.holder, HopAction::PrivateEncode, t, 1});
}

// Identity-op choice of ring node `node` (0 = third party) at position t.
inline auth::IdentityOpChoice identity_choice(const SessionState& s, std::size_t node, std::size_t t) {
  if (node == 0) return auth::select_identity_op(s.encoding_tags[0][t], 0);
  return auth::select_identity_op(s.encoding_tags.at(node)[t], s.party(node).basis_pad[2 * t]);
}

// Row of identity choices for a node; 1 marks U01U10.
inline BitString selector_row(const SessionState& s, std::size_t node) {
  BitString row(s.config.states);
  for (std::size_t t = 0; t < s.config.states; ++t) {
    row.set(t, identity_choice(s, node, t) == auth::IdentityOpChoice::DoubleU01U10 ? 1 : 0);
  }
  return row;
}

enum class HopOutcome { Delivered, Lost };

struct HopContext {
  std::size_t edge{0};
  std::size_t from{0};
  std::size_t to{0};
  std::size_t initiator{0};
};

// Invoked on every inter-node hop; may mutate the carriers in flight.
class HopHook {
 public:
  virtual ~HopHook() = default;
  virtual HopOutcome on_hop(const HopContext& ctx, TravellingSequence& seq, Rng& rng) = 0;
};

namespace detail {

inline void process_node(const SessionState& s, TravellingSequence& seq, std::size_t node, bool initiator) {
  const std::size_t n = s.config.states;
  if (node == 0) {
    for (std::size_t t = 0; t < n; ++t) encode_identity(seq, t, identity_choice(s, 0, t));
    return;
  }
  if (node > s.config.parties) return;  // switch closed, pass-through
  const auto& p = s.party(node);
  for (std::size_t t = 0; t < n; ++t) {
    if (!initiator) {
      const BitPair in = p.private_input.pair(t);
      encode_private(seq, t, in.first, in.second);
    }
    encode_identity(seq, t, identity_choice(s, node, t));
  }
}

}  // namespace detail

// Sends every sequence once around the ring: P_i, P_{i+1}, ..., P_N, the
// pass-through nodes N+1..M, P_0, P_1, ..., back to P_i. Sequences are
// processed in initiator order, hops in ring order.
inline void run_ring_pass(SessionState& s, Rng& rng, HopHook* hook = nullptr) {
  if (s.phase != Phase::Ready) throw ProtocolOrderError("run_ring_pass requires a freshly initialized session");
  const std::size_t ring = s.config.nodes + 1;
  for (auto& seq : s.sequences) {
    const std::size_t start = seq.initiator;
    detail::process_node(s, seq, start, true);
    std::size_t node = start;
    do {
      const std::size_t next = (node + 1) % ring;
      seq.hop_log.push_back({node, HopAction::Forward, kAllPositions, 0});
      if (hook != nullptr) {
        const HopContext ctx{node, node, next, start};
        if (hook->on_hop(ctx, seq, rng) == HopOutcome::Lost) {
          throw TransportError("channel loss on edge " + std::to_string(node) + " (node " + std::to_string(node) +
                               " -> " + std::to_string(next) + ") for sequence " + std::to_string(start));
        }
      }
      seq.holder = next;
      node = next;
      if (node != start) detail::process_node(s, seq, node, false);
    } while (node != start);
  }
  s.phase = Phase::Returned;
}

// Simultaneous publication of all B_i; the party order is randomized and kept.
inline void publish_bases(SessionState& s, Rng& rng) {
  if (s.phase != Phase::Returned) throw ProtocolOrderError("bases are published only after all sequences return");
  std::vector<std::size_t> order;
  for (std::size_t i = 1; i <= s.parties_count(); ++i) order.push_back(i);
  for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
  s.publication_order = order;
  s.published_bases.clear();
  for (const auto& p : s.parties) s.published_bases.push_back(p.basis_pad);
  s.phase = Phase::Published;
}

// C_t = xor over published B_j of b_{j,2t-1}.
inline BitString basis_parity(const SessionState& s) {
  if (s.phase != Phase::Published && s.phase != Phase::Detected) {
    throw ProtocolOrderError("basis parity needs the published B strings");
  }
  BitString c(s.config.states);
  for (const auto& b : s.published_bases) c ^= b.odd_positions();
  return c;
}

struct KeyExtraction {
  BitString key;
  std::vector<PositionDecode> trace;
};

inline KeyExtraction extract_key_traced(SessionState& s, std::size_t i, Rng& rng) {
  if (s.phase != Phase::Published) throw ProtocolOrderError("extract_key called before B publication");
  auto& party = s.party(i);
  if (!party.key.empty()) throw ProtocolOrderError("key of party " + std::to_string(i) + " already extracted");
  auto& seq = s.sequence_of(i);
  if (seq.holder != i) throw ProtocolOrderError("sequence has not returned to its initiator");

  const BitString c = basis_parity(s);
  const std::size_t n = s.config.states;
  KeyExtraction out{BitString(2 * n), {}};
  for (std::size_t t = 0; t < n; ++t) {
    PositionDecode d;
    d.parity = c[t];
    const BitPair s_block = party.private_input.pair(t);
    const BitPair l_block = party.preparation_pad.pair(t);
    auto& st = seq.states[t];
    if (d.parity == 0) {
      d.basis = qstate::Basis::X;
      d.outcome = qstate::measure_x(st, rng);
      d.outcome_probability = qstate::x_probabilities(st)[d.outcome.index()];
      d.key_block = s_block ^ d.outcome ^ l_block;
    } else {
      d.basis = qstate::Basis::Z;
      st = qstate::apply_v(st, l_block);
      d.outcome = qstate::measure_z(st, rng);
      d.outcome_probability = qstate::z_probabilities(st)[d.outcome.index()];
      d.key_block = s_block ^ d.outcome ^ BitPair{1, 1};
    }
    st = qstate::prepare(d.basis, d.outcome);
    out.key.set_pair(t, d.key_block);
    out.trace.push_back(d);
  }
  party.key = out.key;
  s.decode_trace[i - 1] = out.trace;
  return out;
}

inline BitString extract_key(SessionState& s, std::size_t i, Rng& rng) { return extract_key_traced(s, i, rng).key; }

struct DetectionReport {
  std::vector<std::vector<std::size_t>> samples;  // 0-based key-bit positions per party
  std::size_t bit_comparisons{0};
  std::size_t bit_disagreements{0};
  double error_rate{0.0};
  std::size_t block_comparisons{0};
  std::size_t block_disagreements{0};
  double block_error_rate{0.0};
  std::vector<double> per_party_error_rate;
  bool aborted{false};
  BitString session_key;

  friend bool operator==(const DetectionReport&, const DetectionReport&) = default;
};

// Each user claims floor(delta*n/N) fresh positions; all users disclose their
// bits there and are compared against the claiming user.
inline DetectionReport detect_eavesdropping(SessionState& s, Rng& rng) {
  if (s.phase != Phase::Published) throw ProtocolOrderError("detection runs after key extraction");
  for (const auto& p : s.parties) {
    if (p.key.empty()) throw ProtocolOrderError("detection needs every party's extracted key");
  }
  const std::size_t key_len = 2 * s.config.states;
  const std::size_t per_party = samples_per_party(s.config);
  const std::size_t n_parties = s.parties_count();

  std::vector<std::size_t> pool(key_len);
  for (std::size_t k = 0; k < key_len; ++k) pool[k] = k;
  std::vector<bool> claimed(key_len, false);

  DetectionReport r;
  for (std::size_t i = 0; i < n_parties; ++i) {
    std::vector<std::size_t> mine;
    for (std::size_t k = 0; k < per_party; ++k) {
      const std::size_t idx = rng.below(pool.size());
      mine.push_back(pool[idx]);
      pool[idx] = pool.back();
      pool.pop_back();
    }
    std::sort(mine.begin(), mine.end());
    for (std::size_t pos : mine) claimed[pos] = true;
    r.samples.push_back(std::move(mine));
  }

  for (std::size_t i = 0; i < n_parties; ++i) {
    const BitString& own = s.parties[i].key;
    std::size_t cmp = 0, bad = 0;
    std::vector<std::size_t> blocks;
    for (std::size_t pos : r.samples[i]) {
      blocks.push_back(pos / 2);
      for (std::size_t j = 0; j < n_parties; ++j) {
        if (j == i) continue;
        ++cmp;
        bad += own[pos] != s.parties[j].key[pos];
      }
    }
    blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
    for (std::size_t b : blocks) {
      for (std::size_t j = 0; j < n_parties; ++j) {
        if (j == i) continue;
        ++r.block_comparisons;
        r.block_disagreements += !(own.pair(b) == s.parties[j].key.pair(b));
      }
    }
    r.bit_comparisons += cmp;
    r.bit_disagreements += bad;
    r.per_party_error_rate.push_back(cmp == 0 ? 0.0 : static_cast<double>(bad) / static_cast<double>(cmp));
  }
  if (r.bit_comparisons > 0) r.error_rate = static_cast<double>(r.bit_disagreements) / static_cast<double>(r.bit_comparisons);
  if (r.block_comparisons > 0) {
    r.block_error_rate = static_cast<double>(r.block_disagreements) / static_cast<double>(r.block_comparisons);
  }
  r.aborted = r.error_rate > s.config.threshold;
  if (!r.aborted) {
    for (std::size_t k = 0; k < key_len; ++k) {
      if (!claimed[k]) r.session_key.push_back(s.parties.front().key[k]);
    }
  }
  s.phase = Phase::Detected;
  return r;
}

struct EfficiencyAccounting {
  double key_bits{0.0};        // c = (2 - delta) n
  double qubits{0.0};          // q = n N
  double classical_bits{0.0};  // b = 2 n N
  double eta{0.0};

  friend bool operator==(const EfficiencyAccounting&, const EfficiencyAccounting&) = default;
};

inline double particle_efficiency(std::size_t parties, double delta) {
  if (parties < 2) throw ConfigError("efficiency: need N >= 2");
  if (!(delta >= 0.0 && delta < 1.0)) throw ConfigError("efficiency: need 0 <= delta < 1");
  return (2.0 - delta) / (3.0 * static_cast<double>(parties));
}

inline EfficiencyAccounting efficiency_accounting(std::size_t parties, double delta, std::size_t states) {
  EfficiencyAccounting a;
  a.eta = particle_efficiency(parties, delta);
  const double n = static_cast<double>(states);
  const double big_n = static_cast<double>(parties);
  a.key_bits = (2.0 - delta) * n;
  a.qubits = n * big_n;
  a.classical_bits = 2.0 * n * big_n;
  return a;
}

}  // namespace mqka::protocol
