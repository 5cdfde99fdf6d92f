#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mqka/bits.hpp"
#include "mqka/errors.hpp"

namespace mqka::adversary {

enum class AttackKind { None, InterceptResend, ImpersonateUser, ForgedTpTag };

// Eve's product-measurement menu for intercept-resend.
enum class BasisPolicy { RandomXZ, AlwaysX, AlwaysZ };

// Which carriers Eve touches, by parity of honest U applications so far:
// even parity = Hadamard-family states, odd parity = single-flip states.
enum class StateSet { Any, Even, Odd };

enum class FakeTagMode { Random, AllZero, Chosen };

struct AttackScenario {
  AttackKind kind{AttackKind::None};
  // Ring edges attacked; edge e carries node e -> node (e + 1) mod (M + 1),
  // with node 0 the third party and nodes N+1..M pass-through.
  std::vector<std::size_t> edges;
  BasisPolicy policy{BasisPolicy::RandomXZ};
  StateSet target_set{StateSet::Any};
  std::size_t target{1};
  FakeTagMode fake_tag_mode{FakeTagMode::Random};
  BitString chosen_tag;

  friend bool operator==(const AttackScenario&, const AttackScenario&) = default;
};

inline std::string to_string(AttackKind k) {
  switch (k) {
    case AttackKind::None: return "none";
    case AttackKind::InterceptResend: return "intercept-resend";
    case AttackKind::ImpersonateUser: return "impersonate";
    case AttackKind::ForgedTpTag: return "forged-tp-tag";
  }
  return "?";
}

inline std::string to_string(BasisPolicy p) {
  switch (p) {
    case BasisPolicy::RandomXZ: return "random-xz";
    case BasisPolicy::AlwaysX: return "always-x";
    case BasisPolicy::AlwaysZ: return "always-z";
  }
  return "?";
}

inline std::string to_string(StateSet s) {
  switch (s) {
    case StateSet::Any: return "any";
    case StateSet::Even: return "even";
    case StateSet::Odd: return "odd";
  }
  return "?";
}

inline std::string to_string(FakeTagMode m) {
  switch (m) {
    case FakeTagMode::Random: return "random";
    case FakeTagMode::AllZero: return "all-zero";
    case FakeTagMode::Chosen: return "chosen";
  }
  return "?";
}

inline AttackKind parse_attack_kind(std::string_view s) {
  if (s == "none") return AttackKind::None;
  if (s == "intercept-resend") return AttackKind::InterceptResend;
  if (s == "impersonate") return AttackKind::ImpersonateUser;
  if (s == "forged-tp-tag") return AttackKind::ForgedTpTag;
  throw ConfigError("[adversary] type: unknown value '" + std::string(s) +
                    "' (expected none, intercept-resend, impersonate, forged-tp-tag)");
}

inline BasisPolicy parse_basis_policy(std::string_view s) {
  if (s == "random-xz") return BasisPolicy::RandomXZ;
  if (s == "always-x") return BasisPolicy::AlwaysX;
  if (s == "always-z") return BasisPolicy::AlwaysZ;
  throw ConfigError("[adversary] policy: unknown value '" + std::string(s) +
                    "' (expected random-xz, always-x, always-z)");
}

inline StateSet parse_state_set(std::string_view s) {
  if (s == "any") return StateSet::Any;
  if (s == "even") return StateSet::Even;
  if (s == "odd") return StateSet::Odd;
  throw ConfigError("[adversary] states: unknown value '" + std::string(s) + "' (expected any, even, odd)");
}

inline FakeTagMode parse_fake_tag_mode(std::string_view s) {
  if (s == "random") return FakeTagMode::Random;
  if (s == "all-zero") return FakeTagMode::AllZero;
  if (s == "chosen") return FakeTagMode::Chosen;
  throw ConfigError("[adversary] fake_tag: unknown value '" + std::string(s) +
                    "' (expected random, all-zero, chosen)");
}

}  // namespace mqka::adversary
