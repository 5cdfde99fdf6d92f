#pragma once

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mqka/bits.hpp"
#include "mqka/errors.hpp"
#include "mqka/rng.hpp"

namespace mqka::auth {

enum class MacAlgorithm { HmacSha256, HmacSha512 };

inline std::string to_string(MacAlgorithm a) {
  return a == MacAlgorithm::HmacSha256 ? "hmac-sha256" : "hmac-sha512";
}

inline MacAlgorithm parse_mac_algorithm(std::string_view name) {
  if (name == "hmac-sha256") return MacAlgorithm::HmacSha256;
  if (name == "hmac-sha512") return MacAlgorithm::HmacSha512;
  throw ConfigError("unknown MAC algorithm '" + std::string(name) + "' (expected hmac-sha256 or hmac-sha512)");
}

// Secret shared between one user and the third party.
struct MasterKey {
  std::vector<std::uint8_t> bytes;

  static MasterKey random(std::size_t length, Rng& rng) {
    MasterKey k;
    k.bytes.resize(length);
    for (auto& b : k.bytes) b = static_cast<std::uint8_t>(rng.next() >> 56);
    return k;
  }

  friend bool operator==(const MasterKey&, const MasterKey&) = default;
};

// n-bit tag; bit t governs the identity encoding of the t-th carrier.
struct IdentityTag {
  BitString bits;

  std::size_t size() const { return bits.size(); }
  Bit operator[](std::size_t t) const { return bits[t]; }

  friend bool operator==(const IdentityTag&, const IdentityTag&) = default;
};

enum class IdentityOpChoice { SingleU00, DoubleU01U10 };

namespace detail {

inline const EVP_MD* digest(MacAlgorithm a) {
  return a == MacAlgorithm::HmacSha256 ? EVP_sha256() : EVP_sha512();
}

inline std::vector<std::uint8_t> hmac(MacAlgorithm alg, const MasterKey& key, const std::string& message) {
  std::vector<std::uint8_t> out(EVP_MAX_MD_SIZE);
  unsigned int len = 0;
  const unsigned char* ok =
      HMAC(digest(alg), key.bytes.data(), static_cast<int>(key.bytes.size()),
           reinterpret_cast<const unsigned char*>(message.data()), message.size(), out.data(), &len);
  if (ok == nullptr) throw std::runtime_error("HMAC computation failed");
  out.resize(len);
  return out;
}

}  // namespace detail

// h = f_k(ID || r_user || r_tp), truncated to n bits (MSB first). Blocks past
// the first MAC output are HMAC(k, message || be32(counter)), counter = 1, 2, ...
inline IdentityTag derive_tag(const MasterKey& key, const BitString& id, const BitString& r_user,
                              const BitString& r_tp, std::size_t n,
                              MacAlgorithm alg = MacAlgorithm::HmacSha256) {
  if (n == 0) throw ConfigError("tag length n must be at least 1");
  if (r_user.empty() || r_tp.empty()) throw ConfigError("session random strings must be nonempty");

  const std::string message = id.to_string() + r_user.to_string() + r_tp.to_string();
  IdentityTag tag{BitString(n)};
  std::size_t produced = 0;
  for (std::uint32_t counter = 0; produced < n; ++counter) {
    std::string block_message = message;
    if (counter > 0) {
      for (int shift = 24; shift >= 0; shift -= 8) block_message.push_back(static_cast<char>((counter >> shift) & 0xFF));
    }
    for (std::uint8_t byte : detail::hmac(alg, key, block_message)) {
      for (int bit = 7; bit >= 0 && produced < n; --bit) tag.bits.set(produced++, static_cast<Bit>((byte >> bit) & 1u));
      if (produced == n) break;
    }
  }
  return tag;
}

// Third party's tag: bitwise XOR of all user tags.
inline IdentityTag aggregate_tags(std::span<const IdentityTag> tags) {
  if (tags.size() < 2) throw ConfigError("aggregate_tags needs at least two tags");
  IdentityTag out = tags.front();
  for (std::size_t i = 1; i < tags.size(); ++i) {
    if (tags[i].size() != out.size()) {
      throw ConfigError("identity tag length mismatch: " + std::to_string(tags[i].size()) + " vs " +
                        std::to_string(out.size()));
    }
    out.bits ^= tags[i].bits;
  }
  return out;
}

inline IdentityOpChoice select_identity_op(Bit h_bit, Bit b_bit) {
  return ((h_bit ^ b_bit) & 1u) == 0 ? IdentityOpChoice::SingleU00 : IdentityOpChoice::DoubleU01U10;
}

inline const char* to_string(IdentityOpChoice c) {
  return c == IdentityOpChoice::SingleU00 ? "U00" : "U01U10";
}

}  // namespace mqka::auth
