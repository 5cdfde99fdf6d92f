#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mqka {

using Bit = std::uint8_t;

struct BitPair {
  Bit first{0};
  Bit second{0};

  friend bool operator==(const BitPair&, const BitPair&) = default;

  BitPair operator^(const BitPair& o) const {
    return {static_cast<Bit>(first ^ o.first), static_cast<Bit>(second ^ o.second)};
  }

  // Basis label index ab -> 2a + b.
  std::size_t index() const { return 2u * first + second; }

  static BitPair from_index(std::size_t k) {
    return {static_cast<Bit>((k >> 1) & 1u), static_cast<Bit>(k & 1u)};
  }
};

// Fixed-length bit sequence used for keys, pads, tags and identities.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t n) : bits_(n, 0) {}
  explicit BitString(std::vector<Bit> bits) : bits_(std::move(bits)) {
    for (Bit b : bits_) {
      if (b > 1) throw std::invalid_argument("bit value out of range");
    }
  }

  // Parses a run of ASCII '0'/'1'.
  static BitString parse(std::string_view text) {
    BitString out;
    out.bits_.reserve(text.size());
    for (char c : text) {
      if (c == '0' || c == '1') {
        out.bits_.push_back(static_cast<Bit>(c - '0'));
      } else {
        throw std::invalid_argument("invalid character in bit string: '" + std::string(text) + "'");
      }
    }
    return out;
  }

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  Bit operator[](std::size_t i) const { return bits_[i]; }
  Bit at(std::size_t i) const { return bits_.at(i); }
  void set(std::size_t i, Bit b) { bits_.at(i) = static_cast<Bit>(b & 1u); }
  void push_back(Bit b) { bits_.push_back(static_cast<Bit>(b & 1u)); }

  // Two-bit block t, i.e. bits (2t, 2t+1).
  BitPair pair(std::size_t t) const { return {bits_.at(2 * t), bits_.at(2 * t + 1)}; }
  void set_pair(std::size_t t, BitPair p) {
    set(2 * t, p.first);
    set(2 * t + 1, p.second);
  }

  // Bits at even (0-based) positions, i.e. b_{1}, b_{3}, ... in 1-based notation.
  BitString odd_positions() const {
    BitString out;
    for (std::size_t i = 0; i < bits_.size(); i += 2) out.bits_.push_back(bits_[i]);
    return out;
  }

  BitString& operator^=(const BitString& o) {
    if (o.size() != size()) throw std::invalid_argument("bit string length mismatch in xor");
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] ^= o.bits_[i];
    return *this;
  }

  friend BitString operator^(BitString a, const BitString& b) { return a ^= b; }

  BitString complement() const {
    BitString out = *this;
    for (auto& b : out.bits_) b ^= 1u;
    return out;
  }

  std::size_t hamming_distance(const BitString& o) const {
    if (o.size() != size()) throw std::invalid_argument("bit string length mismatch");
    std::size_t d = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i) d += bits_[i] != o.bits_[i];
    return d;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (Bit b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
  }

  const std::vector<Bit>& bits() const { return bits_; }

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<Bit> bits_;
};

}  // namespace mqka
