#pragma once

#include <string>
#include <vector>

#include "mqka/protocol.hpp"
#include "mqka/rng.hpp"

namespace mqka {

// Three users on a five-node ring, n = 4, with published example values and
// injected tags (the example's hash function is unspecified).
inline protocol::SessionConfig worked_example_config() {
  protocol::SessionConfig cfg;
  cfg.nodes = 5;
  cfg.parties = 3;
  cfg.states = 4;
  cfg.id_bits = 6;
  cfg.random_bits = 4;
  cfg.delta = 0.0;
  cfg.threshold = 0.0;
  cfg.seed = 0;
  cfg.tag_mode = protocol::TagMode::Injected;
  cfg.injected_tags = {{BitString::parse("0111")}, {BitString::parse("1010")}, {BitString::parse("0101")}};
  cfg.explicit_inputs = true;
  const auto party = [](const char* id, const char* r, const char* s, const char* l, const char* b) {
    return protocol::PartyInputs{BitString::parse(id), BitString::parse(r), BitString::parse(s), BitString::parse(l),
                                 BitString::parse(b)};
  };
  cfg.inputs = {
      party("010110", "1100", "01101011", "10001101", "00100100"),
      party("001101", "1111", "01000100", "00110110", "10110010"),
      party("100011", "0010", "10110001", "01101100", "11011110"),
  };
  return cfg;
}

inline const BitString& worked_example_key() {
  static const BitString key = BitString::parse("10011110");
  return key;
}

struct ExampleTrace {
  protocol::SessionState session;
  BitString tp_tag;
  std::vector<BitString> selector_rows;  // entry 0 is the third party
  BitString parity;
  std::vector<BitString> keys;
  std::vector<std::vector<protocol::PositionDecode>> decodes;
};

inline ExampleTrace replay_worked_example() {
  using namespace protocol;
  const SessionConfig cfg = worked_example_config();
  Rng rng(cfg.seed);
  ExampleTrace tr;
  tr.session = init_session(cfg, rng);
  auto& s = tr.session;
  tr.tp_tag = s.tp_tag.bits;
  for (std::size_t node = 0; node <= cfg.parties; ++node) tr.selector_rows.push_back(selector_row(s, node));
  run_ring_pass(s, rng);
  publish_bases(s, rng);
  tr.parity = basis_parity(s);
  for (std::size_t i = 1; i <= cfg.parties; ++i) {
    auto ex = extract_key_traced(s, i, rng);
    tr.keys.push_back(ex.key);
    tr.decodes.push_back(ex.trace);
  }
  return tr;
}

}  // namespace mqka
