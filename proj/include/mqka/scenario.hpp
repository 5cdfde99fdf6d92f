#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "mqka/attack.hpp"
#include "mqka/auth.hpp"
#include "mqka/errors.hpp"
#include "mqka/protocol.hpp"

namespace mqka {

// A scenario file is sectioned key-value text:
//
//   [network]   M, N
//   [session]   n, l, r_bits, key_bytes, delta, threshold, seed, trials, mac
//   [tags]      mode = derived | injected, h1..hN
//   [inputs]    mode = random | explicit, S1.., L1.., B1.., ID1.., r1.., r0
//   [adversary] type, edges, policy, states, target, fake_tag, chosen_tag
//
// Bit strings are runs of '0'/'1'. Unknown sections and keys are errors.
struct Scenario {
  protocol::SessionConfig session;
  std::size_t trials{1};
};

namespace detail {

inline std::string unquote(std::string v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    v = v.substr(1, v.size() - 2);
  }
  return v;
}

class SectionReader {
 public:
  SectionReader(std::string section, const boost::property_tree::ptree& tree)
      : section_(std::move(section)), tree_(tree) {}

  std::string where(std::string_view key) const { return "[" + section_ + "] " + std::string(key); }

  std::optional<std::string> text(const std::string& key) {
    seen_.insert(key);
    auto child = tree_.get_child_optional(key);
    if (!child) return std::nullopt;
    return unquote(child->data());
  }

  std::string required(const std::string& key) {
    auto v = text(key);
    if (!v) throw ConfigError(where(key) + ": missing required key");
    return *v;
  }

  template <typename T>
  std::optional<T> number(const std::string& key) {
    auto v = text(key);
    if (!v) return std::nullopt;
    return parse_number<T>(key, *v);
  }

  template <typename T>
  T parse_number(const std::string& key, const std::string& v) const {
    T out{};
    const char* first = v.data();
    const char* last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) throw ConfigError(where(key) + ": invalid number '" + v + "'");
    return out;
  }

  std::optional<BitString> bits(const std::string& key) {
    auto v = text(key);
    if (!v) return std::nullopt;
    try {
      return BitString::parse(*v);
    } catch (const std::invalid_argument&) {
      throw ConfigError(where(key) + ": expected a run of '0'/'1', got '" + *v + "'");
    }
  }

  // Keys present in the file that were never asked for.
  void reject_unknown() const {
    for (const auto& [key, value] : tree_) {
      if (!seen_.count(key)) throw ConfigError(where(key) + ": unknown key");
    }
  }

 private:
  std::string section_;
  const boost::property_tree::ptree& tree_;
  std::set<std::string> seen_;
};

}  // namespace detail

inline Scenario parse_scenario(std::istream& in, const std::string& source = "<scenario>") {
  namespace pt = boost::property_tree;
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  static const std::set<std::string> known = {"network", "session", "tags", "inputs", "adversary"};
  for (const auto& [name, child] : root) {
    if (child.empty()) throw ConfigError(source + ": key '" + name + "' outside any section");
    if (!known.count(name)) throw ConfigError(source + ": unknown section [" + name + "]");
  }
  const pt::ptree empty;
  auto section = [&](const std::string& name) -> const pt::ptree& {
    auto c = root.get_child_optional(name);
    return c ? *c : empty;
  };

  Scenario sc;
  auto& cfg = sc.session;

  {
    if (!root.get_child_optional("network")) throw ConfigError("[network]: missing section");
    detail::SectionReader r("network", section("network"));
    cfg.nodes = r.parse_number<std::size_t>("M", r.required("M"));
    cfg.parties = r.parse_number<std::size_t>("N", r.required("N"));
    r.reject_unknown();
  }
  {
    if (!root.get_child_optional("session")) throw ConfigError("[session]: missing section");
    detail::SectionReader r("session", section("session"));
    cfg.states = r.parse_number<std::size_t>("n", r.required("n"));
    if (auto v = r.number<std::size_t>("l")) cfg.id_bits = *v;
    if (auto v = r.number<std::size_t>("r_bits")) cfg.random_bits = *v;
    if (auto v = r.number<std::size_t>("key_bytes")) cfg.key_bytes = *v;
    if (auto v = r.number<double>("delta")) cfg.delta = *v;
    if (auto v = r.number<double>("threshold")) cfg.threshold = *v;
    if (auto v = r.number<std::uint64_t>("seed")) cfg.seed = *v;
    if (auto v = r.number<std::size_t>("trials")) sc.trials = *v;
    if (auto v = r.text("mac")) cfg.mac = auth::parse_mac_algorithm(*v);
    r.reject_unknown();
  }
  {
    detail::SectionReader r("tags", section("tags"));
    const std::string mode = r.text("mode").value_or("derived");
    if (mode == "derived") {
      cfg.tag_mode = protocol::TagMode::Derived;
    } else if (mode == "injected") {
      cfg.tag_mode = protocol::TagMode::Injected;
      for (std::size_t i = 1; i <= cfg.parties; ++i) {
        const std::string key = "h" + std::to_string(i);
        auto v = r.bits(key);
        if (!v) throw ConfigError(r.where(key) + ": missing (injected mode needs h1..hN)");
        cfg.injected_tags.push_back({*v});
      }
    } else {
      throw ConfigError(r.where("mode") + ": unknown value '" + mode + "' (expected derived or injected)");
    }
    r.reject_unknown();
  }
  {
    detail::SectionReader r("inputs", section("inputs"));
    const std::string mode = r.text("mode").value_or("random");
    if (mode == "explicit") {
      cfg.explicit_inputs = true;
      for (std::size_t i = 1; i <= cfg.parties; ++i) {
        const std::string k = std::to_string(i);
        protocol::PartyInputs p;
        auto need = [&](const std::string& key) {
          auto v = r.bits(key);
          if (!v) throw ConfigError(r.where(key) + ": missing (explicit mode needs S, L, B for every party)");
          return *v;
        };
        p.private_input = need("S" + k);
        p.preparation_pad = need("L" + k);
        p.basis_pad = need("B" + k);
        if (auto v = r.bits("ID" + k)) p.id = *v;
        if (auto v = r.bits("r" + k)) p.r = *v;
        cfg.inputs.push_back(std::move(p));
      }
      if (auto v = r.bits("r0")) cfg.tp_random = *v;
    } else if (mode != "random") {
      throw ConfigError(r.where("mode") + ": unknown value '" + mode + "' (expected random or explicit)");
    }
    r.reject_unknown();
  }
  {
    detail::SectionReader r("adversary", section("adversary"));
    auto& adv = cfg.adversary;
    adv.kind = adversary::parse_attack_kind(r.text("type").value_or("none"));
    if (auto v = r.text("edges")) {
      if (*v == "all") {
        for (std::size_t e = 0; e <= cfg.nodes; ++e) adv.edges.push_back(e);
      } else {
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) {
          const auto b = item.find_first_not_of(" \t");
          const auto e = item.find_last_not_of(" \t");
          if (b == std::string::npos) throw ConfigError(r.where("edges") + ": empty edge in list '" + *v + "'");
          adv.edges.push_back(r.parse_number<std::size_t>("edges", item.substr(b, e - b + 1)));
        }
      }
    }
    if (auto v = r.text("policy")) adv.policy = adversary::parse_basis_policy(*v);
    if (auto v = r.text("states")) adv.target_set = adversary::parse_state_set(*v);
    if (auto v = r.number<std::size_t>("target")) adv.target = *v;
    if (auto v = r.text("fake_tag")) adv.fake_tag_mode = adversary::parse_fake_tag_mode(*v);
    if (auto v = r.bits("chosen_tag")) adv.chosen_tag = *v;
    r.reject_unknown();
  }

  if (sc.trials < 1) throw ConfigError("[session] trials: must be at least 1");
  protocol::validate_config(cfg);
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  return parse_scenario(in, path);
}

}  // namespace mqka
