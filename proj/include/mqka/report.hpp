#pragma once

#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "mqka/simulation.hpp"

namespace mqka {

using Json = nlohmann::ordered_json;

inline constexpr const char* kRunSchema = "mqka.run/1";
inline constexpr const char* kBatchSchema = "mqka.batch/1";

inline Json bit_list_json(const std::vector<BitString>& v) {
  Json out = Json::array();
  for (const auto& b : v) out.push_back(b.to_string());
  return out;
}

inline Json config_json(const protocol::SessionConfig& cfg) {
  Json j;
  j["network"] = {{"M", cfg.nodes}, {"N", cfg.parties}};
  j["session"] = {{"n", cfg.states},           {"l", cfg.id_bits},         {"r_bits", cfg.random_bits},
                  {"key_bytes", cfg.key_bytes}, {"delta", cfg.delta},       {"threshold", cfg.threshold},
                  {"seed", cfg.seed},           {"mac", auth::to_string(cfg.mac)}};

  Json tags;
  tags["mode"] = cfg.tag_mode == protocol::TagMode::Injected ? "injected" : "derived";
  if (cfg.tag_mode == protocol::TagMode::Injected) {
    Json values = Json::array();
    for (const auto& t : cfg.injected_tags) values.push_back(t.bits.to_string());
    tags["values"] = values;
  }
  j["tags"] = tags;

  Json inputs;
  inputs["mode"] = cfg.explicit_inputs ? "explicit" : "random";
  if (cfg.explicit_inputs) {
    Json parties = Json::array();
    for (const auto& p : cfg.inputs) {
      parties.push_back({{"ID", p.id.to_string()},
                         {"r", p.r.to_string()},
                         {"S", p.private_input.to_string()},
                         {"L", p.preparation_pad.to_string()},
                         {"B", p.basis_pad.to_string()}});
    }
    inputs["parties"] = parties;
    inputs["r0"] = cfg.tp_random.to_string();
  }
  j["inputs"] = inputs;

  const auto& adv = cfg.adversary;
  j["adversary"] = {{"type", adversary::to_string(adv.kind)},
                    {"edges", adv.edges},
                    {"policy", adversary::to_string(adv.policy)},
                    {"states", adversary::to_string(adv.target_set)},
                    {"target", adv.target},
                    {"fake_tag", adversary::to_string(adv.fake_tag_mode)},
                    {"chosen_tag", adv.chosen_tag.to_string()}};
  return j;
}

inline Json detection_json(const protocol::DetectionReport& d) {
  return {{"samples", d.samples},
          {"bit_comparisons", d.bit_comparisons},
          {"bit_disagreements", d.bit_disagreements},
          {"error_rate", d.error_rate},
          {"block_comparisons", d.block_comparisons},
          {"block_disagreements", d.block_disagreements},
          {"block_error_rate", d.block_error_rate},
          {"per_party_error_rate", d.per_party_error_rate},
          {"aborted", d.aborted}};
}

inline Json attack_json(const adversary::AttackStats& a) {
  return {{"type", adversary::to_string(a.kind)},
          {"attacked_blocks", a.attacked_blocks},
          {"erroneous_blocks", a.erroneous_blocks},
          {"block_error_rate", a.block_error_rate()},
          {"attacked_even", a.attacked_even},
          {"erroneous_even", a.erroneous_even},
          {"attacked_odd", a.attacked_odd},
          {"erroneous_odd", a.erroneous_odd},
          {"forged_positions", a.forged_positions},
          {"eve_observations", a.eve_observations},
          {"eve_correct_blocks", a.eve_correct_blocks},
          {"eve_information_proxy", a.eve_information_proxy()}};
}

inline Json run_json(const RunReport& r, bool with_config = true) {
  Json j;
  j["schema"] = kRunSchema;
  j["seed"] = r.seed;
  if (with_config) j["config"] = config_json(r.config);
  j["tp_tag"] = r.tp_tag.to_string();
  j["selector_rows"] = bit_list_json(r.selector_rows);
  j["basis_parity"] = r.basis_parity.to_string();
  j["publication_order"] = r.publication_order;
  j["keys"] = bit_list_json(r.keys);
  j["expected_key"] = r.expected_key.to_string();
  j["agreement"] = r.agreement;
  j["basis_deterministic"] = r.basis_deterministic;
  j["detection"] = detection_json(r.detection);
  j["session_key"] = r.detection.session_key.to_string();
  j["efficiency"] = {{"eta", r.efficiency.eta},
                     {"c", r.efficiency.key_bits},
                     {"q", r.efficiency.qubits},
                     {"b", r.efficiency.classical_bits},
                     {"two_qubit_state_hops", r.state_hops},
                     {"qubit_hops", r.qubit_hops}};
  j["adversary"] = attack_json(r.adversary);
  return j;
}

inline Json interval_json(const Interval& i) { return Json::array({i.low, i.high}); }

inline Json summary_json(const BatchSummary& s) {
  return {{"trials", s.trials},
          {"agreements", s.agreements},
          {"agreement_rate", s.agreement_rate},
          {"aborts", s.aborts},
          {"abort_rate", s.abort_rate},
          {"abort_rate_ci95", interval_json(s.abort_rate_ci)},
          {"deterministic_runs", s.deterministic_runs},
          {"mean_error_rate", s.mean_error_rate},
          {"error_rate_stderr", s.error_rate_stderr},
          {"mean_block_error_rate", s.mean_block_error_rate},
          {"attacked_blocks", s.attacked_blocks},
          {"erroneous_blocks", s.erroneous_blocks},
          {"induced_block_error_rate", s.induced_block_error_rate},
          {"induced_block_error_ci95", interval_json(s.induced_block_error_ci)},
          {"attacked_even", s.attacked_even},
          {"erroneous_even", s.erroneous_even},
          {"attacked_odd", s.attacked_odd},
          {"erroneous_odd", s.erroneous_odd},
          {"eve_observations", s.eve_observations},
          {"eve_correct_blocks", s.eve_correct_blocks}};
}

inline Json batch_json(const BatchReport& b) {
  Json j;
  j["schema"] = kBatchSchema;
  j["seed"] = b.seed;
  j["trial_seed_scheme"] = "derive_seed(seed, k) = splitmix64(splitmix64(seed) ^ splitmix64(k + 0x632BE59BD9B4E019))";
  j["config"] = config_json(b.config);
  j["summary"] = summary_json(b.summary);
  if (!b.runs.empty()) {
    Json trials = Json::array();
    for (const auto& r : b.runs) trials.push_back(run_json(r, false));
    j["trials"] = trials;
  }
  return j;
}

inline std::string summary_csv(const BatchReport& b) {
  const auto& s = b.summary;
  std::ostringstream out;
  out.precision(17);
  out << "seed,trials,agreement_rate,abort_rate,mean_error_rate,mean_block_error_rate,attacked_blocks,"
         "erroneous_blocks,induced_block_error_rate,ci_low,ci_high\n";
  out << b.seed << ',' << s.trials << ',' << s.agreement_rate << ',' << s.abort_rate << ',' << s.mean_error_rate
      << ',' << s.mean_block_error_rate << ',' << s.attacked_blocks << ',' << s.erroneous_blocks << ','
      << s.induced_block_error_rate << ',' << s.induced_block_error_ci.low << ',' << s.induced_block_error_ci.high
      << '\n';
  return out.str();
}

}  // namespace mqka
