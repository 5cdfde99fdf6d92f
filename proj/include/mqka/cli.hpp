#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "mqka/adversary.hpp"
#include "mqka/report.hpp"
#include "mqka/scenario.hpp"
#include "mqka/simulation.hpp"
#include "mqka/worked_example.hpp"

namespace mqka::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file '" + path + "'");
  f << text;
}

}  // namespace detail

struct RunOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string out_path;
  std::string csv_path;
  bool per_trial{false};
  std::size_t threads{1};
};

// Detection aborts are outcomes, not failures; only config/transport errors
// make this nonzero.
inline int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    Scenario sc = load_scenario(opt.config_path);
    if (opt.seed) sc.session.seed = *opt.seed;
    if (opt.trials) sc.trials = *opt.trials;
    if (sc.trials < 1) throw ConfigError("--trials must be at least 1");
    const BatchReport report = run_batch(sc.session, sc.trials, opt.threads, opt.per_trial);
    detail::write_output(opt.out_path, batch_json(report).dump(2) + "\n", out);
    if (!opt.csv_path.empty()) detail::write_output(opt.csv_path, summary_csv(report), out);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TransportError& e) {
    err << "transport error: " << e.what() << "\n";
    return kExitFailed;
  }
}

inline int cmd_replay_example(const std::string& out_path, std::ostream& out, std::ostream& err) {
  const ExampleTrace tr = replay_worked_example();
  const auto& s = tr.session;
  const std::size_t n = s.config.states;

  out << "worked example: N=" << s.config.parties << " M=" << s.config.nodes << " n=" << n << "\n";
  for (std::size_t i = 1; i <= s.config.parties; ++i) {
    const auto& p = s.party(i);
    out << "P" << i << ": S=" << p.private_input.to_string() << " L=" << p.preparation_pad.to_string()
        << " B=" << p.basis_pad.to_string() << " h=" << p.tag.bits.to_string() << "\n";
  }
  for (std::size_t i = 1; i <= s.config.parties; ++i) {
    out << "selector P" << i << " (b xor h, 1 = U01U10): " << tr.selector_rows[i].to_string() << "\n";
  }
  out << "h0 = " << tr.tp_tag.to_string() << "  (selector P0: " << tr.selector_rows[0].to_string() << ")\n";
  out << "C  = " << tr.parity.to_string() << "\n";
  for (std::size_t i = 1; i <= s.config.parties; ++i) {
    out << "P" << i << " decode:";
    for (std::size_t t = 0; t < n; ++t) {
      const auto& d = tr.decodes[i - 1][t];
      const auto l = s.party(i).preparation_pad.pair(t);
      out << "  t" << (t + 1) << ":"
          << (d.basis == qstate::Basis::X ? std::string("MB_X")
                                          : "V" + std::to_string(l.first) + std::to_string(l.second) + "+MB_Z")
          << " w=" << int(d.outcome.first) << int(d.outcome.second) << " k=" << int(d.key_block.first)
          << int(d.key_block.second);
    }
    out << "\n";
  }
  for (std::size_t i = 0; i < tr.keys.size(); ++i) out << "K" << (i + 1) << " = " << tr.keys[i].to_string() << "\n";

  const BitString& golden = worked_example_key();
  const BitString xor_s = protocol::xor_of_private_inputs(s);
  bool ok = xor_s == golden;
  if (!ok) err << "S1^S2^S3 = " << xor_s.to_string() << " differs from " << golden.to_string() << "\n";
  for (std::size_t i = 0; i < tr.keys.size(); ++i) {
    if (tr.keys[i] == golden) continue;
    ok = false;
    err << "K" << (i + 1) << " mismatch at positions:";
    for (std::size_t k = 0; k < golden.size(); ++k) {
      if (tr.keys[i][k] != golden[k]) err << " " << (k + 1) << "(got " << int(tr.keys[i][k]) << ")";
    }
    err << "\n";
  }
  out << (ok ? "verified: K1 = K2 = K3 = " : "NOT verified, expected ") << golden.to_string() << "\n";

  if (!out_path.empty()) {
    Json j;
    j["schema"] = "mqka.example/1";
    j["tp_tag"] = tr.tp_tag.to_string();
    j["selector_rows"] = bit_list_json(tr.selector_rows);
    j["basis_parity"] = tr.parity.to_string();
    Json decodes = Json::array();
    for (const auto& per_party : tr.decodes) {
      Json row = Json::array();
      for (const auto& d : per_party) {
        row.push_back({{"parity", d.parity},
                       {"basis", qstate::to_string(d.basis)},
                       {"outcome", std::to_string(d.outcome.first) + std::to_string(d.outcome.second)},
                       {"probability", d.outcome_probability},
                       {"key_block", std::to_string(d.key_block.first) + std::to_string(d.key_block.second)}});
      }
      decodes.push_back(row);
    }
    j["decodes"] = decodes;
    j["keys"] = bit_list_json(tr.keys);
    j["expected_key"] = golden.to_string();
    j["verified"] = ok;
    try {
      detail::write_output(out_path, j.dump(2) + "\n", out);
    } catch (const ConfigError& e) {
      err << e.what() << "\n";
      return kExitUsage;
    }
  }
  return ok ? kExitOk : kExitFailed;
}

inline int cmd_usd_check(std::size_t dim, std::size_t families, std::uint64_t seed, std::ostream& out,
                         std::ostream& err) {
  if (dim < 1) {
    err << "usd-check: --dim must be at least 1\n";
    return kExitUsage;
  }
  if (families == 0) {
    err << "warning: no families requested; nothing to check\n";
    out << "families: 0\nall infeasible: yes (vacuous)\n";
    return kExitOk;
  }
  Rng rng(seed);
  std::map<std::size_t, std::size_t> histogram;
  double max_residual = 0.0;
  std::size_t feasible = 0;
  for (std::size_t k = 0; k < families; ++k) {
    const auto check = adversary::check_usd_feasible(adversary::random_ancilla_family(dim, rng));
    ++histogram[check.rank];
    feasible += check.feasible;
    for (double r : check.residuals) max_residual = std::max(max_residual, r);
  }
  out << "families: " << families << "  ancilla dimension: " << dim << "\n";
  out << "rank histogram:";
  for (const auto& [rank, count] : histogram) out << "  rank " << rank << ": " << count;
  out << "\n";
  out << std::scientific << std::setprecision(3) << "max residual: " << max_residual << "\n" << std::defaultfloat;
  const bool ok = feasible == 0 && max_residual < 1e-10;
  out << "all infeasible: " << (feasible == 0 ? "yes" : "no") << "\n";
  return ok ? kExitOk : kExitFailed;
}

inline int cmd_efficiency(std::size_t parties, double delta, std::size_t states, std::ostream& out,
                          std::ostream& err) {
  try {
    if (states < 1) throw ConfigError("efficiency: --states must be at least 1");
    const auto a = protocol::efficiency_accounting(parties, delta, states);
    out << std::fixed << std::setprecision(4) << "eta = " << a.eta << "\n" << std::defaultfloat;
    out << "c = (2 - delta) n = " << a.key_bits << "\n";
    out << "q = n N = " << a.qubits << "\n";
    out << "b = 2 n N = " << a.classical_bits << "\n";
    out << "(n = " << states << ", N = " << parties << ", delta = " << delta << ")\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace mqka::cli
