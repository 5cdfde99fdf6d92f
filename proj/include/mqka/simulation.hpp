#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "mqka/adversary.hpp"
#include "mqka/protocol.hpp"
#include "mqka/rng.hpp"

namespace mqka {

struct RunReport {
  std::uint64_t seed{0};
  protocol::SessionConfig config;
  BitString tp_tag;
  BitString basis_parity;
  std::vector<BitString> selector_rows;  // entry 0 is the third party
  std::vector<std::size_t> publication_order;
  std::vector<BitString> keys;
  BitString expected_key;
  bool agreement{false};
  bool basis_deterministic{false};
  protocol::DetectionReport detection;
  protocol::EfficiencyAccounting efficiency;
  std::size_t state_hops{0};  // two-qubit carrier transmissions actually simulated
  std::size_t qubit_hops{0};
  adversary::AttackStats adversary;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

// Runs one full session from cfg.seed. `extra_hook`, when given, sees every
// hop after the configured adversary.
inline RunReport simulate_session(const protocol::SessionConfig& cfg, protocol::HopHook* extra_hook = nullptr) {
  using namespace protocol;
  Rng rng(cfg.seed);
  SessionState s = init_session(cfg, rng);

  const auto& adv = cfg.adversary;
  std::unique_ptr<adversary::InterceptResendHook> eve;
  switch (adv.kind) {
    case adversary::AttackKind::None: break;
    case adversary::AttackKind::InterceptResend:
      eve = std::make_unique<adversary::InterceptResendHook>(adv.edges, adv.policy, adv.target_set);
      break;
    case adversary::AttackKind::ImpersonateUser:
      adversary::impersonation_scenario(s, adv.target, adv.fake_tag_mode, adv.chosen_tag, rng);
      break;
    case adversary::AttackKind::ForgedTpTag:
      adversary::forged_tp_tag_scenario(s, adv.fake_tag_mode, adv.chosen_tag, rng);
      break;
  }

  struct Chain : HopHook {
    HopHook* first{nullptr};
    HopHook* second{nullptr};
    HopOutcome on_hop(const HopContext& ctx, TravellingSequence& seq, Rng& r) override {
      if (first && first->on_hop(ctx, seq, r) == HopOutcome::Lost) return HopOutcome::Lost;
      if (second && second->on_hop(ctx, seq, r) == HopOutcome::Lost) return HopOutcome::Lost;
      return HopOutcome::Delivered;
    }
  } chain;
  chain.first = eve.get();
  chain.second = extra_hook;
  run_ring_pass(s, rng, (chain.first || chain.second) ? &chain : nullptr);

  RunReport r;
  r.seed = cfg.seed;
  r.config = cfg;
  r.tp_tag = s.tp_tag.bits;
  for (std::size_t node = 0; node <= cfg.parties; ++node) r.selector_rows.push_back(selector_row(s, node));

  publish_bases(s, rng);
  r.publication_order = s.publication_order;
  r.basis_parity = basis_parity(s);

  r.basis_deterministic = true;
  for (std::size_t i = 1; i <= cfg.parties; ++i) {
    const KeyExtraction ex = extract_key_traced(s, i, rng);
    r.keys.push_back(ex.key);
    for (const auto& d : ex.trace) r.basis_deterministic &= d.outcome_probability >= 1.0 - qstate::kTolerance;
  }
  r.expected_key = xor_of_private_inputs(s);
  r.agreement = std::all_of(r.keys.begin(), r.keys.end(), [&](const BitString& k) { return k == r.keys.front(); });

  r.detection = detect_eavesdropping(s, rng);
  r.efficiency = efficiency_accounting(cfg.parties, cfg.delta, cfg.states);
  r.state_hops = cfg.parties * cfg.states * (cfg.nodes + 1);
  r.qubit_hops = 2 * r.state_hops;

  switch (adv.kind) {
    case adversary::AttackKind::None: break;
    case adversary::AttackKind::InterceptResend: r.adversary = adversary::intercept_stats(s, eve->observations()); break;
    case adversary::AttackKind::ImpersonateUser:
      r.adversary = adversary::forgery_stats(s, adv.kind, adv.target);
      break;
    case adversary::AttackKind::ForgedTpTag: r.adversary = adversary::forgery_stats(s, adv.kind, 0); break;
  }
  r.adversary.kind = adv.kind;
  return r;
}

struct Interval {
  double low{0.0};
  double high{0.0};
};

// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::size_t successes, std::size_t total, double z = 1.96) {
  if (total == 0) return {0.0, 1.0};
  const double n = static_cast<double>(total);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct BatchSummary {
  std::size_t trials{0};
  std::size_t agreements{0};
  std::size_t aborts{0};
  std::size_t deterministic_runs{0};
  double agreement_rate{0.0};
  double abort_rate{0.0};
  Interval abort_rate_ci;
  double mean_error_rate{0.0};
  double error_rate_stderr{0.0};
  double mean_block_error_rate{0.0};
  std::size_t attacked_blocks{0};
  std::size_t erroneous_blocks{0};
  double induced_block_error_rate{0.0};
  Interval induced_block_error_ci;
  std::size_t attacked_even{0};
  std::size_t erroneous_even{0};
  std::size_t attacked_odd{0};
  std::size_t erroneous_odd{0};
  std::size_t eve_observations{0};
  std::size_t eve_correct_blocks{0};
};

struct BatchReport {
  protocol::SessionConfig config;
  std::uint64_t seed{0};
  BatchSummary summary;
  std::vector<RunReport> runs;  // kept only when requested
};

inline protocol::SessionConfig trial_config(const protocol::SessionConfig& cfg, std::size_t trial) {
  protocol::SessionConfig c = cfg;
  c.seed = derive_seed(cfg.seed, trial);
  return c;
}

inline BatchSummary summarize(const std::vector<RunReport>& runs) {
  BatchSummary s;
  s.trials = runs.size();
  double err_sum = 0.0, err_sq = 0.0, block_sum = 0.0;
  for (const auto& r : runs) {
    s.agreements += r.agreement;
    s.aborts += r.detection.aborted;
    s.deterministic_runs += r.basis_deterministic;
    err_sum += r.detection.error_rate;
    err_sq += r.detection.error_rate * r.detection.error_rate;
    block_sum += r.detection.block_error_rate;
    s.attacked_blocks += r.adversary.attacked_blocks;
    s.erroneous_blocks += r.adversary.erroneous_blocks;
    s.attacked_even += r.adversary.attacked_even;
    s.erroneous_even += r.adversary.erroneous_even;
    s.attacked_odd += r.adversary.attacked_odd;
    s.erroneous_odd += r.adversary.erroneous_odd;
    s.eve_observations += r.adversary.eve_observations;
    s.eve_correct_blocks += r.adversary.eve_correct_blocks;
  }
  if (s.trials > 0) {
    const double n = static_cast<double>(s.trials);
    s.agreement_rate = static_cast<double>(s.agreements) / n;
    s.abort_rate = static_cast<double>(s.aborts) / n;
    s.mean_error_rate = err_sum / n;
    s.mean_block_error_rate = block_sum / n;
    if (s.trials > 1) {
      const double var = std::max(0.0, (err_sq - n * s.mean_error_rate * s.mean_error_rate) / (n - 1.0));
      s.error_rate_stderr = std::sqrt(var / n);
    }
  }
  s.abort_rate_ci = wilson_interval(s.aborts, s.trials);
  if (s.attacked_blocks > 0) {
    s.induced_block_error_rate = static_cast<double>(s.erroneous_blocks) / static_cast<double>(s.attacked_blocks);
  }
  s.induced_block_error_ci = wilson_interval(s.erroneous_blocks, s.attacked_blocks);
  return s;
}

// Trial k runs from derive_seed(cfg.seed, k). Output is ordered by trial
// index and independent of `threads`.
inline BatchReport run_batch(const protocol::SessionConfig& cfg, std::size_t trials, std::size_t threads = 1,
                             bool keep_runs = false) {
  protocol::validate_config(cfg);
  std::vector<RunReport> runs(trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t k = next++; k < trials; k = next++) {
      try {
        runs[k] = simulate_session(trial_config(cfg, k));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = trials;
      }
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, trials));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  BatchReport out;
  out.config = cfg;
  out.seed = cfg.seed;
  out.summary = summarize(runs);
  if (keep_runs) out.runs = std::move(runs);
  return out;
}

}  // namespace mqka
