#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mqka/cli.hpp"
#include "mqka/report.hpp"
#include "mqka/scenario.hpp"

using namespace mqka;

namespace {

const std::string kScenarioDir = MQKA_SCENARIO_DIR;

Scenario parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in, "test.ini");
}

void expect_config_error(const std::string& text, const std::string& fragment) {
  try {
    parse(text);
    ADD_FAILURE() << "accepted scenario, expected error mentioning '" << fragment << "'";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

const char* kMinimal = "[network]\nM = 4\nN = 3\n[session]\nn = 8\n";

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("mqka_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Scenario, MinimalDefaults) {
  const auto sc = parse(kMinimal);
  EXPECT_EQ(sc.session.nodes, 4u);
  EXPECT_EQ(sc.session.parties, 3u);
  EXPECT_EQ(sc.session.states, 8u);
  EXPECT_EQ(sc.trials, 1u);
  EXPECT_EQ(sc.session.tag_mode, protocol::TagMode::Derived);
  EXPECT_EQ(sc.session.adversary.kind, adversary::AttackKind::None);
}

TEST(Scenario, WorkedExampleFileMatchesEmbeddedConfig) {
  const auto sc = load_scenario(kScenarioDir + "/worked_example.ini");
  const auto embedded = worked_example_config();
  EXPECT_EQ(sc.session.inputs, embedded.inputs);
  EXPECT_EQ(sc.session.injected_tags, embedded.injected_tags);
  const auto r = simulate_session(sc.session);
  for (const auto& k : r.keys) EXPECT_EQ(k.to_string(), "10011110");
}

TEST(Scenario, AllSampleFilesParse) {
  for (const auto& entry : std::filesystem::directory_iterator(kScenarioDir)) {
    EXPECT_NO_THROW(load_scenario(entry.path().string())) << entry.path();
  }
}

TEST(Scenario, AdversaryFields) {
  const auto sc = parse(std::string(kMinimal) +
                        "[adversary]\ntype = intercept-resend\nedges = 0, 2,4\npolicy = always-z\nstates = odd\n");
  const auto& adv = sc.session.adversary;
  EXPECT_EQ(adv.kind, adversary::AttackKind::InterceptResend);
  EXPECT_EQ(adv.edges, (std::vector<std::size_t>{0, 2, 4}));
  EXPECT_EQ(adv.policy, adversary::BasisPolicy::AlwaysZ);
  EXPECT_EQ(adv.target_set, adversary::StateSet::Odd);
  const auto all = parse(std::string(kMinimal) + "[adversary]\ntype = intercept-resend\nedges = all\n");
  EXPECT_EQ(all.session.adversary.edges.size(), 5u);
}

TEST(Scenario, ErrorsNameSectionAndKey) {
  expect_config_error(std::string(kMinimal) + "bogus = 1\n", "[session] bogus");
  expect_config_error(std::string(kMinimal) + "[extras]\nx = 1\n", "[extras]");
  expect_config_error("[network]\nM = 4\n[session]\nn = 8\n", "[network] N");
  expect_config_error("[network]\nM = 4\nN = 3\n", "[session]");
  expect_config_error("[network]\nM = four\nN = 3\n[session]\nn = 8\n", "[network] M");
  expect_config_error(std::string(kMinimal) + "delta = 0.5x\n", "[session] delta");
  expect_config_error(std::string(kMinimal) + "delta = 1.5\n", "[session] delta");
  expect_config_error(std::string(kMinimal) + "[tags]\nmode = injected\nh1 = 01010101\nh2 = 0101010x\nh3 = 00000000\n",
                      "[tags] h2");
  expect_config_error(std::string(kMinimal) + "[tags]\nmode = injected\nh1 = 01010101\n", "[tags] h2");
  expect_config_error(std::string(kMinimal) + "[inputs]\nmode = explicit\n", "[inputs] S1");
  expect_config_error(std::string(kMinimal) + "[adversary]\ntype = laser\n", "laser");
  expect_config_error(std::string(kMinimal) + "[adversary]\ntype = intercept-resend\nedges = 9\n", "[adversary] edges");
  expect_config_error(std::string(kMinimal) + "[session]\nn = 9\n", "duplicate");
  expect_config_error(std::string(kMinimal) + "trials = 0\n", "[session] trials");
}

TEST(Report, RunJsonIsDeterministic) {
  protocol::SessionConfig cfg;
  cfg.states = 16;
  cfg.delta = 0.5;
  cfg.seed = 99;
  const std::string a = run_json(simulate_session(cfg)).dump();
  const std::string b = run_json(simulate_session(cfg)).dump();
  EXPECT_EQ(a, b);
  const auto j = Json::parse(a);
  EXPECT_EQ(j["schema"], "mqka.run/1");
  EXPECT_EQ(j["agreement"], true);
  EXPECT_EQ(j["keys"].size(), 3u);
}

TEST(Report, BatchIndependentOfThreadCount) {
  protocol::SessionConfig cfg;
  cfg.states = 32;
  cfg.delta = 0.5;
  cfg.seed = 5;
  cfg.adversary.kind = adversary::AttackKind::InterceptResend;
  cfg.adversary.edges = {1, 2};
  const std::string one = batch_json(run_batch(cfg, 40, 1, true)).dump();
  const std::string many = batch_json(run_batch(cfg, 40, 6, true)).dump();
  EXPECT_EQ(one, many);
}

TEST(Report, BatchTrialsUseDerivedSeeds) {
  protocol::SessionConfig cfg;
  cfg.seed = 1234;
  const auto batch = run_batch(cfg, 3, 1, true);
  ASSERT_EQ(batch.runs.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(batch.runs[k].seed, derive_seed(1234, k));
    EXPECT_EQ(batch.runs[k], simulate_session(trial_config(cfg, k)));
  }
}

TEST(Report, WilsonInterval) {
  const auto i = wilson_interval(50, 100);
  EXPECT_NEAR(i.low, 0.4038, 1e-4);
  EXPECT_NEAR(i.high, 0.5962, 1e-4);
  const auto z = wilson_interval(0, 0);
  EXPECT_EQ(z.low, 0.0);
  EXPECT_EQ(z.high, 1.0);
}

TEST(Cli, RunHonestScenario) {
  cli::RunOptions opt;
  opt.config_path = kScenarioDir + "/honest.ini";
  opt.trials = 100;
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_run(opt, out, err), cli::kExitOk) << err.str();
  const auto j = Json::parse(out.str());
  EXPECT_EQ(j["schema"], "mqka.batch/1");
  EXPECT_EQ(j["summary"]["trials"], 100);
  EXPECT_EQ(j["summary"]["agreement_rate"], 1.0);
  EXPECT_EQ(j["summary"]["mean_error_rate"], 0.0);
  EXPECT_FALSE(j.contains("trials"));
}

TEST(Cli, RunIsByteIdenticalAcrossInvocationsAndThreads) {
  cli::RunOptions opt;
  opt.config_path = kScenarioDir + "/intercept_resend.ini";
  opt.trials = 6;
  opt.per_trial = true;
  std::ostringstream a, b, err;
  ASSERT_EQ(cli::cmd_run(opt, a, err), cli::kExitOk);
  opt.threads = 4;
  ASSERT_EQ(cli::cmd_run(opt, b, err), cli::kExitOk);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(Json::parse(a.str())["trials"].size(), 6u);
}

TEST(Cli, RunInterceptResendNearThreeEighths) {
  cli::RunOptions opt;
  opt.config_path = kScenarioDir + "/intercept_resend.ini";
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_run(opt, out, err), cli::kExitOk);
  const auto s = Json::parse(out.str())["summary"];
  EXPECT_GE(s["attacked_blocks"].get<std::size_t>(), 10000u);
  EXPECT_NEAR(s["induced_block_error_rate"].get<double>(), 0.375, 0.02);
}

TEST(Cli, RunWritesFilesAndCsv) {
  cli::RunOptions opt;
  opt.config_path = kScenarioDir + "/forged_tp_tag.ini";
  opt.trials = 10;
  opt.seed = 77;
  opt.out_path = temp_path("report.json");
  opt.csv_path = temp_path("summary.csv");
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_run(opt, out, err), cli::kExitOk) << err.str();
  EXPECT_TRUE(out.str().empty());
  const auto j = Json::parse(slurp(opt.out_path));
  EXPECT_EQ(j["seed"], 77);
  EXPECT_EQ(j["config"]["adversary"]["type"], "forged-tp-tag");
  // Detection aborts are outcomes, not failures.
  EXPECT_GT(j["summary"]["aborts"].get<int>(), 0);
  const std::string csv = slurp(opt.csv_path);
  EXPECT_EQ(csv.rfind("seed,trials,", 0), 0u);
  EXPECT_NE(csv.find("\n77,10,"), std::string::npos);
  std::remove(opt.out_path.c_str());
  std::remove(opt.csv_path.c_str());
}

TEST(Cli, RunConfigErrorsExitTwo) {
  const std::string bad = temp_path("bad.ini");
  {
    std::ofstream f(bad);
    f << "[network]\nM = 2\nN = 3\n[session]\nn = 4\n";
  }
  cli::RunOptions opt;
  opt.config_path = bad;
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_run(opt, out, err), cli::kExitUsage);
  EXPECT_NE(err.str().find("[network] N"), std::string::npos);
  opt.config_path = temp_path("does_not_exist.ini");
  EXPECT_EQ(cli::cmd_run(opt, out, err), cli::kExitUsage);
  std::remove(bad.c_str());
}

TEST(Cli, ReplayExample) {
  std::ostringstream out, err;
  const std::string path = temp_path("example.json");
  ASSERT_EQ(cli::cmd_replay_example(path, out, err), cli::kExitOk) << err.str();
  const std::string text = out.str();
  EXPECT_NE(text.find("h0 = 1000"), std::string::npos);
  EXPECT_NE(text.find("C  = 0010"), std::string::npos);
  EXPECT_NE(text.find("verified: K1 = K2 = K3 = 10011110"), std::string::npos);
  const auto j = Json::parse(slurp(path));
  EXPECT_EQ(j["selector_rows"], Json::array({"1000", "0011", "0111", "1110"}));
  EXPECT_EQ(j["verified"], true);
  std::remove(path.c_str());
}

TEST(Cli, UsdCheck) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_usd_check(4, 100, 1, out, err), cli::kExitOk);
  EXPECT_NE(out.str().find("rank 4: 100"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("all infeasible: yes"), std::string::npos);
  std::ostringstream out0, err0;
  EXPECT_EQ(cli::cmd_usd_check(4, 0, 1, out0, err0), cli::kExitOk);
  EXPECT_NE(err0.str().find("warning"), std::string::npos);
  std::ostringstream o2, e2;
  EXPECT_EQ(cli::cmd_usd_check(0, 3, 1, o2, e2), cli::kExitUsage);
}

TEST(Cli, Efficiency) {
  const auto eta = [](std::size_t n_parties, double delta) {
    std::ostringstream out, err;
    EXPECT_EQ(cli::cmd_efficiency(n_parties, delta, 1, out, err), cli::kExitOk);
    return out.str().substr(0, out.str().find('\n'));
  };
  EXPECT_EQ(eta(3, 0.0), "eta = 0.2222");
  EXPECT_EQ(eta(2, 0.0), "eta = 0.3333");
  EXPECT_EQ(eta(3, 0.5), "eta = 0.1667");
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_efficiency(1, 0.0, 1, out, err), cli::kExitUsage);
}
