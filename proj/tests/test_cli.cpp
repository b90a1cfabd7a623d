#include <doctest.h>

#include <random>

#include "pld/cli/commands.hpp"

using namespace pld;
using namespace pld::cli;

namespace {

constexpr std::int64_t kStamp = 1700000000;

ScenarioSpec scenario(const std::vector<std::string>& overrides, bool need_link = true) {
  return ScenarioSpec::from_entries(resolve_entries({}, overrides), need_link);
}

const std::vector<std::string> kSurfaceLink = {"link.z_bob_db=0", "link.z_eve_db=-10",
                                        "link.power_mw=5"};

std::vector<std::string> with(std::vector<std::string> base, std::initializer_list<std::string> more) {
  base.insert(base.end(), more);
  return base;
}

}  // namespace

TEST_CASE("spec parsing") {
  const SpecEntries e = parse_spec_text("# comment\nlink.z_bob_db = -5\n\nlink.power_mw=5  # mW\n");
  CHECK(e.at("link.z_bob_db") == "-5");
  CHECK(e.at("link.power_mw") == "5");
  CHECK(e.size() == 2u);

  try {
    parse_spec_text("link.z_bob_db = 0\nlink.typo = 1\n", "a.spec");
    FAIL("expected a UsageError");
  } catch (const UsageError& err) {
    const std::string msg = err.what();
    CHECK(msg.find("a.spec:2") != std::string::npos);
    CHECK(msg.find("link.typo") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_spec_text("link.z_bob_db = 0\nlink.z_bob_db = 1\n"), UsageError);
  CHECK_THROWS_AS(parse_spec_text("no equals sign\n"), UsageError);
  CHECK_THROWS_AS(load_spec_file("/nonexistent/file.spec"), UsageError);
}

TEST_CASE("missing required field names the key") {
  try {
    scenario({"link.z_bob_db=0", "link.z_eve_db=-10"});
    FAIL("expected a UsageError");
  } catch (const UsageError& err) {
    CHECK(std::string(err.what()).find("missing required field link.power_mw") != std::string::npos);
  }
  CHECK_NOTHROW(scenario({}, false));
}

TEST_CASE("bad values are usage errors") {
  CHECK_THROWS_AS(scenario(with(kSurfaceLink, {"payload.d_m=abc"})), UsageError);
  CHECK_THROWS_AS(scenario(with(kSurfaceLink, {"thresholds.eps_bob_m_max=1.5"})), UsageError);
  CHECK_THROWS_AS(scenario(with(kSurfaceLink, {"link.power_mw=-1"})), UsageError);
  CHECK_THROWS_AS(scenario(with(kSurfaceLink, {"solver.init=random"})), UsageError);
  CHECK_THROWS_AS(scenario(with(kSurfaceLink, {"sweep.axis=nonsense"})), UsageError);
  SpecEntries e;
  CHECK_THROWS_AS(apply_override(e, "nokey"), UsageError);
  CHECK_THROWS_AS(apply_override(e, "link.bogus=1"), UsageError);
}

TEST_CASE("precedence: preset < file < override") {
  const SpecEntries file = parse_spec_text("sweep.preset = convergence\nlink.power_mw = 7\n");
  const SpecEntries e = resolve_entries(file, {"link.power_mw=9", "link.z_eve_db=-12"});
  CHECK(e.at("link.z_bob_db") == "-5");   // preset
  CHECK(e.at("link.power_mw") == "9");    // override beats file
  CHECK(e.at("link.z_eve_db") == "-12");  // override beats preset
  const SpecEntries f = resolve_entries(file, {});
  CHECK(f.at("link.power_mw") == "7");
  CHECK_THROWS_AS(preset_entries("fig99"), UsageError);
}

TEST_CASE("sweep axes") {
  const ScenarioSpec s = scenario({"sweep.preset=eve_gain"});
  REQUIRE(s.axes.size() == 1u);
  CHECK(s.axes[0].key == "link.z_eve_db");
  const std::vector<double> v = s.axes[0].values();
  CHECK(v.size() == 19u);
  CHECK(v.front() == -20.0);
  CHECK(v.back() == -2.0);
  CHECK(resolve_axis_key("power_mw") == "link.power_mw");
  CHECK(resolve_axis_key("payload.d_m") == "payload.d_m");
  CHECK(SweepAxis{"x", 0.0, 1.0, 0.1}.values().size() == 11u);
  const ScenarioSpec two = scenario({"sweep.preset=eve_gain_power"});
  CHECK(two.axes.size() == 2u);
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 10'000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(16.0) == "16");
}

TEST_CASE("csv round-trip and metadata") {
  const CommandOutput out = cmd_eval(scenario(kSurfaceLink), kStamp);
  const ResultTable back = parse_csv(out.table.to_csv());
  CHECK(back.columns == out.table.columns);
  CHECK(back.rows == out.table.rows);
  CHECK(back.metadata == out.table.metadata);
  bool has_hash = false, has_time = false;
  for (const auto& [k, v] : out.table.metadata) {
    has_hash = has_hash || k == "config_hash";
    if (k == "timestamp") {
      has_time = true;
      CHECK(v == "2023-11-14T22:13:20Z");
    }
  }
  CHECK(has_hash);
  CHECK(has_time);
  CHECK(config_hash({{"a", "1"}}) != config_hash({{"a", "2"}}));
}

TEST_CASE("eval") {
  const CommandOutput out = cmd_eval(scenario(kSurfaceLink), kStamp);
  REQUIRE(out.table.rows.size() == 1u);
  CHECK(out.exit_code == kExitOk);
  const CodeAllocation alloc{16, 16, 64.0, 64.0};
  const ErasureProfile p = evaluate(LinkConfig::from_db(0, -10, 5), alloc);
  CHECK(std::stod(out.table.at(0, "r_d")) == p.r_d);
  CHECK(std::stod(out.table.at(0, "eps_lf")) == p.eps_lf);
  const bool feasible = check_feasible(p, alloc, Thresholds{}).feasible;
  CHECK(out.table.at(0, "feasible") == (feasible ? "true" : "false"));
  const CommandOutput good = cmd_eval(scenario(with(kSurfaceLink, {"alloc.n_m=128", "alloc.n_k=16"})), kStamp);
  CHECK(good.table.at(0, "feasible") == "true");

  SUBCASE("infeasible point still exits 0 and reports negative slack") {
    const CommandOutput bad = cmd_eval(scenario(with(kSurfaceLink, {"thresholds.throughput_min=10"})), kStamp);
    CHECK(bad.exit_code == kExitOk);
    CHECK(bad.table.at(0, "feasible") == "false");
    CHECK(std::stod(bad.table.at(0, "slack_throughput")) < 0.0);
  }
  SUBCASE("d_k = 0 is the baseline") {
    const CommandOutput b = cmd_eval(scenario(with(kSurfaceLink, {"payload.d_k=0"})), kStamp);
    CHECK(b.table.at(0, "alloc.n_k") == "0");
    CHECK(std::stod(b.table.at(0, "r_d")) == 0.0);
  }
}

TEST_CASE("solve and oracle through the command layer") {
  const ScenarioSpec s = scenario({"sweep.preset=convergence", "solver.oracle_check=true"});
  const CommandOutput out = cmd_solve(s, kStamp);
  CHECK(out.exit_code == kExitOk);
  CHECK(out.table.at(0, "status") == "optimal");
  CHECK(out.table.at(0, "n_m_opt") == "128");
  CHECK(out.table.at(0, "n_k_opt") == "26");
  CHECK(std::stod(out.table.at(0, "oracle_gap")) <= 0.0);
  REQUIRE(out.trace);
  CHECK(out.trace->rows.size() > 3u);

  const CommandOutput o = cmd_oracle(s, kStamp);
  CHECK(o.table.rows.size() == 12769u);
  // Every oracle row re-evaluates identically through eval.
  for (std::size_t i = 0; i < o.table.rows.size(); i += 97) {
    const ScenarioSpec p = scenario({"sweep.preset=convergence", "alloc.n_m=" + o.table.at(i, "alloc.n_m"),
                                     "alloc.n_k=" + o.table.at(i, "alloc.n_k")});
    const CommandOutput e = cmd_eval(p, kStamp);
    CHECK(e.table.at(0, "r_d") == o.table.at(i, "r_d"));
    CHECK(e.table.at(0, "feasible") == o.table.at(i, "feasible"));
  }

  const CommandOutput inf = cmd_solve(scenario({"sweep.preset=convergence", "thresholds.throughput_min=10"}), kStamp);
  CHECK(inf.exit_code == kExitInfeasible);
  CHECK(inf.table.at(0, "feasible") == "false");
}

TEST_CASE("simulate") {
  const CommandOutput one = cmd_simulate(scenario(with(kSurfaceLink, {"sim.trials=1"})), kStamp);
  CHECK(one.table.at(0, "trials") == "1");
  CHECK(one.table.at(0, "agree") == "true");  // half-width >= 1 at one trial

  const ScenarioSpec s = scenario(with(kSurfaceLink, {"sim.trials=200000", "sim.seed=9"}));
  const CommandOutput a = cmd_simulate(s, kStamp);
  const CommandOutput b = cmd_simulate(s, kStamp);
  CHECK(a.table.to_csv() == b.table.to_csv());
  CHECK(a.exit_code == kExitOk);
  CHECK_THROWS_AS(scenario(with(kSurfaceLink, {"sim.trials=0"})), UsageError);
}

TEST_CASE("validate-codebook") {
  const CommandOutput ok = cmd_validate_codebook(scenario({}, false), kStamp);
  CHECK(ok.exit_code == kExitOk);
  REQUIRE(ok.table.rows.size() == 2u);
  CHECK(ok.table.at(0, "check") == "cipher_xor_d16");
  CHECK(ok.table.at(0, "valid") == "true");
  CHECK(ok.table.at(1, "check") == "litter_rep3_k2");
  CHECK(ok.table.at(1, "valid") == "true");

  const CommandOutput bad = cmd_validate_codebook(scenario({"codebook.inject_bad_litter=true"}, false), kStamp);
  CHECK(bad.exit_code == kExitInfeasible);
  CHECK(bad.table.at(1, "valid") == "false");
  CHECK(bad.table.at(1, "witness").find("distance=1") != std::string::npos);

  const CommandOutput exhaustive = cmd_validate_codebook(scenario({"codebook.d=8"}, false), kStamp);
  CHECK(exhaustive.table.at(0, "exhaustive") == "true");
}

TEST_CASE("sweep rows are ordered and complete") {
  const ScenarioSpec s = scenario({"sweep.preset=packet_rate", "sweep.start=8", "sweep.stop=16"});
  const CommandOutput out = cmd_sweep(s, kStamp);
  REQUIRE(out.table.rows.size() == 3u);
  CHECK(out.table.at(0, "payload.d_m") == "8");
  CHECK(out.table.at(2, "payload.d_m") == "16");
  for (std::size_t i = 0; i < 3; ++i) CHECK(out.table.at(i, "base_n_m") != "");
}
