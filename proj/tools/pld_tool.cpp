// pld_tool: evaluation, solving, oracle surfaces, sweeps, Monte-Carlo checks
// and codebook validation from flat key = value scenario files.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "pld/cli/commands.hpp"

namespace {

struct Options {
  std::string spec;
  std::string out;
  std::string trace;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::vector<std::string> overrides;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw pld::cli::UsageError("cannot write " + path);
  f << text;
  if (!f) throw pld::cli::UsageError("write failed for " + path);
}

std::string default_trace_path(const std::string& out) {
  const std::string ext = ".csv";
  if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0)
    return out.substr(0, out.size() - ext.size()) + ".trace.csv";
  return out + ".trace.csv";
}

int run(const std::string& command, const Options& opt) {
  using namespace pld::cli;
  SpecEntries file;
  if (!opt.spec.empty()) file = load_spec_file(opt.spec);
  std::vector<std::string> overrides = opt.overrides;
  if (opt.seed) overrides.push_back("sim.seed=" + std::to_string(*opt.seed));
  if (opt.trials) overrides.push_back("sim.trials=" + std::to_string(*opt.trials));
  const ScenarioSpec spec =
      ScenarioSpec::from_entries(resolve_entries(file, overrides), command_needs_link(command));

  const CommandOutput result = run_command(command, spec, current_timestamp());
  if (opt.out.empty()) {
    std::cout << result.table.to_csv();
  } else {
    write_file(opt.out, result.table.to_csv());
  }
  if (result.trace) {
    if (!opt.trace.empty()) {
      write_file(opt.trace, result.trace->to_csv());
    } else if (!opt.out.empty()) {
      write_file(default_trace_path(opt.out), result.trace->to_csv());
    }
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physical-layer deception metrics, solver and validation tool"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pld::cli::kToolVersion);

  Options opt;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"eval", "Evaluate the metrics at one allocation"},
      {"solve", "Maximize the deception rate (writes an iteration trace)"},
      {"oracle", "Exhaustive grid evaluation over the blocklength box"},
      {"sweep", "Solve and run the baseline along one or two parameter axes"},
      {"simulate", "Monte-Carlo outcome simulation against the analytic metrics"},
      {"validate-codebook", "Check the XOR cipher and a generated litter set"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--spec", opt.spec, "Scenario file (key = value lines)");
    sub->add_option("--out", opt.out, "Output CSV path (default stdout)");
    sub->add_option("--seed", opt.seed, "Seed for simulation and litter generation");
    sub->add_option("--trials", opt.trials, "Monte-Carlo trials");
    sub->add_option("--override", opt.overrides, "key=value, applied after the spec file")
        ->allow_extra_args(false);
    sub->add_option("--trace", opt.trace, "Iteration trace CSV path (solve)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return pld::cli::kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opt);
  } catch (const pld::cli::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return pld::cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return pld::cli::kExitInternal;
  }
}
