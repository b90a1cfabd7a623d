#ifndef PLD_CLI_COMMANDS_HPP
#define PLD_CLI_COMMANDS_HPP

#include <optional>
#include <string>

#include "pld/cli/spec.hpp"
#include "pld/cli/table.hpp"

namespace pld::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitInternal = 70;

struct CommandOutput {
  ResultTable table;
  std::optional<ResultTable> trace;  // solve only
  int exit_code = kExitOk;
};

CommandOutput cmd_eval(const ScenarioSpec& spec, std::int64_t timestamp);
CommandOutput cmd_solve(const ScenarioSpec& spec, std::int64_t timestamp);
CommandOutput cmd_oracle(const ScenarioSpec& spec, std::int64_t timestamp);
CommandOutput cmd_sweep(const ScenarioSpec& spec, std::int64_t timestamp);
CommandOutput cmd_simulate(const ScenarioSpec& spec, std::int64_t timestamp);
CommandOutput cmd_validate_codebook(const ScenarioSpec& spec, std::int64_t timestamp);

bool is_command(const std::string& name);
bool command_needs_link(const std::string& name);
CommandOutput run_command(const std::string& name, const ScenarioSpec& spec,
                          std::int64_t timestamp);

}  // namespace pld::cli

#endif  // PLD_CLI_COMMANDS_HPP
