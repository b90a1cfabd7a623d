#ifndef PLD_CLI_TABLE_HPP
#define PLD_CLI_TABLE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pld/cli/spec.hpp"

namespace pld::cli {

inline constexpr const char* kToolVersion = "1.0.0";

/// CSV table with "# key: value" metadata lines ahead of the header row.
struct ResultTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws if absent
  const std::string& at(std::size_t row, const std::string& name) const;
  std::string to_csv() const;
};

ResultTable parse_csv(const std::string& text);

/// FNV-1a 64 over the canonical "key=value\n" listing of the entries.
std::uint64_t config_hash(const SpecEntries& entries);

/// Seconds since the epoch: SOURCE_DATE_EPOCH when set, else the clock.
std::int64_t current_timestamp();

/// Metadata block: tool version, command, config hash, UTC timestamp, and
/// every resolved spec entry.
std::vector<std::pair<std::string, std::string>> make_metadata(const std::string& command,
                                                               const SpecEntries& entries,
                                                               std::int64_t timestamp);

}  // namespace pld::cli

#endif  // PLD_CLI_TABLE_HPP
