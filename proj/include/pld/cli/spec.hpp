#ifndef PLD_CLI_SPEC_HPP
#define PLD_CLI_SPEC_HPP

// Scenario files: flat "key = value" text with dotted keys, '#' comments.
// Resolution order is preset (sweep.preset) < file < --override.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pld/metrics.hpp"
#include "pld/solver.hpp"

namespace pld::cli {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using SpecEntries = std::map<std::string, std::string>;

struct KeyInfo {
  const char* key;
  const char* fallback;  // nullptr: no default
  const char* help;
};

/// Every recognised key, in documentation order.
const std::vector<KeyInfo>& known_keys();
bool is_known_key(std::string_view key);

/// Short sweep-axis names (z_eve_db, power_mw, d_m, ...) mapped to spec keys.
/// Full dotted keys of numeric link/payload/threshold fields are accepted too.
std::string resolve_axis_key(std::string_view name);

SpecEntries parse_spec_text(std::string_view text, std::string_view origin = "<spec>");
SpecEntries load_spec_file(const std::string& path);

/// Parses "key=value" and stores it, replacing any earlier value.
void apply_override(SpecEntries& entries, std::string_view assignment);

/// Entries of a named preset (surface, convergence, convergence_d24, eve_gain, power, packet_rate, eve_gain_power).
SpecEntries preset_entries(std::string_view name);

/// Preset entries (if the file or overrides name one), then file entries,
/// then overrides.
SpecEntries resolve_entries(const SpecEntries& file, const std::vector<std::string>& overrides);

struct SweepAxis {
  std::string key;
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  /// start + i * step for i = 0, 1, ... while <= stop (with a 1e-9 step slack).
  std::vector<double> values() const;
};

struct CodebookSpec {
  int d = 16;
  int rep_r = 3;
  int key_bits = 2;
  std::optional<int> d_max;  // defaults to the repetition code's radius
  int litter_count = 4;
  bool inject_bad_litter = false;
  std::uint64_t samples = 1'000'000;
};

struct ScenarioSpec {
  SpecEntries entries;  // fully resolved, defaults included
  double z_bob_db = 0.0;
  double z_eve_db = 0.0;
  double power_mw = 0.0;
  double noise_mw = 1.0;
  CodeAllocation alloc;
  Thresholds thresholds;
  SolverConfig solver;
  GridBox box;
  bool oracle_check = false;
  std::vector<SweepAxis> axes;
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  CodebookSpec codebook;

  LinkConfig link() const;

  /// Builds and validates. `need_link` makes the three link.* fields without
  /// defaults mandatory. Every problem is reported as a UsageError naming the key.
  static ScenarioSpec from_entries(const SpecEntries& entries, bool need_link = true);
};

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace pld::cli

#endif  // PLD_CLI_SPEC_HPP
