#include "pld/cli/spec.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pld::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw UsageError("invalid number for " + key + ": '" + text + "'");
  return v;
}

template <typename Int>
Int parse_integer(const std::string& key, const std::string& text) {
  Int v{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw UsageError("invalid integer for " + key + ": '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw UsageError("invalid boolean for " + key + ": '" + text + "'");
}

struct Reader {
  const SpecEntries& e;

  bool has(const std::string& key) const { return e.count(key) != 0; }
  const std::string& raw(const std::string& key) const {
    auto it = e.find(key);
    if (it == e.end()) {
      for (const KeyInfo& k : known_keys())
        if (key == k.key) throw UsageError("missing required field " + key + " (" + k.help + ")");
      throw UsageError("missing required field " + key);
    }
    return it->second;
  }
  double num(const std::string& key) const { return parse_double(key, raw(key)); }
  int integer(const std::string& key) const { return parse_integer<int>(key, raw(key)); }
  std::uint64_t u64(const std::string& key) const {
    return parse_integer<std::uint64_t>(key, raw(key));
  }
  bool flag(const std::string& key) const { return parse_bool(key, raw(key)); }
};

const std::vector<std::pair<const char*, const char*>>& axis_aliases() {
  static const std::vector<std::pair<const char*, const char*>> aliases = {
      {"z_bob_db", "link.z_bob_db"},
      {"z_eve_db", "link.z_eve_db"},
      {"power_mw", "link.power_mw"},
      {"noise_mw", "link.noise_mw"},
      {"d_m", "payload.d_m"},
      {"d_k", "payload.d_k"},
      {"throughput_min", "thresholds.throughput_min"},
      {"eps_bob_m_max", "thresholds.eps_bob_m_max"},
      {"eps_eve_m_max", "thresholds.eps_eve_m_max"},
      {"eps_bob_k_max", "thresholds.eps_bob_k_max"},
      {"eps_eve_k_min", "thresholds.eps_eve_k_min"},
  };
  return aliases;
}

}  // namespace

const std::vector<KeyInfo>& known_keys() {
  static const std::vector<KeyInfo> keys = {
      {"link.z_bob_db", nullptr, "Bob channel gain (dB)"},
      {"link.z_eve_db", nullptr, "Eve channel gain (dB)"},
      {"link.power_mw", nullptr, "transmit power (mW)"},
      {"link.noise_mw", "1", "noise power (mW)"},
      {"payload.d_m", "16", "ciphertext payload (bits)"},
      {"payload.d_k", "16", "key payload (bits); 0 selects the baseline"},
      {"alloc.n_m", "64", "ciphertext blocklength for eval/simulate"},
      {"alloc.n_k", "64", "key blocklength for eval/simulate; must be 0 when d_k is 0"},
      {"thresholds.eps_bob_m_max", "0.5", "upper bound on Bob's ciphertext erasure"},
      {"thresholds.eps_eve_m_max", "0.5", "upper bound on Eve's ciphertext erasure"},
      {"thresholds.eps_bob_k_max", "0.5", "upper bound on Bob's key erasure"},
      {"thresholds.eps_eve_k_min", "0.5", "lower bound on Eve's key erasure"},
      {"thresholds.throughput_min", "0", "throughput floor (bits per channel use)"},
      {"solver.tol_mm", "2e-16", "MM relative-improvement threshold"},
      {"solver.tol_bcd", "2e-16", "BCD relative-improvement threshold"},
      {"solver.tol_fp", "2e-16", "FP relative-improvement threshold"},
      {"solver.max_mm", "100", "MM iteration cap"},
      {"solver.max_bcd", "100", "BCD iteration cap"},
      {"solver.max_fp", "100", "FP iteration cap (both inner loops)"},
      {"solver.n_min", "16", "lower end of the blocklength box"},
      {"solver.n_max", "128", "upper end of the blocklength box"},
      {"solver.init", "coarse_grid", "initial point: coarse_grid or box_midpoint"},
      {"solver.golden_tol", "1e-6", "golden-section bracket width relative to the interval"},
      {"solver.integer_polish", "true", "hill-climb over +-2 integer neighbours after rounding"},
      {"solver.oracle_check", "false", "solve: also run the grid oracle and report the gap"},
      {"oracle.m_lo", nullptr, "oracle box, n_m lower end (default solver.n_min)"},
      {"oracle.m_hi", nullptr, "oracle box, n_m upper end (default solver.n_max)"},
      {"oracle.k_lo", nullptr, "oracle box, n_k lower end (default solver.n_min)"},
      {"oracle.k_hi", nullptr, "oracle box, n_k upper end (default solver.n_max)"},
      {"sweep.preset", nullptr, "named scenario: surface convergence convergence_d24 eve_gain power packet_rate eve_gain_power"},
      {"sweep.axis", nullptr, "first sweep parameter"},
      {"sweep.start", nullptr, "first sweep start"},
      {"sweep.stop", nullptr, "first sweep stop (inclusive)"},
      {"sweep.step", nullptr, "first sweep step (> 0)"},
      {"sweep2.axis", nullptr, "second sweep parameter (grid sweep)"},
      {"sweep2.start", nullptr, "second sweep start"},
      {"sweep2.stop", nullptr, "second sweep stop (inclusive)"},
      {"sweep2.step", nullptr, "second sweep step (> 0)"},
      {"sim.trials", "1000000", "Monte-Carlo trials"},
      {"sim.seed", "1", "Monte-Carlo seed"},
      {"sim.threads", "1", "Monte-Carlo worker threads (counts do not depend on it)"},
      {"codebook.d", "16", "XOR cipher word length (1..16)"},
      {"codebook.rep_r", "3", "repetition factor of the key channel code"},
      {"codebook.key_bits", "2", "key length for the litter check"},
      {"codebook.d_max", nullptr, "litter separation radius (default (rep_r - 1) / 2)"},
      {"codebook.litter_count", "4", "number of litter words to generate"},
      {"codebook.inject_bad_litter", "false", "append a litter word equal to a key codeword"},
      {"codebook.samples", "1000000", "sampled triples for d > 8"},
  };
  return keys;
}

bool is_known_key(std::string_view key) {
  const auto& keys = known_keys();
  return std::any_of(keys.begin(), keys.end(), [&](const KeyInfo& k) { return key == k.key; });
}

std::string resolve_axis_key(std::string_view name) {
  for (const auto& [alias, key] : axis_aliases())
    if (name == alias || name == key) return key;
  throw UsageError("unrecognised sweep axis '" + std::string(name) + "'");
}

SpecEntries parse_spec_text(std::string_view text, std::string_view origin) {
  SpecEntries out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = std::string(origin) + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos) throw UsageError(where + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!is_known_key(key)) throw UsageError(where + ": unknown key " + key);
    if (value.empty()) throw UsageError(where + ": empty value for " + key);
    if (out.count(key)) throw UsageError(where + ": duplicate key " + key);
    out[key] = value;
  }
  return out;
}

SpecEntries load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read spec file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec_text(ss.str(), path);
}

void apply_override(SpecEntries& entries, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw UsageError("override must be key=value: '" + std::string(assignment) + "'");
  const std::string key(trim(assignment.substr(0, eq)));
  const std::string value(trim(assignment.substr(eq + 1)));
  if (!is_known_key(key)) throw UsageError("unknown key " + key);
  if (value.empty()) throw UsageError("empty value for " + key);
  entries[key] = value;
}

SpecEntries preset_entries(std::string_view name) {
  const SpecEntries common = {{"link.z_bob_db", "0"},
                              {"link.power_mw", "5"},
                              {"thresholds.throughput_min", "0.05"}};
  auto with = [&](SpecEntries extra) {
    SpecEntries e = common;
    for (auto& [k, v] : extra) e[k] = v;
    return e;
  };
  if (name == "surface")
    return with({{"link.z_eve_db", "-10"}, {"thresholds.throughput_min", "0.1"}});
  if (name == "convergence" || name == "convergence_d24")
    return with({{"link.z_bob_db", "-5"},
                 {"link.z_eve_db", "-15"},
                 {"thresholds.throughput_min", "0.1"},
                 {"payload.d_m", name == "convergence" ? "16" : "24"}});
  if (name == "eve_gain")
    return with({{"link.z_eve_db", "-10"},
                 {"sweep.axis", "z_eve_db"},
                 {"sweep.start", "-20"},
                 {"sweep.stop", "-2"},
                 {"sweep.step", "1"}});
  if (name == "power")
    return with({{"link.z_eve_db", "-15"},
                 {"sweep.axis", "power_mw"},
                 {"sweep.start", "1"},
                 {"sweep.stop", "20"},
                 {"sweep.step", "1"}});
  if (name == "packet_rate")
    return with({{"link.z_eve_db", "-10"},
                 {"sweep.axis", "d_m"},
                 {"sweep.start", "8"},
                 {"sweep.stop", "40"},
                 {"sweep.step", "4"}});
  if (name == "eve_gain_power")
    return with({{"link.z_eve_db", "-10"},
                 {"sweep.axis", "z_eve_db"},
                 {"sweep.start", "-20"},
                 {"sweep.stop", "-2"},
                 {"sweep.step", "1"},
                 {"sweep2.axis", "power_mw"},
                 {"sweep2.start", "1"},
                 {"sweep2.stop", "20"},
                 {"sweep2.step", "1"}});
  throw UsageError("unknown sweep.preset '" + std::string(name) + "'");
}

SpecEntries resolve_entries(const SpecEntries& file, const std::vector<std::string>& overrides) {
  SpecEntries layered = file;
  for (const auto& o : overrides) apply_override(layered, o);
  SpecEntries out;
  if (auto it = layered.find("sweep.preset"); it != layered.end()) out = preset_entries(it->second);
  for (auto& [k, v] : layered) out[k] = v;
  return out;
}

std::vector<double> SweepAxis::values() const {
  std::vector<double> out;
  const double span = (stop - start) / step;
  const auto count = static_cast<long>(std::floor(span + 1e-9)) + 1;
  for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

LinkConfig ScenarioSpec::link() const {
  return LinkConfig::from_db(z_bob_db, z_eve_db, power_mw, noise_mw);
}

ScenarioSpec ScenarioSpec::from_entries(const SpecEntries& given, bool need_link) {
  ScenarioSpec s;
  for (const auto& [k, v] : given)
    if (!is_known_key(k)) throw UsageError("unknown key " + k);
  s.entries = given;
  for (const KeyInfo& k : known_keys())
    if (k.fallback && !s.entries.count(k.key)) s.entries[k.key] = k.fallback;
  const Reader r{s.entries};

  if (need_link) {
    s.z_bob_db = r.num("link.z_bob_db");
    s.z_eve_db = r.num("link.z_eve_db");
    s.power_mw = r.num("link.power_mw");
    if (!(s.power_mw > 0)) throw UsageError("link.power_mw (transmit power) must be > 0");
  }
  s.noise_mw = r.num("link.noise_mw");
  if (!(s.noise_mw > 0)) throw UsageError("link.noise_mw must be > 0");
  if (need_link) {
    try {
      s.link();
    } catch (const DomainError& e) {
      throw UsageError(std::string("invalid link.* fields: ") + e.what());
    }
  }

  s.alloc.d_m = r.integer("payload.d_m");
  s.alloc.d_k = r.integer("payload.d_k");
  s.alloc.n_m = r.num("alloc.n_m");
  s.alloc.n_k = r.num("alloc.n_k");
  if (s.alloc.d_m < 1) throw UsageError("payload.d_m must be >= 1");
  if (s.alloc.d_k < 0) throw UsageError("payload.d_k must be >= 0");
  // Baseline payloads imply a zero key blocklength unless one was given.
  if (s.alloc.d_k == 0 && !given.count("alloc.n_k")) {
    s.alloc.n_k = 0.0;
    s.entries["alloc.n_k"] = "0";
  }

  Thresholds& th = s.thresholds;
  th.eps_bob_m_max = r.num("thresholds.eps_bob_m_max");
  th.eps_eve_m_max = r.num("thresholds.eps_eve_m_max");
  th.eps_bob_k_max = r.num("thresholds.eps_bob_k_max");
  th.eps_eve_k_min = r.num("thresholds.eps_eve_k_min");
  th.throughput_min = r.num("thresholds.throughput_min");
  try {
    th.validate();
  } catch (const DomainError& e) {
    throw UsageError(std::string("invalid thresholds.* field: ") + e.what());
  }

  SolverConfig& c = s.solver;
  c.tol_mm = r.num("solver.tol_mm");
  c.tol_bcd = r.num("solver.tol_bcd");
  c.tol_fp = r.num("solver.tol_fp");
  c.max_mm = r.integer("solver.max_mm");
  c.max_bcd = r.integer("solver.max_bcd");
  c.max_fp = r.integer("solver.max_fp");
  c.n_min = r.num("solver.n_min");
  c.n_max = r.num("solver.n_max");
  c.golden_tol = r.num("solver.golden_tol");
  c.integer_polish = r.flag("solver.integer_polish");
  const std::string& init = r.raw("solver.init");
  if (init == "coarse_grid") {
    c.init = InitStrategy::CoarseGrid;
  } else if (init == "box_midpoint") {
    c.init = InitStrategy::BoxMidpoint;
  } else {
    throw UsageError("solver.init must be coarse_grid or box_midpoint, got '" + init + "'");
  }
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw UsageError(std::string("invalid solver.* field: ") + e.what());
  }
  s.oracle_check = r.flag("solver.oracle_check");

  auto box_end = [&](const char* key, double fallback) {
    if (!r.has(key)) {
      const int v = static_cast<int>(std::lround(fallback));
      s.entries[key] = std::to_string(v);
      return v;
    }
    return r.integer(key);
  };
  s.box.m_lo = box_end("oracle.m_lo", std::ceil(c.n_min));
  s.box.m_hi = box_end("oracle.m_hi", std::floor(c.n_max));
  s.box.k_lo = box_end("oracle.k_lo", std::ceil(c.n_min));
  s.box.k_hi = box_end("oracle.k_hi", std::floor(c.n_max));
  if (s.box.m_lo < 1 || s.box.k_lo < 1 || s.box.rows() < 1 || s.box.cols() < 1)
    throw UsageError("oracle.* must describe a non-empty box of positive blocklengths");

  for (const char* prefix : {"sweep", "sweep2"}) {
    const std::string p(prefix);
    const bool any = r.has(p + ".axis") || r.has(p + ".start") || r.has(p + ".stop") ||
                     r.has(p + ".step");
    if (!any) continue;
    if (p == "sweep2" && s.axes.empty()) throw UsageError("sweep2.* given without sweep.*");
    SweepAxis axis;
    axis.key = resolve_axis_key(r.raw(p + ".axis"));
    axis.start = r.num(p + ".start");
    axis.stop = r.num(p + ".stop");
    axis.step = r.num(p + ".step");
    if (!(axis.step > 0)) throw UsageError(p + ".step must be > 0");
    if (axis.stop < axis.start) throw UsageError(p + ".stop must be >= " + p + ".start");
    if (!s.axes.empty() && s.axes.front().key == axis.key)
      throw UsageError("sweep and sweep2 name the same parameter");
    s.axes.push_back(axis);
  }

  s.trials = r.u64("sim.trials");
  if (s.trials < 1) throw UsageError("sim.trials must be >= 1");
  s.seed = r.u64("sim.seed");
  s.threads = static_cast<unsigned>(r.integer("sim.threads"));
  if (s.threads < 1) throw UsageError("sim.threads must be >= 1");

  CodebookSpec& cb = s.codebook;
  cb.d = r.integer("codebook.d");
  cb.rep_r = r.integer("codebook.rep_r");
  cb.key_bits = r.integer("codebook.key_bits");
  if (r.has("codebook.d_max")) cb.d_max = r.integer("codebook.d_max");
  cb.litter_count = r.integer("codebook.litter_count");
  cb.inject_bad_litter = r.flag("codebook.inject_bad_litter");
  cb.samples = r.u64("codebook.samples");
  if (cb.d < 1 || cb.d > 16) throw UsageError("codebook.d must be in 1..16");
  if (cb.rep_r < 1) throw UsageError("codebook.rep_r must be >= 1");
  if (cb.key_bits < 1 || cb.key_bits * cb.rep_r > 64)
    throw UsageError("codebook.key_bits * codebook.rep_r must be in 1..64");
  if (cb.litter_count < 0) throw UsageError("codebook.litter_count must be >= 0");
  if (cb.d_max && *cb.d_max < 0) throw UsageError("codebook.d_max must be >= 0");
  return s;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace pld::cli
