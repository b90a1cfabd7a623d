#include "pld/cli/commands.hpp"

#include <algorithm>
#include <cstdio>

#include "pld/linkmodel.hpp"
#include "pld/solver.hpp"

namespace pld::cli {

namespace {

const std::vector<std::string> kLinkColumns = {
    "link.z_bob_db", "link.z_eve_db", "link.power_mw", "link.noise_mw", "payload.d_m",
    "payload.d_k"};
const std::vector<std::string> kAllocColumns = {"alloc.n_m", "alloc.n_k"};
const std::vector<std::string> kThresholdColumns = {
    "thresholds.eps_bob_m_max", "thresholds.eps_eve_m_max", "thresholds.eps_bob_k_max",
    "thresholds.eps_eve_k_min", "thresholds.throughput_min"};
const std::vector<std::string> kProfileColumns = {"eps_bob_m", "eps_bob_k", "eps_eve_m",
                                                  "eps_eve_k", "eps_lf",    "r_d",
                                                  "throughput"};
const std::vector<std::string> kSlackColumns = {"feasible",    "slack_bob_m", "slack_eve_m",
                                                "slack_bob_k", "slack_eve_k", "slack_throughput"};

std::string num(double v) { return format_double(v); }
std::string flag(bool v) { return v ? "true" : "false"; }

std::string hex(Word w) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(w));
  return buf;
}

std::string cell_text(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

void append(std::vector<std::string>& to, const std::vector<std::string>& from) {
  to.insert(to.end(), from.begin(), from.end());
}

std::vector<std::string> input_columns(bool with_alloc) {
  std::vector<std::string> c = kLinkColumns;
  if (with_alloc) append(c, kAllocColumns);
  append(c, kThresholdColumns);
  return c;
}

std::vector<std::string> input_cells(const ScenarioSpec& spec, bool with_alloc) {
  std::vector<std::string> out;
  for (const auto& key : input_columns(with_alloc)) out.push_back(spec.entries.at(key));
  return out;
}

std::vector<std::string> profile_cells(const ErasureProfile& p) {
  return {num(p.eps.bob_m), num(p.eps.bob_k), num(p.eps.eve_m), num(p.eps.eve_k),
          num(p.eps_lf),    num(p.r_d),       num(p.throughput)};
}

std::vector<std::string> slack_cells(const Feasibility& f) {
  return {flag(f.feasible), num(f.bob_m), num(f.eve_m), num(f.bob_k), num(f.eve_k),
          num(f.throughput)};
}

std::vector<std::string> blanks(std::size_t n) { return std::vector<std::string>(n); }

ResultTable start_table(const std::string& command, const ScenarioSpec& spec,
                        std::int64_t timestamp) {
  ResultTable t;
  t.metadata = make_metadata(command, spec.entries, timestamp);
  return t;
}

ErasureProfile evaluate_point(const ScenarioSpec& spec) {
  try {
    return evaluate(spec.link(), spec.alloc);
  } catch (const DomainError& e) {
    throw UsageError(std::string("invalid payload.*/alloc.* fields: ") + e.what());
  }
}

void require_key_payload(const ScenarioSpec& spec, const char* command) {
  if (spec.alloc.d_k < 1)
    throw UsageError(std::string(command) + " needs payload.d_k >= 1 (the baseline runs inside sweep)");
}

ResultTable trace_table(const IterationTrace& trace, const ScenarioSpec& spec,
                        std::int64_t timestamp) {
  ResultTable t = start_table("solve-trace", spec, timestamp);
  t.columns = {"layer", "index", "n_m", "n_k", "y", "surrogate", "r_d"};
  for (const TraceRecord& r : trace)
    t.rows.push_back({to_string(r.layer), std::to_string(r.index), num(r.n_m), num(r.n_k), num(r.y),
                      num(r.surrogate), num(r.r_d)});
  return t;
}

}  // namespace

CommandOutput cmd_eval(const ScenarioSpec& spec, std::int64_t timestamp) {
  const ErasureProfile p = evaluate_point(spec);
  const Feasibility f = check_feasible(p, spec.alloc, spec.thresholds);
  CommandOutput out;
  out.table = start_table("eval", spec, timestamp);
  out.table.columns = input_columns(true);
  append(out.table.columns, kProfileColumns);
  append(out.table.columns, kSlackColumns);
  std::vector<std::string> row = input_cells(spec, true);
  append(row, profile_cells(p));
  append(row, slack_cells(f));
  out.table.rows.push_back(std::move(row));
  return out;
}

CommandOutput cmd_solve(const ScenarioSpec& spec, std::int64_t timestamp) {
  require_key_payload(spec, "solve");
  const LinkConfig link = spec.link();
  SolveResult r = solve(link, spec.alloc.d_m, spec.alloc.d_k, spec.thresholds, spec.solver);
  std::optional<OracleResult> oracle;
  if (spec.oracle_check) {
    oracle = grid_oracle(link, spec.alloc.d_m, spec.alloc.d_k, spec.thresholds, spec.box);
    if (oracle->argmax && r.feasible && oracle->r_d_max > 0)
      r.oracle_gap = (oracle->r_d_max - r.profile.r_d) / oracle->r_d_max;
  }

  CommandOutput out;
  out.table = start_table("solve", spec, timestamp);
  out.table.columns = input_columns(false);
  append(out.table.columns, {"status", "feasible", "n_m_opt", "n_k_opt", "n_m_continuous",
                             "n_k_continuous", "mm_iterations", "bcd_iterations"});
  append(out.table.columns, kProfileColumns);
  append(out.table.columns, {"oracle_r_d_max", "oracle_gap"});

  std::vector<std::string> row = input_cells(spec, false);
  append(row, {to_string(r.status), flag(r.feasible)});
  if (r.feasible) {
    append(row, {std::to_string(r.n_m_opt), std::to_string(r.n_k_opt), num(r.n_m_continuous),
                 num(r.n_k_continuous)});
  } else {
    append(row, blanks(4));
  }
  append(row, {std::to_string(r.mm_iterations), std::to_string(r.bcd_iterations)});
  append(row, r.feasible ? profile_cells(r.profile) : blanks(kProfileColumns.size()));
  append(row, {oracle && oracle->argmax ? num(oracle->r_d_max) : "",
               r.oracle_gap ? num(*r.oracle_gap) : ""});
  out.table.rows.push_back(std::move(row));
  out.trace = trace_table(r.trace, spec, timestamp);
  out.exit_code = r.feasible ? kExitOk : kExitInfeasible;
  return out;
}

CommandOutput cmd_oracle(const ScenarioSpec& spec, std::int64_t timestamp) {
  require_key_payload(spec, "oracle");
  const OracleResult o =
      grid_oracle(spec.link(), spec.alloc.d_m, spec.alloc.d_k, spec.thresholds, spec.box);
  CommandOutput out;
  out.table = start_table("oracle", spec, timestamp);
  if (o.argmax) {
    out.table.metadata.emplace_back("oracle_argmax", "n_m=" + num(o.argmax->n_m) +
                                                         " n_k=" + num(o.argmax->n_k));
    out.table.metadata.emplace_back("oracle_r_d_max", num(o.r_d_max));
  } else {
    out.table.metadata.emplace_back("oracle_argmax", "none");
  }
  out.table.columns = input_columns(true);
  append(out.table.columns, kProfileColumns);
  append(out.table.columns, kSlackColumns);

  const std::vector<std::string> head = input_cells(spec, false);
  const std::size_t n_link = kLinkColumns.size();
  out.table.rows.reserve(static_cast<std::size_t>(spec.box.rows()) * spec.box.cols());
  for (int n_m = spec.box.m_lo; n_m <= spec.box.m_hi; ++n_m) {
    for (int n_k = spec.box.k_lo; n_k <= spec.box.k_hi; ++n_k) {
      const CodeAllocation alloc{spec.alloc.d_m, spec.alloc.d_k, static_cast<double>(n_m),
                                 static_cast<double>(n_k)};
      const ErasureProfile& p = o.profile(n_m, n_k);
      std::vector<std::string> row(head.begin(), head.begin() + n_link);
      append(row, {std::to_string(n_m), std::to_string(n_k)});
      row.insert(row.end(), head.begin() + n_link, head.end());
      append(row, profile_cells(p));
      append(row, slack_cells(check_feasible(p, alloc, spec.thresholds)));
      out.table.rows.push_back(std::move(row));
    }
  }
  out.exit_code = o.argmax ? kExitOk : kExitInfeasible;
  return out;
}

CommandOutput cmd_sweep(const ScenarioSpec& spec, std::int64_t timestamp) {
  if (spec.axes.empty()) throw UsageError("sweep needs sweep.axis/start/stop/step or sweep.preset");

  // Every point of the grid, outer axis first.
  std::vector<SpecEntries> points;
  for (double a : spec.axes[0].values()) {
    SpecEntries e = spec.entries;
    e[spec.axes[0].key] = format_double(a);
    if (spec.axes.size() == 1) {
      points.push_back(std::move(e));
      continue;
    }
    for (double b : spec.axes[1].values()) {
      SpecEntries e2 = e;
      e2[spec.axes[1].key] = format_double(b);
      points.push_back(std::move(e2));
    }
  }

  CommandOutput out;
  out.table = start_table("sweep", spec, timestamp);
  out.table.columns = input_columns(false);
  append(out.table.columns,
         {"pld_status", "pld_n_m", "pld_n_k", "pld_r_d", "pld_eps_lf", "pld_throughput",
          "raw_packet_rate", "base_status", "base_n_m", "base_eps_lf", "base_throughput",
          "eps_lf_gap"});
  for (const SpecEntries& e : points) {
    const ScenarioSpec p = ScenarioSpec::from_entries(e);
    require_key_payload(p, "sweep");
    const LinkConfig link = p.link();
    const SolveResult pld = solve(link, p.alloc.d_m, p.alloc.d_k, p.thresholds, p.solver);
    const SolveResult base = baseline_pls(link, p.alloc.d_m, p.thresholds, p.solver);

    std::vector<std::string> row = input_cells(p, false);
    row.push_back(to_string(pld.status));
    if (pld.feasible) {
      append(row, {std::to_string(pld.n_m_opt), std::to_string(pld.n_k_opt), num(pld.profile.r_d),
                   num(pld.profile.eps_lf), num(pld.profile.throughput),
                   num(static_cast<double>(p.alloc.d_m) / (pld.n_m_opt + pld.n_k_opt))});
    } else {
      append(row, blanks(6));
    }
    row.push_back(to_string(base.status));
    if (base.feasible) {
      append(row, {std::to_string(base.n_m_opt), num(base.profile.eps_lf),
                   num(base.profile.throughput)});
    } else {
      append(row, blanks(3));
    }
    row.push_back(pld.feasible && base.feasible ? num(pld.profile.eps_lf - base.profile.eps_lf)
                                                : "");
    out.table.rows.push_back(std::move(row));
  }
  return out;
}

CommandOutput cmd_simulate(const ScenarioSpec& spec, std::int64_t timestamp) {
  const ErasureProfile p = evaluate_point(spec);
  const OutcomeCounts c = simulate_outcomes(p, spec.trials, spec.seed, spec.threads);
  const EmpiricalMetrics m = empirical_metrics(c);
  const bool rd_ok = std::abs(m.r_d_hat - p.r_d) <= m.r_d_half_width;
  const bool lf_ok = std::abs(m.eps_lf_hat - p.eps_lf) <= m.eps_lf_half_width;

  CommandOutput out;
  out.table = start_table("simulate", spec, timestamp);
  out.table.columns = input_columns(true);
  append(out.table.columns,
         {"trials", "seed", "analytic_r_d", "empirical_r_d", "r_d_half_width", "r_d_agree",
          "analytic_eps_lf", "empirical_eps_lf", "eps_lf_half_width", "eps_lf_agree", "agree",
          "bob_perception", "bob_loss", "bob_deception", "eve_perception", "eve_loss",
          "eve_deception", "effective_deception", "leakage_failure"});
  std::vector<std::string> row = input_cells(spec, true);
  append(row, {std::to_string(c.trials), std::to_string(spec.seed), num(p.r_d), num(m.r_d_hat),
               num(m.r_d_half_width), flag(rd_ok), num(p.eps_lf), num(m.eps_lf_hat),
               num(m.eps_lf_half_width), flag(lf_ok), flag(rd_ok && lf_ok),
               std::to_string(c.bob.perception), std::to_string(c.bob.loss),
               std::to_string(c.bob.deception), std::to_string(c.eve.perception),
               std::to_string(c.eve.loss), std::to_string(c.eve.deception),
               std::to_string(c.effective_deception), std::to_string(c.leakage_failure)});
  out.table.rows.push_back(std::move(row));
  out.exit_code = rd_ok && lf_ok ? kExitOk : kExitInfeasible;
  return out;
}

CommandOutput cmd_validate_codebook(const ScenarioSpec& spec, std::int64_t timestamp) {
  const CodebookSpec& cb = spec.codebook;
  CommandOutput out;
  out.table = start_table("validate-codebook", spec, timestamp);
  out.table.columns = {"check", "valid", "exhaustive", "checks", "violation", "witness", "detail"};

  const CodebookVerdict v = validate_codebook(ToyCodebook::xor_book(cb.d), spec.seed, cb.samples);
  std::string witness;
  if (v.witness)
    witness = "m=" + hex(v.witness->m) + " k=" + hex(v.witness->k) + " k'=" + hex(v.witness->k_other);
  out.table.rows.push_back({"cipher_xor_d" + std::to_string(cb.d), flag(v.valid), flag(v.exhaustive),
                            std::to_string(v.checks), cell_text(v.violation), witness, ""});

  const RepetitionCode code{cb.rep_r, cb.key_bits};
  const int d_max = cb.d_max.value_or(code.d_max());
  bool litter_ok = false;
  std::vector<std::string> row{"litter_rep" + std::to_string(cb.rep_r) + "_k" +
                               std::to_string(cb.key_bits)};
  try {
    LitterSet set = generate_litter(code.codebook(), code.length(), d_max,
                                    static_cast<std::size_t>(cb.litter_count), spec.seed);
    if (cb.inject_bad_litter)
      set.litter.push_back(set.key_codewords.back() ^ (d_max > 0 ? Word{1} : Word{0}));
    const LitterVerdict lv = validate_litter(set);
    litter_ok = lv.valid;
    std::string words = "d_max=" + std::to_string(d_max) + " words=";
    for (std::size_t i = 0; i < set.litter.size(); ++i) words += (i ? " " : "") + hex(set.litter[i]);
    std::string w;
    if (lv.witness)
      w = "k=" + std::to_string(lv.witness->key_index) + " c_k=" + hex(lv.witness->key_codeword) +
          " l=" + hex(lv.witness->litter_word) + " distance=" + std::to_string(lv.witness->distance);
    append(row, {flag(lv.valid), "true",
                 std::to_string(set.litter.size() * set.key_codewords.size()),
                 lv.valid ? "" : "litter word within d_max of a key codeword", w, words});
  } catch (const LitterGenerationError& e) {
    append(row, {"false", "false", "0", cell_text(e.what()), "", ""});
  }
  out.table.rows.push_back(std::move(row));
  out.exit_code = v.valid && litter_ok ? kExitOk : kExitInfeasible;
  return out;
}

bool is_command(const std::string& name) {
  return name == "eval" || name == "solve" || name == "oracle" || name == "sweep" ||
         name == "simulate" || name == "validate-codebook";
}

bool command_needs_link(const std::string& name) { return name != "validate-codebook"; }

CommandOutput run_command(const std::string& name, const ScenarioSpec& spec,
                          std::int64_t timestamp) {
  if (name == "eval") return cmd_eval(spec, timestamp);
  if (name == "solve") return cmd_solve(spec, timestamp);
  if (name == "oracle") return cmd_oracle(spec, timestamp);
  if (name == "sweep") return cmd_sweep(spec, timestamp);
  if (name == "simulate") return cmd_simulate(spec, timestamp);
  if (name == "validate-codebook") return cmd_validate_codebook(spec, timestamp);
  throw UsageError("unknown command " + name);
}

}  // namespace pld::cli
