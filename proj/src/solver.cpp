#include "pld/solver.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace pld {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Floor for the denominator of the quadratic transform when a clamped
// surrogate term reaches zero.
constexpr double kTinyDenominator = 1e-300;

double relative_improvement(double previous, double current) {
  if (previous > 0.0) return (current - previous) / previous;
  return current > previous ? kInf : 0.0;
}

CodeAllocation make_alloc(Variable which, int d_m, int d_k, double free_n, double other_n) {
  return which == Variable::Ciphertext ? CodeAllocation{d_m, d_k, free_n, other_n}
                                       : CodeAllocation{d_m, d_k, other_n, free_n};
}

// Bisects between a point known to satisfy `ok` and one known not to.
template <typename Pred>
double bisect_boundary(Pred&& ok, double good, double bad) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (good + bad);
    if (mid == good || mid == bad) break;
    (ok(mid) ? good : bad) = mid;
  }
  return good;
}

bool is_feasible(const LinkConfig& link, const CodeAllocation& alloc, const Thresholds& th) {
  return check_feasible(evaluate(link, alloc), alloc, th).feasible;
}

double true_rd(const LinkConfig& link, int d_m, int d_k, double n_m, double n_k) {
  return evaluate(link, CodeAllocation{d_m, d_k, n_m, n_k}).r_d;
}

struct Point {
  double n_m = 0.0;
  double n_k = 0.0;
};

std::optional<Point> best_on_grid(const LinkConfig& link, int d_m, int d_k, const Thresholds& th,
                                  const SolverConfig& cfg, int points_per_axis) {
  std::optional<Point> best;
  double best_rd = -1.0;
  for (int i = 0; i < points_per_axis; ++i) {
    const double n_m = cfg.n_min + (cfg.n_max - cfg.n_min) * i / (points_per_axis - 1);
    for (int j = 0; j < points_per_axis; ++j) {
      const double n_k = cfg.n_min + (cfg.n_max - cfg.n_min) * j / (points_per_axis - 1);
      const CodeAllocation alloc{d_m, d_k, n_m, n_k};
      const ErasureProfile p = evaluate(link, alloc);
      if (!check_feasible(p, alloc, th).feasible) continue;
      if (!best || better_candidate(p.r_d, n_m, n_k, best_rd, best->n_m, best->n_k)) {
        best = Point{n_m, n_k};
        best_rd = p.r_d;
      }
    }
  }
  return best;
}

std::optional<Point> initial_point(const LinkConfig& link, int d_m, int d_k, const Thresholds& th,
                                   const SolverConfig& cfg) {
  const double mid = 0.5 * (cfg.n_min + cfg.n_max);
  auto midpoint = [&]() -> std::optional<Point> {
    if (is_feasible(link, CodeAllocation{d_m, d_k, mid, mid}, th)) return Point{mid, mid};
    return std::nullopt;
  };
  // Nested grids: 8 points per axis first, refined down to unit spacing on
  // the default box when the feasible set is too thin for the coarse one.
  auto grids = [&]() -> std::optional<Point> {
    for (int points : {8, 15, 29, 57, 113}) {
      if (auto p = best_on_grid(link, d_m, d_k, th, cfg, points)) return p;
      if (points - 1 >= cfg.n_max - cfg.n_min) break;
    }
    return std::nullopt;
  };
  if (cfg.init == InitStrategy::BoxMidpoint) {
    if (auto p = midpoint()) return p;
    return grids();
  }
  if (auto p = best_on_grid(link, d_m, d_k, th, cfg, 8)) return p;
  if (auto p = midpoint()) return p;
  return grids();
}

// Records FP iterates, then shared by both block loops. `free_is_key` picks
// which factor of the surrogate plays A in 2 y sqrt(A) - y^2 / B.
FpOutcome fp_loop(const BoundAnchor& anchor, const LinkConfig& link, Variable which,
                  double other_n, const Thresholds& th, const SolverConfig& cfg,
                  std::optional<double> start, IterationTrace* trace) {
  FpOutcome out;
  out.interval = feasible_interval(which, link, anchor.d_m, anchor.d_k, other_n, th, cfg, start);
  if (out.interval.empty()) return out;
  out.feasible = true;

  const bool key = which == Variable::Key;
  auto factors = [&](double x) {
    const SurrogateTerms t =
        key ? surrogate_terms(other_n, x, anchor) : surrogate_terms(x, other_n, anchor);
    // key block: A = Bob factor, B = Eve factor; ciphertext block: swapped.
    return key ? std::array<double, 2>{t.bob_factor(), t.eve_factor()}
               : std::array<double, 2>{t.eve_factor(), t.bob_factor()};
  };

  double n = out.interval.clamp(start.value_or(key ? anchor.n_k_hat : anchor.n_m_hat));
  auto [A, B] = factors(n);
  double value = A * B;
  out.history.push_back(value);

  for (int i = 1; i <= cfg.max_fp && B > 0.0 && value > 0.0; ++i) {
    const double y = fp_y_closed_form(A, B).y;
    auto objective = [&](double x) {
      const auto f = factors(x);
      return fp_transform(y, f[0], std::max(f[1], kTinyDenominator));
    };
    const Maximum1d m = concave_max_1d(objective, out.interval, cfg.golden_tol);
    const auto cand = factors(m.argmax);
    const double cand_value = cand[0] * cand[1];
    ++out.iterations;
    if (trace) {
      const double n_m = key ? other_n : m.argmax;
      const double n_k = key ? m.argmax : other_n;
      trace->push_back({TraceLayer::FP, i, n_m, n_k, y, cand_value,
                        true_rd(link, anchor.d_m, anchor.d_k, n_m, n_k)});
    }
    if (!(cand_value > value)) break;
    const double rel = relative_improvement(value, cand_value);
    n = m.argmax;
    A = cand[0];
    B = cand[1];
    value = cand_value;
    out.history.push_back(value);
    if (rel <= cfg.tol_fp) break;
  }

  out.n = n;
  out.value = value;
  if (B > 0.0) {
    out.y = fp_y_closed_form(A, B).y;
    out.transform_value = fp_transform(out.y, A, B);
  }
  return out;
}

std::vector<int> integer_neighbors(double x, int radius, int lo, int hi) {
  std::vector<int> out;
  const int from = static_cast<int>(std::floor(x)) - (radius - 1);
  const int to = static_cast<int>(std::ceil(x)) + (radius - 1);
  for (int v = std::max(from, lo); v <= std::min(to, hi); ++v) out.push_back(v);
  return out;
}

}  // namespace

void SolverConfig::validate() const {
  auto positive = [](const char* name, double v) {
    if (!(v > 0) || !std::isfinite(v)) throw DomainError(detail::format_arg("SolverConfig", name, v));
  };
  positive("tol_mm", tol_mm);
  positive("tol_bcd", tol_bcd);
  positive("tol_fp", tol_fp);
  positive("golden_tol", golden_tol);
  if (max_mm < 1) throw DomainError(detail::format_arg("SolverConfig", "max_mm", max_mm));
  if (max_bcd < 1) throw DomainError(detail::format_arg("SolverConfig", "max_bcd", max_bcd));
  if (max_fp < 1) throw DomainError(detail::format_arg("SolverConfig", "max_fp", max_fp));
  if (!(n_min >= 1)) throw DomainError(detail::format_arg("SolverConfig", "n_min", n_min));
  if (!(n_max >= n_min) || !std::isfinite(n_max))
    throw DomainError(detail::format_arg("SolverConfig", "n_max", n_max));
}

const char* to_string(TraceLayer layer) {
  switch (layer) {
    case TraceLayer::Init: return "init";
    case TraceLayer::MM: return "mm";
    case TraceLayer::BCD: return "bcd";
    case TraceLayer::FP: return "fp";
    case TraceLayer::Round: return "round";
  }
  return "?";
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::InfeasibleStart: return "infeasible_start";
    case SolveStatus::InfeasibleAtInteger: return "infeasible_at_integer";
  }
  return "?";
}

bool better_candidate(double r_d_a, double n_m_a, double n_k_a, double r_d_b, double n_m_b,
                      double n_k_b) {
  if (r_d_a != r_d_b) return r_d_a > r_d_b;
  if (n_m_a + n_k_a != n_m_b + n_k_b) return n_m_a + n_k_a < n_m_b + n_k_b;
  return n_m_a < n_m_b;
}

double erasure_lower_crossing(double d, double gamma, double target, Interval box) {
  auto ok = [&](double n) { return erasure_prob(n, d, gamma) <= target; };
  if (ok(box.lo)) return box.lo;
  if (!ok(box.hi)) return kInf;
  return bisect_boundary(ok, box.hi, box.lo);
}

double erasure_upper_crossing(double d, double gamma, double target, Interval box) {
  auto ok = [&](double n) { return erasure_prob(n, d, gamma) >= target; };
  if (ok(box.hi)) return box.hi;
  if (!ok(box.lo)) return -kInf;
  return bisect_boundary(ok, box.lo, box.hi);
}

Interval feasible_interval(Variable which, const LinkConfig& link, int d_m, int d_k,
                           double other_n, const Thresholds& th, const SolverConfig& cfg,
                           std::optional<double> incumbent) {
  const Interval box{cfg.n_min, cfg.n_max};
  const double g_bob = link.snr(Receiver::Bob);
  const double g_eve = link.snr(Receiver::Eve);

  Interval iv = box;
  if (which == Variable::Ciphertext) {
    iv.lo = std::max(erasure_lower_crossing(d_m, g_bob, th.eps_bob_m_max, box),
                     erasure_lower_crossing(d_m, g_eve, th.eps_eve_m_max, box));
  } else {
    iv.lo = erasure_lower_crossing(d_k, g_bob, th.eps_bob_k_max, box);
    iv.hi = erasure_upper_crossing(d_k, g_eve, th.eps_eve_k_min, box);
  }
  if (iv.empty()) return Interval::none();

  auto throughput_ok = [&](double x) {
    const CodeAllocation alloc = make_alloc(which, d_m, d_k, x, other_n);
    return evaluate(link, alloc).throughput >= th.throughput_min;
  };
  if (iv.width() == 0.0) return throughput_ok(iv.lo) ? iv : Interval::none();

  constexpr int kSamples = 64;
  std::vector<double> xs;
  xs.reserve(kSamples + 2);
  for (int i = 0; i <= kSamples; ++i) xs.push_back(iv.lo + iv.width() * i / kSamples);
  xs.back() = iv.hi;
  if (incumbent && iv.contains(*incumbent)) xs.push_back(*incumbent);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<char> ok(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ok[i] = throughput_ok(xs[i]);

  // Maximal runs of consecutive feasible samples.
  struct Run {
    std::size_t first, last;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!ok[i]) continue;
    if (!runs.empty() && runs.back().last + 1 == i) {
      runs.back().last = i;
    } else {
      runs.push_back({i, i});
    }
  }
  if (runs.empty()) return Interval::none();

  const Run* chosen = nullptr;
  if (incumbent) {
    for (const Run& r : runs)
      if (xs[r.first] <= *incumbent && *incumbent <= xs[r.last]) chosen = &r;
  }
  if (!chosen) {
    chosen = &runs.front();
    for (const Run& r : runs)
      if (xs[r.last] - xs[r.first] > xs[chosen->last] - xs[chosen->first]) chosen = &r;
  }

  Interval out{xs[chosen->first], xs[chosen->last]};
  if (chosen->first > 0) out.lo = bisect_boundary(throughput_ok, out.lo, xs[chosen->first - 1]);
  if (chosen->last + 1 < xs.size())
    out.hi = bisect_boundary(throughput_ok, out.hi, xs[chosen->last + 1]);
  return out;
}

QuadraticTransform fp_y_closed_form(double A, double B) {
  if (!(A >= 0) || !std::isfinite(A)) throw DomainError(detail::format_arg("fp_y_closed_form", "A", A));
  if (!(B > 0) || !std::isfinite(B)) throw DomainError(detail::format_arg("fp_y_closed_form", "B", B));
  const double y = std::sqrt(A) * B;
  return {y, fp_transform(y, A, B)};
}

double fp_transform(double y, double A, double B) {
  return 2.0 * y * std::sqrt(A) - y * y / B;
}

FpOutcome fp_solve_key(const BoundAnchor& anchor, const LinkConfig& link, double n_m_fixed,
                       const Thresholds& thresholds, const SolverConfig& config,
                       std::optional<double> n_k_start, IterationTrace* trace) {
  return fp_loop(anchor, link, Variable::Key, n_m_fixed, thresholds, config, n_k_start, trace);
}

FpOutcome fp_solve_msg(const BoundAnchor& anchor, const LinkConfig& link, double n_k_fixed,
                       const Thresholds& thresholds, const SolverConfig& config,
                       std::optional<double> n_m_start, IterationTrace* trace) {
  return fp_loop(anchor, link, Variable::Ciphertext, n_k_fixed, thresholds, config, n_m_start,
                 trace);
}

SolveResult solve(const LinkConfig& link, int d_m, int d_k, const Thresholds& thresholds,
                  const SolverConfig& config) {
  link.validate();
  thresholds.validate();
  config.validate();
  if (d_m < 1) throw DomainError(detail::format_arg("solve", "d_m", d_m));
  if (d_k < 1) throw DomainError(detail::format_arg("solve", "d_k", d_k));

  SolveResult res;
  IterationTrace& trace = res.trace;

  const std::optional<Point> init = initial_point(link, d_m, d_k, thresholds, config);
  if (!init) {
    res.status = SolveStatus::InfeasibleStart;
    return res;
  }
  double n_m = init->n_m;
  double n_k = init->n_k;
  const double init_rd = true_rd(link, d_m, d_k, n_m, n_k);
  trace.push_back({TraceLayer::Init, 0, n_m, n_k, std::numeric_limits<double>::quiet_NaN(),
                   init_rd, init_rd});

  BoundAnchor anchor = make_anchor(link, d_m, d_k, n_m, n_k);
  double anchor_value = surrogate_terms(n_m, n_k, anchor).value();
  trace.push_back({TraceLayer::MM, 0, n_m, n_k, std::numeric_limits<double>::quiet_NaN(),
                   anchor_value, anchor.snapshot.r_d});

  for (int q = 1; q <= config.max_mm; ++q) {
    res.mm_iterations = q;
    double bcd_prev = anchor_value;
    for (int t = 1; t <= config.max_bcd; ++t) {
      ++res.bcd_iterations;
      const FpOutcome key = fp_solve_key(anchor, link, n_m, thresholds, config, n_k, &trace);
      if (key.feasible) n_k = key.n;
      const FpOutcome msg = fp_solve_msg(anchor, link, n_k, thresholds, config, n_m, &trace);
      if (msg.feasible) n_m = msg.n;
      const double value = surrogate_terms(n_m, n_k, anchor).value();
      trace.push_back({TraceLayer::BCD, t, n_m, n_k, std::numeric_limits<double>::quiet_NaN(),
                       value, true_rd(link, d_m, d_k, n_m, n_k)});
      const double rel = relative_improvement(bcd_prev, value);
      bcd_prev = value;
      if (rel <= config.tol_bcd) break;
    }
    anchor = make_anchor(link, d_m, d_k, n_m, n_k);
    const double value = surrogate_terms(n_m, n_k, anchor).value();
    trace.push_back({TraceLayer::MM, q, n_m, n_k, std::numeric_limits<double>::quiet_NaN(), value,
                     anchor.snapshot.r_d});
    const double rel = relative_improvement(anchor_value, value);
    anchor_value = value;
    if (rel <= config.tol_mm) break;
  }
  res.n_m_continuous = n_m;
  res.n_k_continuous = n_k;

  // Integer rounding over the neighbors of the continuous optimum, plus any
  // integral iterate already visited.
  const int lo = static_cast<int>(std::ceil(config.n_min));
  const int hi = static_cast<int>(std::floor(config.n_max));
  std::set<std::pair<int, int>> visited;
  for (const TraceRecord& r : trace) {
    if (r.n_m == std::floor(r.n_m) && r.n_k == std::floor(r.n_k))
      visited.insert({static_cast<int>(r.n_m), static_cast<int>(r.n_k)});
  }
  for (int radius : {1, 2}) {
    std::set<std::pair<int, int>> candidates = visited;
    for (int a : integer_neighbors(n_m, radius, lo, hi))
      for (int b : integer_neighbors(n_k, radius, lo, hi)) candidates.insert({a, b});

    bool found = false;
    int index = 0;
    for (const auto& [a, b] : candidates) {
      const CodeAllocation alloc{d_m, d_k, static_cast<double>(a), static_cast<double>(b)};
      const ErasureProfile p = evaluate(link, alloc);
      trace.push_back({TraceLayer::Round, index++, alloc.n_m, alloc.n_k,
                       std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::quiet_NaN(), p.r_d});
      if (!check_feasible(p, alloc, thresholds).feasible) continue;
      if (!found || better_candidate(p.r_d, a, b, res.profile.r_d, res.n_m_opt, res.n_k_opt)) {
        found = true;
        res.n_m_opt = a;
        res.n_k_opt = b;
        res.profile = p;
      }
    }
    if (found) {
      if (config.integer_polish) {
        int index = static_cast<int>(candidates.size());
        for (bool moved = true; moved;) {
          moved = false;
          const int a0 = res.n_m_opt;
          const int b0 = res.n_k_opt;
          for (int da = -2; da <= 2; ++da) {
            for (int db = -2; db <= 2; ++db) {
              const int a = a0 + da;
              const int b = b0 + db;
              if ((da == 0 && db == 0) || a < lo || a > hi || b < lo || b > hi) continue;
              const CodeAllocation alloc{d_m, d_k, static_cast<double>(a), static_cast<double>(b)};
              const ErasureProfile p = evaluate(link, alloc);
              if (!check_feasible(p, alloc, thresholds).feasible) continue;
              if (better_candidate(p.r_d, a, b, res.profile.r_d, res.n_m_opt, res.n_k_opt)) {
                res.n_m_opt = a;
                res.n_k_opt = b;
                res.profile = p;
                moved = true;
              }
            }
          }
          if (moved)
            trace.push_back({TraceLayer::Round, index++, static_cast<double>(res.n_m_opt),
                             static_cast<double>(res.n_k_opt),
                             std::numeric_limits<double>::quiet_NaN(),
                             std::numeric_limits<double>::quiet_NaN(), res.profile.r_d});
        }
      }
      res.feasible = true;
      res.status = SolveStatus::Optimal;
      return res;
    }
  }
  res.status = SolveStatus::InfeasibleAtInteger;
  return res;
}

OracleResult grid_oracle(const LinkConfig& link, int d_m, int d_k, const Thresholds& thresholds,
                         const GridBox& box) {
  if (box.rows() < 1 || box.cols() < 1 || box.m_lo < 1 || box.k_lo < 1)
    throw DomainError("grid_oracle: empty or non-positive box");
  OracleResult out;
  out.box = box;
  out.r_d.resize(box.rows(), box.cols());
  out.feasible.resize(box.rows(), box.cols());
  out.profiles.reserve(static_cast<std::size_t>(box.rows()) * box.cols());
  for (int i = 0; i < box.rows(); ++i) {
    for (int j = 0; j < box.cols(); ++j) {
      const CodeAllocation alloc{d_m, d_k, static_cast<double>(box.m_lo + i),
                                 static_cast<double>(box.k_lo + j)};
      const ErasureProfile p = evaluate(link, alloc);
      const bool ok = check_feasible(p, alloc, thresholds).feasible;
      out.profiles.push_back(p);
      out.r_d(i, j) = p.r_d;
      out.feasible(i, j) = ok;
      if (ok && (!out.argmax || better_candidate(p.r_d, alloc.n_m, alloc.n_k, out.r_d_max,
                                                 out.argmax->n_m, out.argmax->n_k))) {
        out.argmax = alloc;
        out.r_d_max = p.r_d;
      }
    }
  }
  return out;
}

SolveResult baseline_pls(const LinkConfig& link, int d_m, const Thresholds& thresholds,
                         const SolverConfig& config) {
  link.validate();
  thresholds.validate();
  config.validate();
  SolveResult res;
  res.status = SolveStatus::InfeasibleStart;
  const int lo = static_cast<int>(std::ceil(config.n_min));
  const int hi = static_cast<int>(std::floor(config.n_max));
  for (int n = lo; n <= hi; ++n) {
    const CodeAllocation alloc{d_m, 0, static_cast<double>(n), 0.0};
    const ErasureProfile p = evaluate(link, alloc);
    if (!check_feasible(p, alloc, thresholds).feasible) continue;
    if (!res.feasible || p.eps_lf < res.profile.eps_lf) {
      res.feasible = true;
      res.status = SolveStatus::Optimal;
      res.n_m_opt = n;
      res.profile = p;
    }
  }
  res.n_m_continuous = res.n_m_opt;
  if (res.feasible)
    res.trace.push_back({TraceLayer::Round, 0, static_cast<double>(res.n_m_opt), 0.0,
                         std::numeric_limits<double>::quiet_NaN(),
                         std::numeric_limits<double>::quiet_NaN(), res.profile.r_d});
  return res;
}

}  // namespace pld
