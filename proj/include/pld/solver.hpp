#ifndef PLD_SOLVER_HPP
#define PLD_SOLVER_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include <Eigen/Core>

#include "pld/error.hpp"
#include "pld/metrics.hpp"
#include "pld/qbounds.hpp"

namespace pld {

enum class InitStrategy { BoxMidpoint, CoarseGrid };

struct SolverConfig {
  double tol_mm = 2e-16;
  double tol_bcd = 2e-16;
  double tol_fp = 2e-16;
  int max_mm = 100;
  int max_bcd = 100;
  int max_fp = 100;  // shared by the key and ciphertext FP loops
  double n_min = 16.0;
  double n_max = 128.0;
  InitStrategy init = InitStrategy::CoarseGrid;
  double golden_tol = 1e-6;  // final bracket width relative to the search interval
  // After rounding, keep moving to the best feasible point within +-2 on
  // each axis until none improves. Needed when the throughput floor
  // couples n_m and n_k and the block updates stall on that boundary.
  bool integer_polish = true;

  void validate() const;
};

enum class TraceLayer { Init, MM, BCD, FP, Round };

const char* to_string(TraceLayer layer);

struct TraceRecord {
  TraceLayer layer = TraceLayer::Init;
  int index = 0;
  double n_m = 0.0;
  double n_k = 0.0;
  double y = std::numeric_limits<double>::quiet_NaN();  // FP auxiliary variable, FP rows only
  double surrogate = std::numeric_limits<double>::quiet_NaN();
  double r_d = 0.0;
};

using IterationTrace = std::vector<TraceRecord>;

enum class SolveStatus { Optimal, InfeasibleStart, InfeasibleAtInteger };

const char* to_string(SolveStatus status);

struct SolveResult {
  int n_m_opt = 0;
  int n_k_opt = 0;
  ErasureProfile profile;
  bool feasible = false;
  SolveStatus status = SolveStatus::InfeasibleStart;
  double n_m_continuous = 0.0;
  double n_k_continuous = 0.0;
  int mm_iterations = 0;
  int bcd_iterations = 0;
  IterationTrace trace;
  std::optional<double> oracle_gap;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool empty() const { return !(lo <= hi); }
  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }

  static Interval none() {
    return {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  }
};

enum class Variable { Ciphertext, Key };

/// Smallest n in `box` with erasure_prob(n, d, gamma) <= target, found by
/// bisection on the decreasing erasure curve; +inf when none exists.
double erasure_lower_crossing(double d, double gamma, double target, Interval box);

/// Largest n in `box` with erasure_prob(n, d, gamma) >= target; -inf when none exists.
double erasure_upper_crossing(double d, double gamma, double target, Interval box);

/// Closed set of values for one blocklength (the other held at `other_n`)
/// on which every erasure threshold and the throughput floor hold, within
/// [n_min, n_max]. The erasure thresholds give monotone bounds. The throughput
/// floor is located on a 65-point scan of that range and refined by bisection;
/// when it splits the range, the piece containing `incumbent` (else the
/// longest piece) is returned.
Interval feasible_interval(Variable which, const LinkConfig& link, int d_m, int d_k,
                           double other_n, const Thresholds& thresholds,
                           const SolverConfig& config,
                           std::optional<double> incumbent = std::nullopt);

struct QuadraticTransform {
  double y = 0.0;
  double value = 0.0;
};

/// Maximizer over y of 2 y sqrt(A) - y^2 / B, which is y = sqrt(A) B with value A B.
QuadraticTransform fp_y_closed_form(double A, double B);

/// Value of the quadratic transform 2 y sqrt(A) - y^2 / B at a given y.
double fp_transform(double y, double A, double B);

struct Maximum1d {
  double argmax = 0.0;
  double value = 0.0;
};

/// Golden-section search for the maximum of a unimodal function on a closed
/// interval. Stops when the bracket is narrower than tol * interval width and
/// returns its midpoint, or an endpoint when the endpoint scores higher.
template <typename F>
Maximum1d concave_max_1d(F&& f, Interval interval, double tol) {
  if (interval.empty()) throw SolverError("concave_max_1d: empty interval");
  auto eval = [&f](double x) {
    const double v = f(x);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << "concave_max_1d: objective is not finite at x = " << x << " (value " << v << ")";
      throw SolverError(os.str());
    }
    return v;
  };
  if (interval.width() == 0.0) return {interval.lo, eval(interval.lo)};

  constexpr double inv_phi = 1.0 / std::numbers::phi;
  const double stop = tol * interval.width();
  double a = interval.lo;
  double b = interval.hi;
  double c = b - (b - a) * inv_phi;
  double d = a + (b - a) * inv_phi;
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > stop) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * inv_phi;
      fd = eval(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * inv_phi;
      fc = eval(c);
    }
  }
  Maximum1d best{0.5 * (a + b), 0.0};
  best.value = eval(best.argmax);
  for (const double end : {interval.lo, interval.hi}) {
    const double v = eval(end);
    if (v > best.value) best = {end, v};
  }
  return best;
}

struct FpOutcome {
  bool feasible = false;
  double n = 0.0;               // incumbent of the free variable
  double value = 0.0;           // surrogate deception rate A * B at n
  double y = 0.0;               // auxiliary variable at n
  double transform_value = 0.0; // 2 y sqrt(A) - y^2 / B at (n, y)
  int iterations = 0;
  Interval interval;
  std::vector<double> history;  // A * B after each accepted inner step
};

/// Quadratic-transform inner loop over n_k with n_m fixed: alternately set
/// y = sqrt(A) B at the incumbent and maximize 2 y sqrt(A) - y^2 / B over the
/// feasible interval, where A = 1 - (1 - eps_hat_bob_m) eps_bob_k(n_k) and
/// B = (1 - eps_eve_m) eps_hat_eve_k(n_k).
FpOutcome fp_solve_key(const BoundAnchor& anchor, const LinkConfig& link, double n_m_fixed,
                       const Thresholds& thresholds, const SolverConfig& config,
                       std::optional<double> n_k_start = std::nullopt,
                       IterationTrace* trace = nullptr);

/// Same loop over n_m with n_k fixed and the roles exchanged:
/// A = (1 - eps_eve_m(n_m)) eps_hat_eve_k, B = 1 - (1 - eps_hat_bob_m(n_m)) eps_bob_k.
FpOutcome fp_solve_msg(const BoundAnchor& anchor, const LinkConfig& link, double n_k_fixed,
                       const Thresholds& thresholds, const SolverConfig& config,
                       std::optional<double> n_m_start = std::nullopt,
                       IterationTrace* trace = nullptr);

/// Maximizes the deception rate over integer blocklengths in the configured box.
SolveResult solve(const LinkConfig& link, int d_m, int d_k, const Thresholds& thresholds,
                  const SolverConfig& config);

struct GridBox {
  int m_lo = 16;
  int m_hi = 128;
  int k_lo = 16;
  int k_hi = 128;

  static GridBox square(int lo, int hi) { return {lo, hi, lo, hi}; }
  int rows() const { return m_hi - m_lo + 1; }
  int cols() const { return k_hi - k_lo + 1; }
};

struct OracleResult {
  GridBox box;
  std::optional<CodeAllocation> argmax;  // empty when no point is feasible
  double r_d_max = 0.0;
  Eigen::ArrayXXd r_d;                   // rows: n_m, cols: n_k
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> feasible;
  std::vector<ErasureProfile> profiles;  // row-major over (n_m, n_k)

  const ErasureProfile& profile(int n_m, int n_k) const {
    return profiles[static_cast<std::size_t>((n_m - box.m_lo) * box.cols() + (n_k - box.k_lo))];
  }
};

/// Exhaustive evaluation of every integer pair in the box.
OracleResult grid_oracle(const LinkConfig& link, int d_m, int d_k, const Thresholds& thresholds,
                         const GridBox& box);

/// Conventional physical-layer-security baseline without deceptive ciphering:
/// scan n_m over the box and minimize the leakage-failure probability subject
/// to Bob's ciphertext threshold and the throughput floor.
SolveResult baseline_pls(const LinkConfig& link, int d_m, const Thresholds& thresholds,
                         const SolverConfig& config);

/// Orders candidates by deception rate, then shorter total blocklength, then
/// shorter ciphertext blocklength. True when (a) is preferred over (b).
bool better_candidate(double r_d_a, double n_m_a, double n_k_a, double r_d_b, double n_m_b,
                      double n_k_b);

}  // namespace pld

#endif  // PLD_SOLVER_HPP
