#ifndef PLD_METRICS_HPP
#define PLD_METRICS_HPP

// Finite-blocklength link metrics for the two-receiver (Bob/Eve) wiretap
// setting: per-component erasure probabilities from the normal approximation
// and the composite reliability/deception figures built on top of them.
//
// Everything here is a pure function of its arguments and is templated on the
// scalar type so tests can rerun the same code path in extended precision.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pld/error.hpp"
#include "pld/qfunction.hpp"

namespace pld {

enum class Receiver { Bob, Eve };
enum class Component { Message, Key };

/// Deterministic link parameters. Gains are linear, powers in mW.
struct LinkConfig {
  double z_bob = 1.0;
  double z_eve = 0.1;
  double power = 5.0;
  double noise = 1.0;

  static LinkConfig from_db(double z_bob_db, double z_eve_db, double power_mw,
                            double noise_mw = 1.0);

  double snr(Receiver who) const;
  void validate() const;
};

/// Payload sizes (bits) and blocklengths (channel uses). Blocklengths are real
/// during relaxation and integral in final answers. d_k == 0 selects the
/// baseline mode without deceptive ciphering, which requires n_k == 0.
struct CodeAllocation {
  int d_m = 16;
  int d_k = 16;
  double n_m = 64.0;
  double n_k = 64.0;

  bool baseline() const { return d_k == 0; }
  void validate() const;
};

/// Constraint thresholds of the deception-rate maximization problem.
struct Thresholds {
  double eps_bob_m_max = 0.5;
  double eps_eve_m_max = 0.5;
  double eps_bob_k_max = 0.5;
  double eps_eve_k_min = 0.5;
  double throughput_min = 0.0;

  void validate() const;
};

/// The four component erasure probabilities.
template <typename Scalar = double>
struct Erasures {
  Scalar bob_m = 0;
  Scalar bob_k = 0;
  Scalar eve_m = 0;
  Scalar eve_k = 0;
};

struct ErasureProfile {
  Erasures<double> eps;
  double eps_lf = 0.0;
  double r_d = 0.0;
  double throughput = 0.0;
};

/// Signed slack per constraint; a constraint holds iff its slack is >= 0.
struct Feasibility {
  bool feasible = false;
  double bob_m = 0.0;
  double eve_m = 0.0;
  double bob_k = 0.0;
  double eve_k = 0.0;
  double throughput = 0.0;
};

template <typename Scalar>
Scalar db_to_linear(Scalar x_db) {
  if (!std::isfinite(x_db)) throw DomainError(detail::format_arg("db_to_linear", "x_db", x_db));
  using std::pow;
  return pow(Scalar(10), x_db / Scalar(10));
}

template <typename Scalar>
Scalar shannon_capacity(Scalar gamma) {
  if (!(gamma > 0) || !std::isfinite(gamma))
    throw DomainError(detail::format_arg("shannon_capacity", "gamma", gamma));
  using std::log1p;
  return log1p(gamma) / std::numbers::ln2_v<Scalar>;
}

/// V(gamma) = 1 - (1+gamma)^-2. Below gamma = 1 it is written as
/// gamma(2+gamma)/(1+gamma)^2 so small SNRs keep full relative precision.
template <typename Scalar>
Scalar dispersion(Scalar gamma) {
  if (!(gamma > 0) || std::isnan(gamma))
    throw DomainError(detail::format_arg("dispersion", "gamma", gamma));
  if (std::isinf(gamma)) return Scalar(1);
  const Scalar one_plus = Scalar(1) + gamma;
  if (gamma > Scalar(1)) {
    const Scalar inv = Scalar(1) / one_plus;
    return Scalar(1) - inv * inv;
  }
  return gamma * (Scalar(2) + gamma) / (one_plus * one_plus);
}

namespace detail {

template <typename Scalar>
void check_block(const char* op, Scalar n, Scalar d, Scalar gamma) {
  if (!(n > 0) || !std::isfinite(n)) throw DomainError(format_arg(op, "n", n));
  if (!(d >= 0) || !std::isfinite(d)) throw DomainError(format_arg(op, "d", d));
  if (!(gamma > 0) || !std::isfinite(gamma)) throw DomainError(format_arg(op, "gamma", gamma));
}

}  // namespace detail

/// Q-function argument of the normal approximation:
/// sqrt(n / V) * (C - d / n) * ln 2.
template <typename Scalar>
Scalar omega(Scalar n, Scalar d, Scalar gamma) {
  detail::check_block("omega", n, d, gamma);
  using std::sqrt;
  return sqrt(n / dispersion(gamma)) * (shannon_capacity(gamma) - d / n) *
         std::numbers::ln2_v<Scalar>;
}

/// d omega / d n.
template <typename Scalar>
Scalar omega_grad(Scalar n, Scalar d, Scalar gamma) {
  detail::check_block("omega_grad", n, d, gamma);
  using std::sqrt;
  const Scalar scale = std::numbers::ln2_v<Scalar> / sqrt(dispersion(gamma));
  return (shannon_capacity(gamma) / (2 * sqrt(n)) + d / (2 * n * sqrt(n))) * scale;
}

/// d^2 omega / d n^2 (non-positive).
template <typename Scalar>
Scalar omega_hess(Scalar n, Scalar d, Scalar gamma) {
  detail::check_block("omega_hess", n, d, gamma);
  using std::sqrt;
  const Scalar scale = std::numbers::ln2_v<Scalar> / sqrt(dispersion(gamma));
  const Scalar n32 = n * sqrt(n);
  return -(shannon_capacity(gamma) / (4 * n32) + 3 * d / (4 * n32 * n)) * scale;
}

inline constexpr double kErasureFloor = 1e-300;
inline constexpr double kErasureCeil = 1.0 - 1e-16;

/// Erasure probability Q(omega(n, d, gamma)), clamped away from exact 0 and 1.
template <typename Scalar>
Scalar erasure_prob(Scalar n, Scalar d, Scalar gamma) {
  const Scalar q = q_function(omega(n, d, gamma));
  return std::clamp(q, Scalar(kErasureFloor), Scalar(kErasureCeil));
}

/// d eps / d n = -phi(omega) * d omega / d n. Never positive.
template <typename Scalar>
Scalar erasure_prob_grad(Scalar n, Scalar d, Scalar gamma) {
  return -gaussian_pdf(omega(n, d, gamma)) * omega_grad(n, d, gamma);
}

/// d^2 eps / d n^2 = phi(w) * (w * w'^2 - w'').
template <typename Scalar>
Scalar erasure_prob_hess(Scalar n, Scalar d, Scalar gamma) {
  const Scalar w = omega(n, d, gamma);
  const Scalar g = omega_grad(n, d, gamma);
  return gaussian_pdf(w) * (w * g * g - omega_hess(n, d, gamma));
}

namespace detail {

template <typename Scalar>
void check_probability(const char* op, Scalar p) {
  if (!(p >= 0 && p <= 1)) throw DomainError(format_arg(op, "probability", p));
}

template <typename Scalar>
void check_probabilities(const char* op, const Erasures<Scalar>& e) {
  check_probability(op, e.bob_m);
  check_probability(op, e.bob_k);
  check_probability(op, e.eve_m);
  check_probability(op, e.eve_k);
}

}  // namespace detail

/// Probability that a receiver fails to recover both components.
template <typename Scalar>
Scalar non_perception(Scalar eps_m, Scalar eps_k) {
  detail::check_probability("non_perception", eps_m);
  detail::check_probability("non_perception", eps_k);
  return Scalar(1) - (Scalar(1) - eps_m) * (Scalar(1) - eps_k);
}

/// Probability that Bob does not perceive the plaintext or Eve does.
template <typename Scalar>
Scalar leakage_failure(const Erasures<Scalar>& e) {
  detail::check_probabilities("leakage_failure", e);
  const Scalar eve = Scalar(1) - (Scalar(1) - e.eve_m) * (Scalar(1) - e.eve_k);
  return Scalar(1) - (Scalar(1) - e.bob_m) * (Scalar(1) - e.bob_k) * eve;
}

/// Probability that Eve is deceived (ciphertext decoded, key erased) while Bob
/// is not.
template <typename Scalar>
Scalar deception_rate(const Erasures<Scalar>& e) {
  detail::check_probabilities("deception_rate", e);
  return (Scalar(1) - (Scalar(1) - e.bob_m) * e.bob_k) * (Scalar(1) - e.eve_m) * e.eve_k;
}

/// (1 - eps_lf) * d_m / (n_m + n_k), in bits per channel use.
double throughput(const CodeAllocation& alloc, double eps_lf);

ErasureProfile evaluate(const LinkConfig& link, const CodeAllocation& alloc);

/// Checks the message/key erasure thresholds and the throughput floor. For
/// baseline allocations (d_k == 0) only Bob's message threshold and the
/// throughput floor apply.
Feasibility check_feasible(const ErasureProfile& profile, const CodeAllocation& alloc,
                           const Thresholds& thresholds);

}  // namespace pld

#endif  // PLD_METRICS_HPP
