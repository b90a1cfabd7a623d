#ifndef PLD_QBOUNDS_HPP
#define PLD_QBOUNDS_HPP

// Exponential bounds on the Gaussian tail that touch Q at a chosen anchor,
// and the minorizing surrogate of the deception rate built from them.
//
// For an anchor x the coefficients are
//   a(x) = max{ phi(x) / Q(x), x },
//   b(x) = exp(a x - x^2 / 2) / (sqrt(2 pi) a),
//   c(x) = Q(x) - b exp(-a x),
// and Q(w) <= b(x) exp(-a(x) w) + c(x) for every w, with equality at w = x.
// Reflecting through Q(w) = 1 - Q(-w) with coefficients built at -w_hat gives
// the lower bound 1 - b exp(a w) - c, which touches Q at w = w_hat.
//
// Both bounds are evaluated in the algebraically equivalent form
//   Q(anchor) -/+ (phi(anchor) / a) * expm1(...)
// because b alone overflows once the anchor exceeds ~37 and c suffers
// cancellation whenever a is tiny.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pld/error.hpp"
#include "pld/metrics.hpp"
#include "pld/qfunction.hpp"

namespace pld {

template <typename Scalar = double>
struct BoundCoeffs {
  Scalar a = 0;
  Scalar b = 0;
  Scalar c = 0;
  Scalar anchor_omega = 0;  // argument at which a, b, c were evaluated
  Scalar scale = 0;         // b * exp(-a * anchor_omega) = phi(anchor) / a
  Scalar q_anchor = 0;      // Q(anchor_omega)
  Scalar q_reflected = 0;   // Q(-anchor_omega)
};

/// Coefficients a(x), b(x), c(x) of the exponential tail bound anchored at x.
template <typename Scalar>
BoundCoeffs<Scalar> bound_coeffs(Scalar x) {
  if (!std::isfinite(x)) throw DomainError(detail::format_arg("bound_coeffs", "omega_hat", x));
  using std::exp;
  using std::log;
  BoundCoeffs<Scalar> k;
  k.anchor_omega = x;
  k.q_anchor = q_function(x);
  k.q_reflected = q_function(-x);
  k.a = std::max(gaussian_hazard(x), x);
  if (!(k.a > 0) || !std::isfinite(k.a))
    throw DomainError(detail::format_arg("bound_coeffs: a(omega_hat) underflow at", "omega_hat", x));
  const Scalar log_norm = Scalar(0.5) * log(Scalar(2) * std::numbers::pi_v<Scalar>);
  const Scalar log_b = -log_norm - log(k.a) + k.a * x - x * x / 2;
  if (log_b > log(std::numeric_limits<Scalar>::max()))
    throw DomainError(detail::format_arg("bound_coeffs: b(omega_hat) overflow at", "omega_hat", x));
  k.b = exp(log_b);
  k.scale = exp(log_b - k.a * x);
  k.c = k.q_anchor - k.b * exp(-k.a * x);
  return k;
}

/// Coefficients for the lower bound that touches Q at omega_hat, i.e. the
/// raw coefficients evaluated at -omega_hat.
template <typename Scalar>
BoundCoeffs<Scalar> lower_bound_coeffs(Scalar omega_hat) {
  return bound_coeffs(-omega_hat);
}

/// b exp(-a w) + c >= Q(w).
template <typename Scalar>
Scalar q_upper_bound(Scalar w, const BoundCoeffs<Scalar>& k) {
  using std::expm1;
  return k.q_anchor + k.scale * expm1(-k.a * (w - k.anchor_omega));
}

/// 1 - b exp(a w) - c <= Q(w), for coefficients built at -w_hat. May be
/// negative far above the touch point.
template <typename Scalar>
Scalar q_lower_bound(Scalar w, const BoundCoeffs<Scalar>& k) {
  using std::expm1;
  return k.q_reflected - k.scale * expm1(k.a * (w + k.anchor_omega));
}

/// Surrogate erasure probability: the lower bound evaluated at omega(n, d, gamma).
/// Not clamped to [0, 1].
template <typename Scalar>
Scalar epsilon_hat(Scalar n, Scalar d, Scalar gamma, const BoundCoeffs<Scalar>& k) {
  return q_lower_bound(omega(n, d, gamma), k);
}

template <typename Scalar>
Scalar epsilon_hat_grad(Scalar n, Scalar d, Scalar gamma, const BoundCoeffs<Scalar>& k) {
  using std::exp;
  const Scalar w = omega(n, d, gamma);
  return -k.scale * k.a * exp(k.a * (w + k.anchor_omega)) * omega_grad(n, d, gamma);
}

template <typename Scalar>
Scalar epsilon_hat_hess(Scalar n, Scalar d, Scalar gamma, const BoundCoeffs<Scalar>& k) {
  using std::exp;
  const Scalar w = omega(n, d, gamma);
  const Scalar g = omega_grad(n, d, gamma);
  return -k.scale * k.a * exp(k.a * (w + k.anchor_omega)) * (k.a * g * g + omega_hess(n, d, gamma));
}

/// Anchor omegas are limited to this magnitude when building coefficients;
/// beyond it b overflows and Q is below the erasure floor anyway.
inline constexpr double kMaxAnchorOmega = 37.0;

/// Minorization anchor (n_m_hat, n_k_hat) with the coefficients of the two
/// surrogate terms: Bob's ciphertext erasure and Eve's key erasure.
struct BoundAnchor {
  double n_m_hat = 0.0;
  double n_k_hat = 0.0;
  int d_m = 0;
  int d_k = 0;
  double gamma_bob = 0.0;
  double gamma_eve = 0.0;
  double omega_bob_m = 0.0;
  double omega_eve_k = 0.0;
  BoundCoeffs<double> bob_m;
  BoundCoeffs<double> eve_k;
  ErasureProfile snapshot;
};

BoundAnchor make_anchor(const LinkConfig& link, int d_m, int d_k, double n_m_hat,
                        double n_k_hat);

/// Factors of the surrogate at (n_m, n_k). The hatted terms are clamped to
/// [0, 1]; the other two are true erasure probabilities.
struct SurrogateTerms {
  double eps_hat_bob_m = 0.0;
  double eps_bob_k = 0.0;
  double eps_eve_m = 0.0;
  double eps_hat_eve_k = 0.0;

  /// 1 - (1 - eps_hat_bob_m) * eps_bob_k
  double bob_factor() const { return 1.0 - (1.0 - eps_hat_bob_m) * eps_bob_k; }
  /// (1 - eps_eve_m) * eps_hat_eve_k
  double eve_factor() const { return (1.0 - eps_eve_m) * eps_hat_eve_k; }
  double value() const { return bob_factor() * eve_factor(); }
};

SurrogateTerms surrogate_terms(double n_m, double n_k, const BoundAnchor& anchor);

/// Lower bound on the deception rate that touches it at the anchor.
double rd_surrogate(const CodeAllocation& alloc, const LinkConfig& link,
                    const BoundAnchor& anchor);

}  // namespace pld

#endif  // PLD_QBOUNDS_HPP
