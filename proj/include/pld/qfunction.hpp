#ifndef PLD_QFUNCTION_HPP
#define PLD_QFUNCTION_HPP

#include <cmath>
#include <limits>
#include <numbers>

#include "pld/error.hpp"

namespace pld {

/// Gaussian tail probability Q(x) = P(N(0,1) > x), evaluated through erfc.
template <typename Scalar>
Scalar q_function(Scalar x) {
  if (!std::isfinite(x)) throw DomainError(detail::format_arg("q_function", "x", x));
  using std::erfc;
  return Scalar(0.5) * erfc(x / std::numbers::sqrt2_v<Scalar>);
}

/// Standard normal density.
template <typename Scalar>
Scalar gaussian_pdf(Scalar x) {
  using std::exp;
  return exp(-x * x / Scalar(2)) * std::numbers::inv_sqrtpi_v<Scalar> /
         std::numbers::sqrt2_v<Scalar>;
}

namespace detail {

// phi(x) / Q(x) from the two special functions directly. Loses accuracy once
// Q(x) approaches the subnormal range (x > ~37).
template <typename Scalar>
Scalar gaussian_hazard_direct(Scalar x) {
  return gaussian_pdf(x) / q_function(x);
}

// phi(x) / Q(x) = x + 1/(x + 2/(x + 3/(x + ...))), the Laplace continued
// fraction for the Mills ratio, evaluated with the modified Lentz method.
// Converges for every x > 0; a few dozen terms suffice for x > 6.
template <typename Scalar>
Scalar gaussian_hazard_continued_fraction(Scalar x, int max_terms = 20000) {
  if (!(x > 0)) throw DomainError(format_arg("gaussian_hazard_continued_fraction", "x", x));
  constexpr Scalar tiny = std::numeric_limits<Scalar>::min() * 16;
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  // Mills ratio R = 1 / (x + 1/(x + 2/(x + ...))); Lentz on the tail t = x + K(k / x).
  Scalar f = x;
  Scalar c = x;
  Scalar d = 0;
  for (int k = 1; k <= max_terms; ++k) {
    const Scalar a = static_cast<Scalar>(k);
    d = x + a * d;
    if (d == 0) d = tiny;
    c = x + a / c;
    if (c == 0) c = tiny;
    d = Scalar(1) / d;
    const Scalar delta = c * d;
    f *= delta;
    if (std::abs(delta - Scalar(1)) <= eps) break;
  }
  return f;
}

}  // namespace detail

/// Hazard (inverse Mills ratio) phi(x)/Q(x). Switches to the continued
/// fraction above x = 6 where Q(x) drops below 1e-9.
template <typename Scalar>
Scalar gaussian_hazard(Scalar x) {
  if (!std::isfinite(x)) throw DomainError(detail::format_arg("gaussian_hazard", "x", x));
  if (x > Scalar(6)) return detail::gaussian_hazard_continued_fraction(x);
  return detail::gaussian_hazard_direct(x);
}

}  // namespace pld

#endif  // PLD_QFUNCTION_HPP
