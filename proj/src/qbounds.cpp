#include "pld/qbounds.hpp"

namespace pld {

BoundAnchor make_anchor(const LinkConfig& link, int d_m, int d_k, double n_m_hat,
                        double n_k_hat) {
  if (d_k < 1) throw DomainError("make_anchor: the surrogate needs an active key (d_k >= 1)");
  BoundAnchor anchor;
  anchor.n_m_hat = n_m_hat;
  anchor.n_k_hat = n_k_hat;
  anchor.d_m = d_m;
  anchor.d_k = d_k;
  anchor.gamma_bob = link.snr(Receiver::Bob);
  anchor.gamma_eve = link.snr(Receiver::Eve);
  anchor.omega_bob_m = omega<double>(n_m_hat, d_m, anchor.gamma_bob);
  anchor.omega_eve_k = omega<double>(n_k_hat, d_k, anchor.gamma_eve);
  auto limited = [](double w) { return std::clamp(w, -kMaxAnchorOmega, kMaxAnchorOmega); };
  anchor.bob_m = lower_bound_coeffs(limited(anchor.omega_bob_m));
  anchor.eve_k = lower_bound_coeffs(limited(anchor.omega_eve_k));
  anchor.snapshot = evaluate(link, CodeAllocation{d_m, d_k, n_m_hat, n_k_hat});
  return anchor;
}

SurrogateTerms surrogate_terms(double n_m, double n_k, const BoundAnchor& anchor) {
  const double d_m = anchor.d_m;
  const double d_k = anchor.d_k;
  SurrogateTerms t;
  t.eps_hat_bob_m =
      std::clamp(epsilon_hat(n_m, d_m, anchor.gamma_bob, anchor.bob_m), 0.0, 1.0);
  t.eps_bob_k = erasure_prob(n_k, d_k, anchor.gamma_bob);
  t.eps_eve_m = erasure_prob(n_m, d_m, anchor.gamma_eve);
  t.eps_hat_eve_k =
      std::clamp(epsilon_hat(n_k, d_k, anchor.gamma_eve, anchor.eve_k), 0.0, 1.0);
  return t;
}

double rd_surrogate(const CodeAllocation& alloc, const LinkConfig& link,
                    const BoundAnchor& anchor) {
  if (alloc.d_m != anchor.d_m || alloc.d_k != anchor.d_k)
    throw DomainError("rd_surrogate: payload sizes differ from the anchor's");
  if (link.snr(Receiver::Bob) != anchor.gamma_bob || link.snr(Receiver::Eve) != anchor.gamma_eve)
    throw DomainError("rd_surrogate: link differs from the anchor's");
  alloc.validate();
  return surrogate_terms(alloc.n_m, alloc.n_k, anchor).value();
}

}  // namespace pld
