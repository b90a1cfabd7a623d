#include "pld/metrics.hpp"

namespace pld {

LinkConfig LinkConfig::from_db(double z_bob_db, double z_eve_db, double power_mw,
                               double noise_mw) {
  LinkConfig link{db_to_linear(z_bob_db), db_to_linear(z_eve_db), power_mw, noise_mw};
  link.validate();
  return link;
}

double LinkConfig::snr(Receiver who) const {
  return (who == Receiver::Bob ? z_bob : z_eve) * power / noise;
}

void LinkConfig::validate() const {
  auto positive = [](const char* name, double v) {
    if (!(v > 0) || !std::isfinite(v)) throw DomainError(detail::format_arg("LinkConfig", name, v));
  };
  positive("z_bob", z_bob);
  positive("z_eve", z_eve);
  positive("power", power);
  positive("noise", noise);
  positive("snr(bob)", snr(Receiver::Bob));
  positive("snr(eve)", snr(Receiver::Eve));
}

void CodeAllocation::validate() const {
  if (d_m < 1) throw DomainError(detail::format_arg("CodeAllocation", "d_m", d_m));
  if (d_k < 0) throw DomainError(detail::format_arg("CodeAllocation", "d_k", d_k));
  if (!(n_m > 0) || !std::isfinite(n_m))
    throw DomainError(detail::format_arg("CodeAllocation", "n_m", n_m));
  if (!(n_k >= 0) || !std::isfinite(n_k))
    throw DomainError(detail::format_arg("CodeAllocation", "n_k", n_k));
  if ((n_k == 0) != (d_k == 0))
    throw DomainError("CodeAllocation: n_k must be 0 exactly when d_k is 0");
}

void Thresholds::validate() const {
  detail::check_probability("Thresholds.eps_bob_m_max", eps_bob_m_max);
  detail::check_probability("Thresholds.eps_eve_m_max", eps_eve_m_max);
  detail::check_probability("Thresholds.eps_bob_k_max", eps_bob_k_max);
  detail::check_probability("Thresholds.eps_eve_k_min", eps_eve_k_min);
  if (!(throughput_min >= 0) || !std::isfinite(throughput_min))
    throw DomainError(detail::format_arg("Thresholds", "throughput_min", throughput_min));
}

double throughput(const CodeAllocation& alloc, double eps_lf) {
  const double total = alloc.n_m + alloc.n_k;
  if (!(total > 0)) throw DomainError(detail::format_arg("throughput", "n_m + n_k", total));
  detail::check_probability("throughput", eps_lf);
  return (1.0 - eps_lf) * alloc.d_m / total;
}

ErasureProfile evaluate(const LinkConfig& link, const CodeAllocation& alloc) {
  link.validate();
  alloc.validate();
  const double g_bob = link.snr(Receiver::Bob);
  const double g_eve = link.snr(Receiver::Eve);
  const double d_m = alloc.d_m;
  const double d_k = alloc.d_k;

  ErasureProfile out;
  out.eps.bob_m = erasure_prob(alloc.n_m, d_m, g_bob);
  out.eps.eve_m = erasure_prob(alloc.n_m, d_m, g_eve);
  if (!alloc.baseline()) {
    out.eps.bob_k = erasure_prob(alloc.n_k, d_k, g_bob);
    out.eps.eve_k = erasure_prob(alloc.n_k, d_k, g_eve);
  }
  out.eps_lf = leakage_failure(out.eps);
  out.r_d = deception_rate(out.eps);
  out.throughput = throughput(alloc, out.eps_lf);
  return out;
}

Feasibility check_feasible(const ErasureProfile& profile, const CodeAllocation& alloc,
                           const Thresholds& th) {
  Feasibility f;
  f.bob_m = th.eps_bob_m_max - profile.eps.bob_m;
  f.eve_m = th.eps_eve_m_max - profile.eps.eve_m;
  if (!alloc.baseline()) {
    f.bob_k = th.eps_bob_k_max - profile.eps.bob_k;
    f.eve_k = profile.eps.eve_k - th.eps_eve_k_min;
  }
  f.throughput = profile.throughput - th.throughput_min;
  // Eve must decode the ciphertext only for deception to be possible, so the
  // baseline ignores her message threshold (its slack is still reported).
  const bool eve_m_ok = alloc.baseline() || f.eve_m >= 0;
  f.feasible = f.bob_m >= 0 && eve_m_ok && f.bob_k >= 0 && f.eve_k >= 0 && f.throughput >= 0;
  return f;
}

}  // namespace pld
