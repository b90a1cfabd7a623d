#ifndef PLD_TESTS_HP_ORACLE_HPP
#define PLD_TESTS_HP_ORACLE_HPP

// 50-digit reference formulas, written independently of the library code.

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using hp = boost::multiprecision::cpp_bin_float_50;

inline hp q(const hp& x) { return erfc(x / sqrt(hp(2))) / 2; }

inline hp pdf(const hp& x) {
  return exp(-x * x / 2) / sqrt(2 * boost::math::constants::pi<hp>());
}

inline hp capacity(const hp& g) { return log(1 + g) / log(hp(2)); }

inline hp dispersion(const hp& g) { return 1 - 1 / ((1 + g) * (1 + g)); }

inline hp omega(const hp& n, const hp& d, const hp& g) {
  return sqrt(n / dispersion(g)) * (capacity(g) - d / n) * log(hp(2));
}

inline hp erasure(const hp& n, const hp& d, const hp& g) { return q(omega(n, d, g)); }

inline hp db(const hp& x) { return pow(hp(10), x / 10); }

struct Profile {
  hp bob_m, bob_k, eve_m, eve_k;

  hp eps_lf() const {
    return 1 - (1 - bob_m) * (1 - bob_k) * (1 - (1 - eve_m) * (1 - eve_k));
  }
  hp r_d() const { return (1 - (1 - bob_m) * bob_k) * (1 - eve_m) * eve_k; }
};

inline Profile profile(const hp& g_bob, const hp& g_eve, int d_m, int d_k, const hp& n_m,
                       const hp& n_k) {
  return {erasure(n_m, d_m, g_bob), erasure(n_k, d_k, g_bob), erasure(n_m, d_m, g_eve),
          erasure(n_k, d_k, g_eve)};
}

inline double rel_err(double got, const hp& want) {
  return static_cast<double>(abs((hp(got) - want) / want));
}

}  // namespace oracle

#endif  // PLD_TESTS_HP_ORACLE_HPP
