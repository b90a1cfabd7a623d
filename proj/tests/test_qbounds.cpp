#include <doctest.h>

#include <random>

#include "oracles/hp_oracle.hpp"
#include "pld/qbounds.hpp"

using namespace pld;
using oracle::hp;

TEST_CASE("q_function") {
  CHECK(q_function(0.0) == 0.5);
  for (double x : {0.5, 1.0, 2.0, 5.0}) CHECK(q_function(x) + q_function(-x) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(q_function(1.0) == doctest::Approx(0.15865525393145705).epsilon(1e-15));
  CHECK_THROWS_AS(q_function(std::numeric_limits<double>::infinity()), DomainError);
  CHECK_THROWS_AS(q_function(std::nan("")), DomainError);
}

TEST_CASE("q_function relative error against 50-digit erfc") {
  for (int i = -800; i <= 800; ++i) {
    const double x = i / 100.0;
    CAPTURE(x);
    CHECK(oracle::rel_err(q_function(x), oracle::q(hp(x))) <= 1e-12);
  }
  // Deep tail, still representable.
  for (double x : {10.0, 20.0, 30.0, 37.0})
    CHECK(oracle::rel_err(q_function(x), oracle::q(hp(x))) <= 1e-12);
}

TEST_CASE("gaussian_hazard") {
  SUBCASE("direct and continued-fraction paths agree where both are accurate") {
    for (double x : {1.0, 2.0, 4.0, 6.0, 8.0}) {
      CAPTURE(x);
      const double direct = detail::gaussian_hazard_direct(x);
      const double cf = detail::gaussian_hazard_continued_fraction(x);
      CHECK(std::abs(cf / direct - 1.0) < 1e-10);
    }
  }
  SUBCASE("continued fraction against the oracle ratio in the tail") {
    for (double x : {7.0, 10.0, 20.0, 30.0, 37.0, 60.0}) {
      CAPTURE(x);
      const hp want = oracle::pdf(hp(x)) / oracle::q(hp(x));
      CHECK(oracle::rel_err(gaussian_hazard(x), want) < 1e-13);
    }
  }
  SUBCASE("one value") {
    CHECK(gaussian_hazard(1.0) == doctest::Approx(1.525135276160981).epsilon(1e-14));
  }
}

TEST_CASE("bound_coeffs") {
  SUBCASE("anchor zero") {
    const BoundCoeffs<double> k = bound_coeffs(0.0);
    CHECK(k.a == doctest::Approx(0.79788456080286536).epsilon(1e-15));
    CHECK(k.b > 0.0);
    CHECK(k.anchor_omega == 0.0);
  }
  SUBCASE("c is Q minus b exp(-a x)") {
    for (double x : {-3.0, -1.0, 0.0, 0.7, 2.5, 5.0}) {
      const BoundCoeffs<double> k = bound_coeffs(x);
      CHECK(k.c == q_function(x) - k.b * std::exp(-k.a * x));
      CHECK(k.a > 0.0);
      CHECK(k.b > 0.0);
    }
  }
  SUBCASE("a is max(hazard, x)") {
    const BoundCoeffs<double> k = bound_coeffs(1.0);
    CHECK(k.a == doctest::Approx(1.525135276160981).epsilon(1e-12));
    // The hazard always exceeds x, so the max picks it.
    for (double x : {-2.0, 0.0, 3.0, 9.0, 30.0}) CHECK(bound_coeffs(x).a >= x);
  }
  SUBCASE("far negative anchors underflow a and are rejected with the anchor in the message") {
    try {
      bound_coeffs(-40.0);
      FAIL("expected a DomainError");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("-40") != std::string::npos);
    }
    CHECK_THROWS_AS(bound_coeffs(std::numeric_limits<double>::infinity()), DomainError);
  }
}

TEST_CASE("q_upper_bound") {
  for (double w_hat : {-2.0, 0.0, 1.0, 3.0, 8.0}) {
    CAPTURE(w_hat);
    const BoundCoeffs<double> k = bound_coeffs(w_hat);
    CHECK(std::abs(q_upper_bound(w_hat, k) - q_function(w_hat)) <= 1e-9);
    for (double dw : {-0.5, 0.5}) CHECK(q_upper_bound(w_hat + dw, k) >= q_function(w_hat + dw) - 1e-12);
  }
  CHECK(q_upper_bound(0.0, bound_coeffs(0.0)) == doctest::Approx(0.5).epsilon(1e-15));
  // Agrees with the raw b exp(-a w) + c form where that form is safe.
  const BoundCoeffs<double> k = bound_coeffs(0.8);
  CHECK(q_upper_bound(1.3, k) == doctest::Approx(k.b * std::exp(-k.a * 1.3) + k.c).epsilon(1e-13));
}

TEST_CASE("q_lower_bound") {
  for (double w_hat : {-8.0, -3.0, 0.0, 1.0, 3.0}) {
    CAPTURE(w_hat);
    const BoundCoeffs<double> k = lower_bound_coeffs(w_hat);
    CHECK(std::abs(q_lower_bound(w_hat, k) - q_function(w_hat)) <= 1e-9);
    for (double dw : {-0.5, 0.5}) CHECK(q_lower_bound(w_hat + dw, k) <= q_function(w_hat + dw) + 1e-12);
    CHECK(q_lower_bound(50.0, k) <= 1.0);
  }
  // Agrees with the raw 1 - b exp(a w) - c form.
  const BoundCoeffs<double> k = lower_bound_coeffs(-0.4);
  CHECK(q_lower_bound(-0.1, k) == doctest::Approx(1.0 - k.b * std::exp(k.a * -0.1) - k.c).epsilon(1e-13));
}

TEST_CASE("epsilon_hat") {
  const double g = 0.5, d = 16.0;
  const double n_hat = 60.0;
  const BoundCoeffs<double> k = lower_bound_coeffs(omega(n_hat, d, g));

  CHECK(std::abs(epsilon_hat(n_hat, d, g, k) - erasure_prob(n_hat, d, g)) <= 1e-9);
  for (double n = 16.0; n <= 128.0; n += 1.0) CHECK(epsilon_hat(n, d, g, k) <= erasure_prob(n, d, g) + 1e-12);

  SUBCASE("decreasing in n, i.e. increasing in -omega") {
    for (double n = 16.0; n <= 128.0; n += 4.0) CHECK(epsilon_hat_grad(n, d, g, k) <= 0.0);
  }
  SUBCASE("derivatives against central differences") {
    for (double n : {30.0, 60.0, 100.0}) {
      const double h = 1e-4 * n;
      const double fd1 = (epsilon_hat(n + h, d, g, k) - epsilon_hat(n - h, d, g, k)) / (2 * h);
      CHECK(std::abs(epsilon_hat_grad(n, d, g, k) / fd1 - 1.0) < 1e-6);
      const double fd2 = (epsilon_hat_grad(n + h, d, g, k) - epsilon_hat_grad(n - h, d, g, k)) / (2 * h);
      CHECK(std::abs(epsilon_hat_hess(n, d, g, k) / fd2 - 1.0) < 1e-5);
    }
  }
}

TEST_CASE("make_anchor and rd_surrogate") {
  const LinkConfig link = LinkConfig::from_db(0.0, -10.0, 5.0);
  const BoundAnchor anchor = make_anchor(link, 16, 16, 70.0, 30.0);
  CHECK(anchor.bob_m.anchor_omega == -omega(70.0, 16.0, link.snr(Receiver::Bob)));
  CHECK(anchor.eve_k.anchor_omega == -omega(30.0, 16.0, link.snr(Receiver::Eve)));

  const CodeAllocation at{16, 16, 70.0, 30.0};
  CHECK(std::abs(rd_surrogate(at, link, anchor) - evaluate(link, at).r_d) <= 1e-9);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const CodeAllocation a{16, 16, 16.0 + 5.6 * i, 16.0 + 5.6 * j};
      CHECK(rd_surrogate(a, link, anchor) <= evaluate(link, a).r_d + 1e-12);
    }

  SUBCASE("hatted terms are clamped at the point of use only") {
    // Far below the key anchor, the raw lower bound on Eve's key erasure is negative.
    const double raw = epsilon_hat(128.0, 16.0, link.snr(Receiver::Eve), anchor.eve_k);
    const SurrogateTerms t = surrogate_terms(70.0, 128.0, anchor);
    if (raw < 0.0) CHECK(t.eps_hat_eve_k == 0.0);
    CHECK(t.eps_hat_eve_k >= 0.0);
    CHECK(t.eps_hat_bob_m >= 0.0);
  }
  SUBCASE("mismatched inputs are rejected") {
    CHECK_THROWS_AS(rd_surrogate(CodeAllocation{24, 16, 70, 30}, link, anchor), DomainError);
    CHECK_THROWS_AS(rd_surrogate(at, LinkConfig::from_db(0.0, -12.0, 5.0), anchor), DomainError);
    CHECK_THROWS_AS(make_anchor(link, 16, 0, 70.0, 0.0), DomainError);
  }
  SUBCASE("anchors far in the tail stay finite") {
    const BoundAnchor deep = make_anchor(LinkConfig::from_db(10.0, -10.0, 20.0), 8, 16, 128.0, 20.0);
    CHECK(std::isfinite(deep.bob_m.a));
    CHECK(std::isfinite(rd_surrogate(CodeAllocation{8, 16, 100.0, 20.0}, LinkConfig::from_db(10.0, -10.0, 20.0), deep)));
  }
}

// Properties over seeded random draws.

TEST_CASE("sandwich on 1000 random pairs") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> anchor(-6.0, 6.0);
  std::uniform_real_distribution<double> offset(-2.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const double w_hat = anchor(rng);
    const double w = w_hat + offset(rng);
    const double q = q_function(w);
    CHECK(q_lower_bound(w, lower_bound_coeffs(w_hat)) <= q + 1e-12);
    CHECK(q_upper_bound(w, bound_coeffs(w_hat)) >= q - 1e-12);
  }
}

TEST_CASE("epsilon_hat concavity") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int concave_region = 0, convex_region = 0;
  for (int i = 0; i < 200; ++i) {
    const double g = 0.05 + 5.0 * u(rng);
    const double d = 8.0 + 32.0 * u(rng);
    const double n_hat = 16.0 + 112.0 * u(rng);
    const double w_hat = std::clamp(omega(n_hat, d, g), -kMaxAnchorOmega, kMaxAnchorOmega);
    const BoundCoeffs<double> k = lower_bound_coeffs(w_hat);
    const double n = 17.0 + 110.0 * u(rng);
    CAPTURE(w_hat);
    CAPTURE(n);

    // Always concave in omega.
    const double w = omega(n, d, g);
    CHECK(q_lower_bound(w + 0.01, k) - 2 * q_lower_bound(w, k) + q_lower_bound(w - 0.01, k) <= 1e-12);

    // In n the curvature is -a b e^{a w} (a w'^2 + w''); omega is concave in
    // n, so concavity needs a w'^2 >= -w''. Small a (anchors deep in the
    // tail) breaks it.
    const double pred = k.a * std::pow(omega_grad(n, d, g), 2) + omega_hess(n, d, g);
    const double second = epsilon_hat(n + 0.5, d, g, k) - 2 * epsilon_hat(n, d, g, k) + epsilon_hat(n - 0.5, d, g, k);
    if (pred > 1e-9) {
      CHECK(epsilon_hat_hess(n, d, g, k) <= 0.0);
      CHECK(second <= 1e-9);
      ++concave_region;
    } else if (pred < -1e-9) {
      CHECK(epsilon_hat_hess(n, d, g, k) >= 0.0);
      ++convex_region;
    }
  }
  CHECK(concave_region > 0);
  // Regression: with the touching lower bound, global concavity in n does not hold.
  CHECK(convex_region > 0);
}
