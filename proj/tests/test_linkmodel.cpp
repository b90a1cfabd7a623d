#include <doctest.h>

#include "pld/linkmodel.hpp"

using namespace pld;

TEST_CASE("XOR cipher") {
  CHECK(encrypt(0xab, 0x00, 8) == 0xab);
  for (Word p = 0; p < 256; ++p)
    for (Word k = 0; k < 256; ++k) CHECK(decrypt(encrypt(p, k, 8), k, 8) == p);
  // Distinct keys never decrypt a ciphertext to the same plaintext.
  for (Word m = 0; m < 256; m += 17)
    for (Word k = 0; k < 256; ++k)
      for (Word k2 = 0; k2 < 256; ++k2)
        if (k != k2) CHECK(decrypt(m, k, 8) != decrypt(m, k2, 8));
  CHECK_THROWS_AS(encrypt(0x100, 0x1, 8), DomainError);
  CHECK_THROWS_AS(decrypt(0x1, 0x100, 8), DomainError);
  CHECK_THROWS_AS(encrypt(0x1, 0x1, 17), DomainError);
}

TEST_CASE("validate_codebook") {
  SUBCASE("small XOR book is exhaustively valid") {
    const CodebookVerdict v = validate_codebook(ToyCodebook::xor_book(4));
    CHECK(v.valid);
    CHECK(v.exhaustive);
    CHECK(v.violation.empty());
  }
  SUBCASE("exhaustive at d = 8") {
    const CodebookVerdict v = validate_codebook(ToyCodebook::xor_book(8));
    CHECK(v.valid);
    CHECK(v.exhaustive);
    CHECK(v.checks == 256u * 256u + 256u * 256u * 255u);
  }
  SUBCASE("d = 16 through the sampled path") {
    const CodebookVerdict v = validate_codebook(ToyCodebook::xor_book(16), 7, 1'000'000);
    CHECK(v.valid);
    CHECK_FALSE(v.exhaustive);
    CHECK(v.checks == 1'000'000u);
  }
  SUBCASE("a cipher that ignores the low key bit is caught with a witness") {
    ToyCodebook bad = ToyCodebook::xor_book(8);
    bad.kind = CipherKind::Custom;
    bad.f = [](Word p, Word k) { return p ^ (k & ~Word{1}); };
    bad.f_inv = [](Word m, Word k) { return m ^ (k & ~Word{1}); };
    const CodebookVerdict v = validate_codebook(bad);
    CHECK_FALSE(v.valid);
    REQUIRE(v.witness);
    CHECK(v.witness->k != v.witness->k_other);
    CHECK(bad.f_inv(v.witness->m, v.witness->k) == bad.f_inv(v.witness->m, v.witness->k_other));
  }
  SUBCASE("the same broken cipher at d = 12 is caught by sampling") {
    ToyCodebook bad = ToyCodebook::xor_book(12);
    bad.kind = CipherKind::Custom;
    bad.f = [](Word p, Word k) { return p ^ (k & 0xffe); };
    bad.f_inv = [](Word m, Word k) { return m ^ (k & 0xffe); };
    const CodebookVerdict v = validate_codebook(bad, 3, 100'000);
    CHECK_FALSE(v.valid);
    CHECK(v.witness);
  }
  SUBCASE("a non-inverting pair is reported") {
    ToyCodebook bad = ToyCodebook::xor_book(6);
    bad.kind = CipherKind::Custom;
    bad.f_inv = [](Word m, Word k) { return (m ^ k) ^ 1; };
    const CodebookVerdict v = validate_codebook(bad);
    CHECK_FALSE(v.valid);
    CHECK(v.violation.find("invert") != std::string::npos);
  }
}

TEST_CASE("RepetitionCode") {
  const RepetitionCode code{3, 2};
  CHECK(code.length() == 6);
  CHECK(code.d_max() == 1);
  CHECK(code.encode(0b00) == 0b000000);
  CHECK(code.encode(0b01) == 0b000111);
  CHECK(code.encode(0b10) == 0b111000);
  CHECK(code.encode(0b11) == 0b111111);
  CHECK(code.codebook().size() == 4u);
  CHECK(RepetitionCode{5, 1}.d_max() == 2);
  CHECK_THROWS_AS(code.encode(4), DomainError);
  CHECK_THROWS_AS((RepetitionCode{0, 2}.validate()), DomainError);
}

TEST_CASE("generate_litter") {
  SUBCASE("single all-zero codeword with radius 0 accepts any nonzero word") {
    const LitterSet s = generate_litter({0b0000}, 4, 0, 15, 1);
    CHECK(s.litter.size() == 15u);
    for (Word l : s.litter) CHECK(l != 0);
    CHECK(validate_litter(s).valid);
  }
  SUBCASE("radius equal to the length is infeasible") {
    CHECK_THROWS_AS(generate_litter({0b0000}, 4, 4, 1, 1), LitterGenerationError);
  }
  SUBCASE("3-fold repetition of 2-bit keys, radius 1, against exhaustive distances") {
    const RepetitionCode code{3, 2};
    const LitterSet s = generate_litter(code.codebook(), code.length(), code.d_max(), 4, 5);
    CHECK(s.litter.size() == 4u);
    // Exhaustive oracle: the admissible words are exactly those whose two
    // 3-bit blocks both have weight 1 or 2.
    int admissible = 0;
    for (Word w = 0; w < 64; ++w) {
      bool far = true;
      for (Word c : code.codebook()) far = far && hamming(w, c) > 1;
      const int lo = __builtin_popcountll(w & 7), hi = __builtin_popcountll(w >> 3);
      CHECK(far == (lo % 3 != 0 && hi % 3 != 0));
      admissible += far;
    }
    CHECK(admissible == 36);
    for (Word l : s.litter)
      for (Word c : code.codebook()) CHECK(hamming(l, c) > 1);
  }
  SUBCASE("deterministic under the seed") {
    const RepetitionCode code{5, 3};
    const LitterSet a = generate_litter(code.codebook(), code.length(), code.d_max(), 20, 99);
    const LitterSet b = generate_litter(code.codebook(), code.length(), code.d_max(), 20, 99);
    CHECK(a.litter == b.litter);
  }
  SUBCASE("asking for more distinct words than exist runs out of attempts") {
    CHECK_THROWS_AS(generate_litter({0b00}, 2, 0, 4, 1), LitterGenerationError);
  }
}

TEST_CASE("validate_litter reports the offending pair") {
  const RepetitionCode code{3, 2};
  LitterSet s = generate_litter(code.codebook(), code.length(), code.d_max(), 4, 5);
  s.litter.push_back(0b111110);
  const LitterVerdict v = validate_litter(s);
  CHECK_FALSE(v.valid);
  REQUIRE(v.witness);
  CHECK(v.witness->litter_word == 0b111110);
  CHECK(v.witness->key_codeword == 0b111111);
  CHECK(v.witness->key_index == 3u);
  CHECK(v.witness->distance == 1);
}

TEST_CASE("classify") {
  CHECK(classify(false, false) == Outcome::Perception);
  CHECK(classify(true, false) == Outcome::Loss);
  CHECK(classify(true, true) == Outcome::Loss);
  CHECK(classify(false, true) == Outcome::Deception);
}

namespace {

ErasureProfile profile_of(double bm, double bk, double em, double ek) {
  ErasureProfile p;
  p.eps = {bm, bk, em, ek};
  p.eps_lf = leakage_failure(p.eps);
  p.r_d = deception_rate(p.eps);
  return p;
}

}  // namespace

TEST_CASE("simulate_outcomes") {
  SUBCASE("no erasures") {
    const OutcomeCounts c = simulate_outcomes(profile_of(0, 0, 0, 0), 10'000, 1);
    CHECK(c.bob.perception == 10'000u);
    CHECK(c.eve.perception == 10'000u);
    CHECK(c.eve.deception == 0u);
    CHECK(c.effective_deception == 0u);
  }
  SUBCASE("certain ciphertext loss") {
    const OutcomeCounts c = simulate_outcomes(profile_of(1, 0.3, 1, 0.6), 10'000, 1);
    CHECK(c.bob.loss == 10'000u);
    CHECK(c.eve.loss == 10'000u);
  }
  SUBCASE("outcomes partition every trial") {
    const OutcomeCounts c = simulate_outcomes(profile_of(0.2, 0.3, 0.4, 0.5), 100'001, 3);
    CHECK(c.trials == 100'001u);
    CHECK(c.bob.total() == c.trials);
    CHECK(c.eve.total() == c.trials);
  }
  SUBCASE("seed determinism and thread independence") {
    const ErasureProfile p = profile_of(0.1, 0.2, 0.3, 0.4);
    const OutcomeCounts a = simulate_outcomes(p, 300'000, 42, 1);
    const OutcomeCounts b = simulate_outcomes(p, 300'000, 42, 3);
    CHECK(a.effective_deception == b.effective_deception);
    CHECK(a.leakage_failure == b.leakage_failure);
    CHECK(a.bob.loss == b.bob.loss);
    CHECK(a.eve.deception == b.eve.deception);
    const OutcomeCounts c = simulate_outcomes(p, 300'000, 43, 1);
    CHECK(c.effective_deception != a.effective_deception);
  }
  SUBCASE("all-one-half profile converges to the analytic leakage failure") {
    const OutcomeCounts c = simulate_outcomes(profile_of(0.5, 0.5, 0.5, 0.5), 1'000'000, 8);
    const EmpiricalMetrics m = empirical_metrics(c);
    CHECK(within_binomial_3sigma(m.eps_lf_hat, 0.8125, c.trials));
    CHECK(within_binomial_3sigma(m.r_d_hat, 0.1875, c.trials));
  }
  CHECK_THROWS_AS(simulate_outcomes(profile_of(0, 0, 0, 0), 0, 1), DomainError);
  CHECK_THROWS_AS(simulate_outcomes(profile_of(1.5, 0, 0, 0), 10, 1), DomainError);
}

TEST_CASE("empirical_metrics") {
  OutcomeCounts zero;
  zero.trials = 100;
  CHECK(empirical_metrics(zero).r_d_hat == 0.0);

  OutcomeCounts one;
  one.trials = 1;
  CHECK(empirical_metrics(one).r_d_half_width >= 1.0);

  OutcomeCounts a, b;
  a.trials = 10'000;
  b.trials = 1'000'000;
  CHECK(empirical_metrics(a).r_d_half_width / empirical_metrics(b).r_d_half_width == doctest::Approx(10.0));
}
