#include "pld/linkmodel.hpp"

#include <algorithm>
#include <random>
#include <thread>
#include <unordered_set>

namespace pld {

namespace {

void check_word_bits(const char* op, int d) {
  if (d < 1 || d > 16) throw DomainError(detail::format_arg(op, "d", d));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

CodebookVerdict fail(CodebookVerdict v, std::string what, CodebookWitness w) {
  v.valid = false;
  v.violation = std::move(what);
  v.witness = w;
  return v;
}

}  // namespace

Word encrypt(Word p, Word k, int d) {
  check_word_bits("encrypt", d);
  const Word mask = word_mask(d);
  if (p > mask) throw DomainError(detail::format_arg("encrypt: plaintext wider than d, p", "p", p));
  if (k > mask) throw DomainError(detail::format_arg("encrypt: key wider than d, k", "k", k));
  return p ^ k;
}

Word decrypt(Word m, Word k, int d) {
  check_word_bits("decrypt", d);
  const Word mask = word_mask(d);
  if (m > mask) throw DomainError(detail::format_arg("decrypt: ciphertext wider than d, m", "m", m));
  if (k > mask) throw DomainError(detail::format_arg("decrypt: key wider than d, k", "k", k));
  return m ^ k;
}

ToyCodebook ToyCodebook::xor_book(int d) {
  check_word_bits("xor_book", d);
  ToyCodebook book;
  book.d_p = book.d_m = book.d_k = d;
  book.kind = CipherKind::Xor;
  book.f = [d](Word p, Word k) { return encrypt(p, k, d); };
  book.f_inv = [d](Word m, Word k) { return decrypt(m, k, d); };
  return book;
}

CodebookVerdict validate_codebook(const ToyCodebook& book, std::uint64_t seed,
                                  std::uint64_t samples) {
  check_word_bits("validate_codebook d_p", book.d_p);
  check_word_bits("validate_codebook d_m", book.d_m);
  check_word_bits("validate_codebook d_k", book.d_k);
  if (!book.f || !book.f_inv) throw DomainError("validate_codebook: cipher functions not set");

  CodebookVerdict v;
  if (book.d_m > book.d_p) {
    v.violation = "ciphertext words are longer than plaintext words";
    return v;
  }
  const Word p_mask = word_mask(book.d_p);
  const Word m_mask = word_mask(book.d_m);
  const Word k_mask = word_mask(book.d_k);
  const int d_max = std::max({book.d_p, book.d_m, book.d_k});

  if (d_max <= 8) {
    v.exhaustive = true;
    for (Word p = 0; p <= p_mask; ++p) {
      for (Word k = 0; k <= k_mask; ++k) {
        const Word m = book.f(p, k);
        ++v.checks;
        if (m > m_mask) return fail(v, "ciphertext outside the ciphertext set", {m, k, k});
        if (book.f_inv(m, k) != p) return fail(v, "decryption does not invert encryption", {m, k, k});
      }
    }
    // Distinct keys must give distinct plaintexts for every ciphertext.
    std::vector<Word> seen(p_mask + 1);
    std::vector<char> used(p_mask + 1);
    for (Word m = 0; m <= m_mask; ++m) {
      std::fill(used.begin(), used.end(), 0);
      for (Word k = 0; k <= k_mask; ++k) {
        const Word p = book.f_inv(m, k);
        if (p > p_mask) return fail(v, "decryption outside the plaintext set", {m, k, k});
        if (used[p]) return fail(v, "two keys decrypt to the same plaintext", {m, seen[p], k});
        used[p] = 1;
        seen[p] = k;
      }
      v.checks += (k_mask + 1) * k_mask;
    }
    v.valid = true;
    return v;
  }

  // XOR: f_inv(m, k) ^ f_inv(m, k') = k ^ k', nonzero whenever k != k'. The
  // sampled pass below still exercises the actual functions.
  std::mt19937_64 rng(seed);
  for (std::uint64_t i = 0; i < samples; ++i) {
    const Word p = rng() & p_mask;
    const Word m = rng() & m_mask;
    const Word k = rng() & k_mask;
    Word k2 = rng() & k_mask;
    if (k2 == k) k2 = (k + 1) & k_mask;
    ++v.checks;
    const Word c = book.f(p, k);
    if (c > m_mask) return fail(v, "ciphertext outside the ciphertext set", {c, k, k});
    if (book.f_inv(c, k) != p) return fail(v, "decryption does not invert encryption", {c, k, k});
    if (book.f_inv(m, k) == book.f_inv(m, k2))
      return fail(v, "two keys decrypt to the same plaintext", {m, k, k2});
  }
  v.valid = true;
  return v;
}

Word RepetitionCode::encode(Word key) const {
  validate();
  if (key > word_mask(key_bits))
    throw DomainError(detail::format_arg("RepetitionCode::encode", "key", key));
  Word out = 0;
  const Word block = word_mask(r);
  for (int i = 0; i < key_bits; ++i)
    if ((key >> i) & 1) out |= block << (i * r);
  return out;
}

std::vector<Word> RepetitionCode::codebook() const {
  validate();
  std::vector<Word> out;
  for (Word k = 0; k <= word_mask(key_bits); ++k) out.push_back(encode(k));
  return out;
}

void RepetitionCode::validate() const {
  if (r < 1) throw DomainError(detail::format_arg("RepetitionCode", "r", r));
  if (key_bits < 1 || key_bits > 16)
    throw DomainError(detail::format_arg("RepetitionCode", "key_bits", key_bits));
  if (length() > 64) throw DomainError(detail::format_arg("RepetitionCode", "length", length()));
}

LitterSet generate_litter(const std::vector<Word>& key_codewords, int length, int d_max,
                          std::size_t count, std::uint64_t seed) {
  if (length < 1 || length > 64)
    throw DomainError(detail::format_arg("generate_litter", "length", length));
  if (d_max < 0) throw DomainError(detail::format_arg("generate_litter", "d_max", d_max));
  if (key_codewords.empty()) throw DomainError("generate_litter: no key codewords");
  const Word mask = word_mask(length);
  for (Word c : key_codewords)
    if (c > mask) throw DomainError(detail::format_arg("generate_litter: codeword wider than length", "codeword", c));
  if (d_max >= length)
    throw LitterGenerationError("generate_litter: d_max >= codeword length, no word can be farther");

  LitterSet out{key_codewords, length, d_max, {}};
  std::unordered_set<Word> taken;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    bool placed = false;
    for (std::uint64_t attempt = 0; attempt < kMaxLitterAttempts && !placed; ++attempt) {
      const Word l = rng() & mask;
      if (taken.count(l)) continue;
      const bool far = std::all_of(key_codewords.begin(), key_codewords.end(),
                                   [&](Word c) { return hamming(c, l) > d_max; });
      if (!far) continue;
      out.litter.push_back(l);
      taken.insert(l);
      placed = true;
    }
    if (!placed)
      throw LitterGenerationError("generate_litter: no admissible word after " +
                                  std::to_string(kMaxLitterAttempts) + " attempts (word " +
                                  std::to_string(i) + ")");
  }
  return out;
}

LitterVerdict validate_litter(const LitterSet& set) {
  for (Word l : set.litter) {
    for (std::size_t i = 0; i < set.key_codewords.size(); ++i) {
      const int dist = hamming(set.key_codewords[i], l);
      if (dist <= set.d_max) return {false, LitterWitness{i, set.key_codewords[i], l, dist}};
    }
  }
  return {true, std::nullopt};
}

const char* to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Perception: return "perception";
    case Outcome::Loss: return "loss";
    case Outcome::Deception: return "deception";
  }
  return "?";
}

Outcome classify(bool message_erased, bool key_erased) {
  if (message_erased) return Outcome::Loss;
  return key_erased ? Outcome::Deception : Outcome::Perception;
}

namespace {

void tally(ReceiverCounts& c, Outcome o) {
  switch (o) {
    case Outcome::Perception: ++c.perception; break;
    case Outcome::Loss: ++c.loss; break;
    case Outcome::Deception: ++c.deception; break;
  }
}

OutcomeCounts simulate_chunk(const ErasureProfile& profile, std::uint64_t trials,
                             std::uint64_t chunk_seed) {
  std::mt19937_64 rng(chunk_seed);
  OutcomeCounts c;
  c.trials = trials;
  const Erasures<double>& e = profile.eps;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const bool bob_m = uniform01(rng) < e.bob_m;
    const bool bob_k = uniform01(rng) < e.bob_k;
    const bool eve_m = uniform01(rng) < e.eve_m;
    const bool eve_k = uniform01(rng) < e.eve_k;
    const Outcome bob = classify(bob_m, bob_k);
    const Outcome eve = classify(eve_m, eve_k);
    tally(c.bob, bob);
    tally(c.eve, eve);
    if (eve == Outcome::Deception && bob != Outcome::Deception) ++c.effective_deception;
    if (bob != Outcome::Perception || eve == Outcome::Perception) ++c.leakage_failure;
  }
  return c;
}

void accumulate(OutcomeCounts& into, const OutcomeCounts& c) {
  into.trials += c.trials;
  into.bob.perception += c.bob.perception;
  into.bob.loss += c.bob.loss;
  into.bob.deception += c.bob.deception;
  into.eve.perception += c.eve.perception;
  into.eve.loss += c.eve.loss;
  into.eve.deception += c.eve.deception;
  into.effective_deception += c.effective_deception;
  into.leakage_failure += c.leakage_failure;
}

}  // namespace

OutcomeCounts simulate_outcomes(const ErasureProfile& profile, std::uint64_t trials,
                                std::uint64_t seed, unsigned threads) {
  if (trials < 1) throw DomainError("simulate_outcomes: trials must be >= 1");
  detail::check_probabilities("simulate_outcomes", profile.eps);

  const std::uint64_t chunks = (trials + kSimulationChunk - 1) / kSimulationChunk;
  std::vector<OutcomeCounts> parts(chunks);
  auto run = [&](std::uint64_t i) {
    const std::uint64_t n = std::min(kSimulationChunk, trials - i * kSimulationChunk);
    parts[i] = simulate_chunk(profile, n, splitmix64(seed ^ splitmix64(i)));
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
  if (workers == 1) {
    for (std::uint64_t i = 0; i < chunks; ++i) run(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::uint64_t i = w; i < chunks; i += workers) run(i);
      });
    for (auto& t : pool) t.join();
  }

  OutcomeCounts total;
  for (const auto& p : parts) accumulate(total, p);
  return total;
}

EmpiricalMetrics empirical_metrics(const OutcomeCounts& counts) {
  if (counts.trials < 1) throw DomainError("empirical_metrics: trials must be >= 1");
  const double n = static_cast<double>(counts.trials);
  EmpiricalMetrics m;
  m.r_d_hat = counts.effective_deception / n;
  m.eps_lf_hat = counts.leakage_failure / n;
  m.r_d_half_width = m.eps_lf_half_width = 1.5 / std::sqrt(n);
  return m;
}

bool within_binomial_3sigma(double estimate, double p, std::uint64_t trials) {
  if (trials < 1) throw DomainError("within_binomial_3sigma: trials must be >= 1");
  return std::abs(estimate - p) <= 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

}  // namespace pld
