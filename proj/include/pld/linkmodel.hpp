#ifndef PLD_LINKMODEL_HPP
#define PLD_LINKMODEL_HPP

// Desk-scale model of deceptive ciphering: a toy cipher over short bit words,
// litter sequences for the key channel, and a Monte-Carlo simulator of the
// per-receiver decoding outcomes.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pld/metrics.hpp"

namespace pld {

using Word = std::uint64_t;

inline int hamming(Word a, Word b) { return __builtin_popcountll(a ^ b); }

/// Mask of the low `bits` bits. bits in [0, 64].
inline Word word_mask(int bits) { return bits >= 64 ? ~Word{0} : (Word{1} << bits) - 1; }

/// XOR cipher on d-bit words; decryption is the same operation.
Word encrypt(Word p, Word k, int d);
Word decrypt(Word m, Word k, int d);

enum class CipherKind { Xor, Custom };

/// Cipher family m = f(p, k) with its inverse. Plaintexts, ciphertexts and
/// keys are all full sets of d_p-, d_m- and d_k-bit words.
struct ToyCodebook {
  int d_p = 16;
  int d_m = 16;
  int d_k = 16;
  CipherKind kind = CipherKind::Xor;
  std::function<Word(Word, Word)> f;      // (p, k) -> m
  std::function<Word(Word, Word)> f_inv;  // (m, k) -> p

  static ToyCodebook xor_book(int d);
};

struct CodebookWitness {
  Word m = 0;
  Word k = 0;
  Word k_other = 0;  // equal to k for a failed round trip
};

struct CodebookVerdict {
  bool valid = false;
  bool exhaustive = false;
  std::uint64_t checks = 0;
  std::string violation;  // empty when valid
  std::optional<CodebookWitness> witness;
};

/// Checks that every ciphertext is a plaintext word, that f_inv inverts f, and
/// that decrypting one ciphertext under two different keys never yields the
/// same plaintext. Exhaustive when d <= 8. Above that the XOR book uses the
/// algebraic identity f_inv(m, k) ^ f_inv(m, k') = k ^ k' and both kinds
/// sample `samples` random triples.
CodebookVerdict validate_codebook(const ToyCodebook& book, std::uint64_t seed = 1,
                                  std::uint64_t samples = 1'000'000);

/// r-fold repetition code over key_bits-bit keys, bit i occupying
/// positions [i r, (i + 1) r) of the codeword.
struct RepetitionCode {
  int r = 3;
  int key_bits = 2;

  int length() const { return r * key_bits; }
  int d_max() const { return (r - 1) / 2; }
  Word encode(Word key) const;
  std::vector<Word> codebook() const;  // every key, in key order
  void validate() const;
};

struct LitterSet {
  std::vector<Word> key_codewords;
  int length = 0;
  int d_max = 0;
  std::vector<Word> litter;
};

class LitterGenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kMaxLitterAttempts = 1'000'000;

/// Draws `count` distinct length-bit words, each at Hamming distance > d_max
/// from every key codeword, by seeded rejection sampling.
LitterSet generate_litter(const std::vector<Word>& key_codewords, int length, int d_max,
                          std::size_t count, std::uint64_t seed);

struct LitterWitness {
  std::size_t key_index = 0;
  Word key_codeword = 0;
  Word litter_word = 0;
  int distance = 0;
};

struct LitterVerdict {
  bool valid = false;
  std::optional<LitterWitness> witness;  // first offending (k, l) pair
};

LitterVerdict validate_litter(const LitterSet& set);

enum class Outcome { Perception, Loss, Deception };

const char* to_string(Outcome outcome);

/// Both components decoded: perception. Ciphertext erased: loss, whatever
/// happened to the key. Ciphertext decoded with the key erased: deception.
Outcome classify(bool message_erased, bool key_erased);

struct ReceiverCounts {
  std::uint64_t perception = 0;
  std::uint64_t loss = 0;
  std::uint64_t deception = 0;

  std::uint64_t total() const { return perception + loss + deception; }
};

struct OutcomeCounts {
  std::uint64_t trials = 0;
  ReceiverCounts bob;
  ReceiverCounts eve;
  std::uint64_t effective_deception = 0;  // Eve deceived, Bob not
  std::uint64_t leakage_failure = 0;      // Bob does not perceive or Eve does
};

inline constexpr std::uint64_t kSimulationChunk = 1 << 16;

/// Independent Bernoulli erasures for each receiver and component. Trials are
/// split into fixed chunks with seeds derived from (seed, chunk index), so the
/// counts do not depend on `threads`.
OutcomeCounts simulate_outcomes(const ErasureProfile& profile, std::uint64_t trials,
                                std::uint64_t seed, unsigned threads = 1);

struct EmpiricalMetrics {
  double r_d_hat = 0.0;
  double eps_lf_hat = 0.0;
  double r_d_half_width = 0.0;
  double eps_lf_half_width = 0.0;
};

/// Point estimates with 3-sigma half-widths at the worst-case binomial
/// variance 1/4, i.e. 1.5 / sqrt(trials).
EmpiricalMetrics empirical_metrics(const OutcomeCounts& counts);

/// |estimate - p| <= 3 sqrt(p (1 - p) / trials).
bool within_binomial_3sigma(double estimate, double p, std::uint64_t trials);

}  // namespace pld

#endif  // PLD_LINKMODEL_HPP
