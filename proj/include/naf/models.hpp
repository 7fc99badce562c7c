#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "naf/dist.hpp"

namespace naf {

using Sequence = std::vector<Token>;
using Corpus = std::vector<Sequence>;

// Anything that maps a context to a next-token distribution.
class NextTokenModel {
 public:
  virtual ~NextTokenModel() = default;
  virtual std::size_t vocab_size() const = 0;
  virtual TokenDist next(std::span<const Token> context) const = 0;
};

// Token id ranges of the toy vocabulary: ten digits, a separator, a canary
// prefix marker, a block of name tokens and the remaining text words.
struct VocabLayout {
  std::size_t n = 1024;
  Token separator = 10;
  Token canary_prefix = 11;
  Token name_begin = 16;
  std::size_t name_count = 400;
  Token word_begin = 416;
  std::size_t word_count = 608;

  static VocabLayout make(std::size_t n, std::size_t name_count);

  static constexpr Token digit(unsigned d) { return static_cast<Token>(d); }
  static constexpr bool is_digit(Token t) { return t < 10; }
  Token name(std::size_t i) const { return static_cast<Token>(name_begin + i); }
  Token word(std::size_t i) const { return static_cast<Token>(word_begin + i); }
};

// Add-one bigram counts with an add-one unigram fallback for contexts that
// never occurred.
class BackgroundTable {
 public:
  static std::shared_ptr<const BackgroundTable> fit(const Corpus& corpus, std::size_t n);

  std::size_t vocab_size() const noexcept { return n_; }
  // Normalized log-probabilities given the previous token.
  std::vector<double> log_probs(Token previous) const;

 private:
  struct Row {
    std::vector<std::pair<Token, std::uint32_t>> counts;  // sorted by token
    std::uint64_t total = 0;
  };
  std::size_t n_ = 0;
  std::vector<double> unigram_log_;
  std::unordered_map<Token, Row> rows_;
};

struct ToyModelOptions {
  std::size_t max_order = 14;  // longest memorized context
  // Dirichlet prior mass: memorized term = (count + alpha bg) / (total + alpha)
  double prior_strength = 1.0;
};

// Background bigram blended in log space with a memorization table of the
// partition's next-token counts. The memorization table is keyed by context
// suffixes of length 1..max_order. Every matched suffix contributes, each
// order smoothed toward the one below it and order 1 toward the background,
// so tokens never seen after the context keep the background's shape.
class ToyModel final : public NextTokenModel {
 public:
  std::size_t vocab_size() const override { return background_->vocab_size(); }
  TokenDist next(std::span<const Token> context) const override;

  double lambda() const noexcept { return lambda_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double noise_sigma() const noexcept { return noise_sigma_; }
  const BackgroundTable& background() const noexcept { return *background_; }

 private:
  friend ToyModel train_toy(std::shared_ptr<const BackgroundTable>, const Corpus&, double,
                            std::uint64_t, double, const ToyModelOptions&);

  struct Counts {
    std::vector<std::pair<Token, std::uint32_t>> next;  // sorted by token
    std::uint64_t total = 0;
  };
  struct KeyHash {
    using is_transparent = void;
    std::size_t operator()(std::span<const Token> s) const noexcept;
    std::size_t operator()(const Sequence& s) const noexcept { return (*this)(std::span(s)); }
  };
  struct KeyEqual {
    using is_transparent = void;
    bool operator()(std::span<const Token> a, std::span<const Token> b) const noexcept {
      return std::equal(a.begin(), a.end(), b.begin(), b.end());
    }
  };

  std::shared_ptr<const BackgroundTable> background_;
  std::unordered_map<Sequence, Counts, KeyHash, KeyEqual> memorized_;
  double lambda_ = 0.0;
  std::uint64_t seed_ = 0;
  double noise_sigma_ = 0.0;
  ToyModelOptions options_;
};

ToyModel train_toy(std::shared_ptr<const BackgroundTable> background, const Corpus& partition,
                   double lambda, std::uint64_t seed, double noise_sigma,
                   const ToyModelOptions& options = {});

// Fits the background table from `background_corpus` first.
ToyModel train_toy(const Corpus& background_corpus, const Corpus& partition, std::size_t n,
                   double lambda, std::uint64_t seed, double noise_sigma,
                   const ToyModelOptions& options = {});

TokenDist query(const NextTokenModel& model, std::span<const Token> context);

// A model that returns the same distribution for every context.
class ConstantModel final : public NextTokenModel {
 public:
  explicit ConstantModel(TokenDist dist) : dist_(std::move(dist)) {}
  std::size_t vocab_size() const override { return dist_.size(); }
  TokenDist next(std::span<const Token>) const override { return dist_; }

 private:
  TokenDist dist_;
};

// Memoizes another model per context. Safe to query from several threads.
class CachedModel final : public NextTokenModel {
 public:
  explicit CachedModel(const NextTokenModel& inner) : inner_(&inner) {}
  std::size_t vocab_size() const override { return inner_->vocab_size(); }
  TokenDist next(std::span<const Token> context) const override;
  void clear();

 private:
  struct Hash {
    std::size_t operator()(const Sequence& s) const noexcept;
  };
  const NextTokenModel* inner_;
  mutable std::mutex mu_;
  mutable std::unordered_map<Sequence, TokenDist, Hash> cache_;
};

enum class SyntheticKind {
  uniform_spike,
  correlated_smoothed,
  correlated_half_smoothed,
  correlated_unsmoothed
};

std::string_view to_string(SyntheticKind kind) noexcept;
SyntheticKind synthetic_kind_from_string(std::string_view s);

struct SyntheticScheme {
  SyntheticKind kind = SyntheticKind::uniform_spike;
  std::size_t n = 32000;
  double spike_log_boost = 0.0;
  std::uint64_t seed = 0;
};

// Added to q's logit at y_s in the half-smoothed scheme.
inline constexpr double kHalfSmoothedLogBoost = 4.5;

struct SyntheticInstance {
  TokenDist p0, p1, q, b;
  Token y_s = 0;
};

SyntheticInstance synth_instance(const SyntheticScheme& scheme);

// Names2IDs: [name, separator, d1 .. d10].
inline constexpr std::size_t kIdDigits = 10;
inline constexpr std::size_t kNames2IdsRecordLength = kIdDigits + 2;

// Names are drawn without replacement from `name_pool`.
Corpus gen_names2ids(std::size_t count, std::uint64_t seed, std::span<const Token> name_pool,
                     Token separator);
Corpus gen_names2ids(std::size_t count, std::uint64_t seed, const VocabLayout& layout);

// A sparse random Markov chain over the text words of a layout.
class TextLanguage {
 public:
  TextLanguage(const VocabLayout& layout, std::size_t successors, std::uint64_t seed);

  Corpus sample(std::size_t count, std::size_t min_length, std::size_t max_length,
                std::uint64_t seed) const;

 private:
  VocabLayout layout_;
  std::vector<std::vector<std::pair<Token, double>>> transitions_;  // cumulative
};

}  // namespace naf
