#include "naf/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/core.h>

#include "naf/error.hpp"

namespace naf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_tokens(std::uint64_t h, std::span<const Token> tokens) {
  for (Token t : tokens) h = splitmix64(h ^ (static_cast<std::uint64_t>(t) + 0x100000000ULL));
  return splitmix64(h ^ tokens.size());
}

template <typename Pairs>
void add_count(Pairs& pairs, Token t) {
  auto it = std::lower_bound(pairs.begin(), pairs.end(), t,
                             [](const auto& e, Token v) { return e.first < v; });
  if (it != pairs.end() && it->first == t) {
    ++it->second;
  } else {
    pairs.insert(it, {t, 1u});
  }
}

void check_tokens(std::span<const Token> seq, std::size_t n) {
  for (Token t : seq) {
    if (t >= n) throw Error(Errc::vocab_mismatch, fmt::format("token {} outside vocabulary of {}", t, n));
  }
}

}  // namespace

VocabLayout VocabLayout::make(std::size_t n, std::size_t name_count) {
  VocabLayout v;
  v.n = n;
  v.name_begin = 16;
  v.name_count = name_count;
  v.word_begin = static_cast<Token>(v.name_begin + name_count);
  if (n < v.word_begin + 8) {
    throw Error(Errc::config_invalid,
                fmt::format("vocabulary of {} too small for {} names", n, name_count));
  }
  v.word_count = n - v.word_begin;
  return v;
}

std::shared_ptr<const BackgroundTable> BackgroundTable::fit(const Corpus& corpus, std::size_t n) {
  if (corpus.empty()) throw Error(Errc::empty_corpus, "background corpus is empty");
  if (n < 2) throw Error(Errc::empty_vector, "vocabulary needs at least 2 tokens");
  auto table = std::make_shared<BackgroundTable>();
  table->n_ = n;
  std::vector<std::uint64_t> unigram(n, 0);
  std::uint64_t unigram_total = 0;
  for (const auto& seq : corpus) {
    check_tokens(seq, n);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      ++unigram[seq[i]];
      ++unigram_total;
      if (i == 0) continue;
      Row& row = table->rows_[seq[i - 1]];
      add_count(row.counts, seq[i]);
      ++row.total;
    }
  }
  const double denom = std::log(static_cast<double>(unigram_total + n));
  table->unigram_log_.resize(n);
  for (std::size_t y = 0; y < n; ++y) {
    table->unigram_log_[y] = std::log(static_cast<double>(unigram[y] + 1)) - denom;
  }
  return table;
}

std::vector<double> BackgroundTable::log_probs(Token previous) const {
  auto it = rows_.find(previous);
  if (it == rows_.end()) return unigram_log_;
  std::vector<double> out(n_);
  const Row& row = it->second;
  const double denom = std::log(static_cast<double>(row.total + n_));
  std::fill(out.begin(), out.end(), -denom);
  for (const auto& [t, c] : row.counts) out[t] = std::log(static_cast<double>(c + 1)) - denom;
  return out;
}

std::size_t ToyModel::KeyHash::operator()(std::span<const Token> s) const noexcept {
  return static_cast<std::size_t>(hash_tokens(0, s));
}

ToyModel train_toy(std::shared_ptr<const BackgroundTable> background, const Corpus& partition,
                   double lambda, std::uint64_t seed, double noise_sigma,
                   const ToyModelOptions& options) {
  if (!background) throw Error(Errc::empty_corpus, "no background table");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(Errc::config_invalid, fmt::format("lambda {} outside [0, 1]", lambda));
  }
  if (!(noise_sigma >= 0.0)) throw Error(Errc::config_invalid, "noise_sigma must be >= 0");
  if (options.max_order < 1 || !(options.prior_strength > 0.0)) {
    throw Error(Errc::config_invalid, "max_order >= 1 and prior_strength > 0 required");
  }
  ToyModel model;
  model.background_ = std::move(background);
  model.lambda_ = lambda;
  model.seed_ = seed;
  model.noise_sigma_ = noise_sigma;
  model.options_ = options;
  const std::size_t n = model.background_->vocab_size();
  for (const auto& seq : partition) {
    check_tokens(seq, n);
    for (std::size_t i = 1; i < seq.size(); ++i) {
      const std::size_t max_k = std::min(options.max_order, i);
      for (std::size_t k = 1; k <= max_k; ++k) {
        Sequence key(seq.begin() + static_cast<std::ptrdiff_t>(i - k),
                     seq.begin() + static_cast<std::ptrdiff_t>(i));
        auto& counts = model.memorized_[std::move(key)];
        add_count(counts.next, seq[i]);
        ++counts.total;
      }
    }
  }
  return model;
}

ToyModel train_toy(const Corpus& background_corpus, const Corpus& partition, std::size_t n,
                   double lambda, std::uint64_t seed, double noise_sigma,
                   const ToyModelOptions& options) {
  if (partition.empty()) throw Error(Errc::empty_corpus, "training partition is empty");
  return train_toy(BackgroundTable::fit(background_corpus, n), partition, lambda, seed,
                   noise_sigma, options);
}

TokenDist ToyModel::next(std::span<const Token> context) const {
  const std::size_t n = vocab_size();
  if (context.empty()) throw Error(Errc::empty_vector, "query needs a non-empty context");
  for (Token t : context) {
    if (t >= n) throw Error(Errc::token_out_of_range, fmt::format("token {} >= {}", t, n));
  }
  std::vector<double> logits = background_->log_probs(context.back());

  std::span<const Token> effective = context.last(1);
  if (lambda_ > 0.0) {
    // Matched suffixes, shortest first. A suffix of a stored context is
    // itself stored, so matching stops at the first miss.
    std::vector<const Counts*> matches;
    for (std::size_t k = 1; k <= std::min(options_.max_order, context.size()); ++k) {
      auto it = memorized_.find(context.last(k));
      if (it == memorized_.end()) break;
      matches.push_back(&it->second);
    }
    if (!matches.empty()) {
      effective = context.last(matches.size());
      // emp_k = (c_k + alpha emp_{k-1}) / (T_k + alpha), emp_0 = background.
      // Tracked as log values plus a pending shift shared by every token.
      const double alpha = options_.prior_strength;
      std::vector<double> emp(logits);
      double shift = 0.0;
      for (const Counts* m : matches) {
        const double log_denom = std::log(static_cast<double>(m->total) + alpha);
        const double unseen = std::log(alpha) - log_denom;
        for (const auto& [t, c] : m->next) {
          const double updated =
              std::log(static_cast<double>(c) + alpha * std::exp(emp[t] + shift)) - log_denom;
          emp[t] = updated - shift - unseen;
        }
        shift += unseen;
      }
      for (std::size_t y = 0; y < n; ++y) {
        logits[y] = (1.0 - lambda_) * logits[y] + lambda_ * (emp[y] + shift);
      }
    }
  }

  if (noise_sigma_ > 0.0) {
    std::mt19937_64 rng(hash_tokens(splitmix64(seed_), effective));
    std::normal_distribution<double> normal(0.0, noise_sigma_);
    for (double& v : logits) v += normal(rng);
  }
  return floor_and_normalize(logits);
}

std::size_t CachedModel::Hash::operator()(const Sequence& s) const noexcept {
  return static_cast<std::size_t>(hash_tokens(0, s));
}

TokenDist CachedModel::next(std::span<const Token> context) const {
  Sequence key(context.begin(), context.end());
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  TokenDist d = inner_->next(context);
  std::lock_guard lock(mu_);
  return cache_.try_emplace(std::move(key), std::move(d)).first->second;
}

void CachedModel::clear() {
  std::lock_guard lock(mu_);
  cache_.clear();
}

TokenDist query(const NextTokenModel& model, std::span<const Token> context) {
  return model.next(context);
}

std::string_view to_string(SyntheticKind kind) noexcept {
  switch (kind) {
    case SyntheticKind::uniform_spike: return "uniform_spike";
    case SyntheticKind::correlated_smoothed: return "correlated_smoothed";
    case SyntheticKind::correlated_half_smoothed: return "correlated_half_smoothed";
    case SyntheticKind::correlated_unsmoothed: return "correlated_unsmoothed";
  }
  return "unknown";
}

SyntheticKind synthetic_kind_from_string(std::string_view s) {
  for (auto k : {SyntheticKind::uniform_spike, SyntheticKind::correlated_smoothed,
                 SyntheticKind::correlated_half_smoothed, SyntheticKind::correlated_unsmoothed}) {
    if (to_string(k) == s) return k;
  }
  throw Error(Errc::config_invalid, fmt::format("unknown synthetic scheme '{}'", s));
}

SyntheticInstance synth_instance(const SyntheticScheme& scheme) {
  const std::size_t n = scheme.n;
  if (n < 2) throw Error(Errc::empty_vector, "synthetic vocabulary needs at least 2 tokens");
  std::mt19937_64 rng(splitmix64(scheme.seed));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const auto y_s = static_cast<Token>(pick(rng));

  std::vector<double> p0(n, 0.0), p1(n, 0.0), q(n, 0.0), b(n, 0.0);
  if (scheme.kind != SyntheticKind::uniform_spike) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> w(n);
    for (double& v : w) v = normal(rng);
    for (auto* logits : {&p0, &p1, &q, &b}) {
      for (std::size_t y = 0; y < n; ++y) (*logits)[y] = w[y] + normal(rng);
    }
    if (scheme.kind == SyntheticKind::correlated_half_smoothed) {
      q[y_s] += kHalfSmoothedLogBoost;
    } else if (scheme.kind == SyntheticKind::correlated_unsmoothed) {
      q[y_s] = *std::max_element(q.begin(), q.end());
    }
  }
  p1[y_s] += scheme.spike_log_boost;
  return {floor_and_normalize(p0), floor_and_normalize(p1), floor_and_normalize(q),
          floor_and_normalize(b), y_s};
}

Corpus gen_names2ids(std::size_t count, std::uint64_t seed, std::span<const Token> name_pool,
                     Token separator) {
  if (count < 1) throw Error(Errc::config_invalid, "need at least one record");
  if (count > name_pool.size()) {
    throw Error(Errc::vocab_exhausted,
                fmt::format("{} records requested but only {} names", count, name_pool.size()));
  }
  std::mt19937_64 rng(splitmix64(seed ^ 0x6e616d6573ULL));
  std::vector<Token> names(name_pool.begin(), name_pool.end());
  std::shuffle(names.begin(), names.end(), rng);
  std::uniform_int_distribution<unsigned> digit(0, 9);
  Corpus out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Sequence rec{names[i], separator};
    for (std::size_t k = 0; k < kIdDigits; ++k) rec.push_back(VocabLayout::digit(digit(rng)));
    out.push_back(std::move(rec));
  }
  return out;
}

Corpus gen_names2ids(std::size_t count, std::uint64_t seed, const VocabLayout& layout) {
  std::vector<Token> pool(layout.name_count);
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = layout.name(i);
  return gen_names2ids(count, seed, pool, layout.separator);
}

TextLanguage::TextLanguage(const VocabLayout& layout, std::size_t successors, std::uint64_t seed)
    : layout_(layout), transitions_(layout.word_count) {
  if (successors < 1 || successors > layout.word_count) {
    throw Error(Errc::config_invalid, "successor count outside [1, word_count]");
  }
  std::mt19937_64 rng(splitmix64(seed ^ 0x74657874ULL));
  std::exponential_distribution<double> weight(1.0);
  std::vector<Token> words(layout.word_count);
  for (std::size_t i = 0; i < words.size(); ++i) words[i] = layout.word(i);
  for (auto& row : transitions_) {
    std::vector<Token> chosen;
    std::sample(words.begin(), words.end(), std::back_inserter(chosen), successors, rng);
    double total = 0.0;
    for (Token t : chosen) {
      total += weight(rng);
      row.emplace_back(t, total);
    }
    for (auto& e : row) e.second /= total;
  }
}

Corpus TextLanguage::sample(std::size_t count, std::size_t min_length, std::size_t max_length,
                            std::uint64_t seed) const {
  if (min_length < 2 || max_length < min_length) {
    throw Error(Errc::config_invalid, "text lengths need 2 <= min <= max");
  }
  std::mt19937_64 rng(splitmix64(seed ^ 0x73616d706c65ULL));
  std::uniform_int_distribution<std::size_t> length(min_length, max_length);
  std::uniform_int_distribution<std::size_t> start(0, layout_.word_count - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Corpus out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Sequence seq{layout_.word(start(rng))};
    const std::size_t len = length(rng);
    while (seq.size() < len) {
      const auto& row = transitions_[seq.back() - layout_.word_begin];
      const double r = u(rng);
      auto it = std::lower_bound(row.begin(), row.end(), r,
                                 [](const auto& e, double v) { return e.second < v; });
      if (it == row.end()) it = std::prev(row.end());
      seq.push_back(it->first);
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace naf
