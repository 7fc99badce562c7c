#include "naf/harness/world.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "naf/aggregate.hpp"
#include "naf/error.hpp"

namespace naf::harness {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

namespace {

std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) { return derive_seed(seed, tag); }

enum Tag : std::uint64_t {
  kLanguage = 1,
  kBackgroundText,
  kTextP,
  kTextQ,
  kValidation,
  kNames,
  kCanaries,
  kModelP,
  kModelQ,
  kModelB,
  kPrompts,
  kTte,
  kGeneralLanguage,
  kGeneralText,
};

}  // namespace

Corpus World::sp(bool with_canaries) const {
  Corpus out = text_p;
  out.insert(out.end(), pii_p.begin(), pii_p.end());
  if (with_canaries) {
    for (std::size_t i = 0; i < canaries.size(); ++i) {
      for (std::size_t r = 0; r < canary_repetitions; ++r) out.push_back(canary_sequence(i));
    }
  }
  return out;
}

Corpus World::sq() const {
  Corpus out = text_q;
  out.insert(out.end(), pii_q.begin(), pii_q.end());
  return out;
}

Sequence World::canary_sequence(std::size_t i) const {
  Sequence s = canary_prefixes.at(i);
  s.insert(s.end(), canaries[i].begin(), canaries[i].end());
  return s;
}

World build_world(const ExperimentConfig& c, std::uint64_t seed) {
  validate(c);
  World w;
  w.layout = VocabLayout::make(c.vocab_size, c.name_count);
  const TextLanguage language(w.layout, c.word_successors, derive(seed, kLanguage));

  const auto domain_sequences = static_cast<std::size_t>(
      std::llround(c.background_domain_fraction * static_cast<double>(c.background_sequences)));
  w.background_corpus = language.sample(domain_sequences, c.text_min_length, c.text_max_length,
                                        derive(seed, kBackgroundText));
  const TextLanguage general(w.layout, c.word_successors, derive(seed, kGeneralLanguage));
  const Corpus general_text =
      general.sample(c.background_sequences - domain_sequences, c.text_min_length,
                     c.text_max_length, derive(seed, kGeneralText));
  w.background_corpus.insert(w.background_corpus.end(), general_text.begin(), general_text.end());
  w.text_p = language.sample(c.partition_examples, c.text_min_length, c.text_max_length,
                             derive(seed, kTextP));
  w.text_q = language.sample(c.partition_examples, c.text_min_length, c.text_max_length,
                             derive(seed, kTextQ));
  w.validation = language.sample(c.validation_sequences, c.text_min_length, c.text_max_length,
                                 derive(seed, kValidation));

  const std::size_t record_names = c.background_names + 2 * c.pii_records + c.heldout_pii_records;
  const std::size_t total_names = record_names + 2 * c.canaries;
  const Corpus records = gen_names2ids(total_names, derive(seed, kNames), w.layout);
  auto take = [&records](std::size_t from, std::size_t count) {
    return Corpus(records.begin() + static_cast<std::ptrdiff_t>(from),
                  records.begin() + static_cast<std::ptrdiff_t>(from + count));
  };
  const Corpus background_pii = take(0, c.background_names);
  w.background_corpus.insert(w.background_corpus.end(), background_pii.begin(),
                             background_pii.end());
  w.pii_p = take(c.background_names, c.pii_records);
  w.pii_q = take(c.background_names + c.pii_records, c.pii_records);
  w.pii_heldout = take(c.background_names + 2 * c.pii_records, c.heldout_pii_records);

  w.canary_repetitions = c.canary_repetitions;
  w.canary_space.length = 3;
  for (std::size_t i = 0; i < c.canary_words; ++i) w.canary_space.alphabet.push_back(w.layout.word(i));
  std::mt19937_64 rng(derive(seed, kCanaries));
  std::uniform_int_distribution<std::size_t> pick(0, c.canary_words - 1);
  std::set<Sequence> used;
  auto draw = [&] {
    for (;;) {
      Sequence s(3);
      for (auto& t : s) t = w.canary_space.alphabet[pick(rng)];
      if (used.insert(s).second) return s;
    }
  };
  const double space = w.canary_space.cardinality();
  if (static_cast<double>(2 * c.canaries) > space) {
    throw Error(Errc::config_invalid, "canary space too small for the requested canaries");
  }
  // Names not used by any record serve as canary keys.
  for (std::size_t i = 0; i < c.canaries; ++i) {
    w.canaries.push_back(draw());
    w.canary_prefixes.push_back({w.layout.canary_prefix, records[record_names + i][0]});
  }
  for (std::size_t i = 0; i < c.canaries; ++i) {
    w.control_canaries.push_back(draw());
    w.control_prefixes.push_back(
        {w.layout.canary_prefix, records[record_names + c.canaries + i][0]});
  }

  w.background = BackgroundTable::fit(w.background_corpus, c.vocab_size);
  return w;
}

ModelSet train_models(const World& w, const ExperimentConfig& c, double lambda,
                      std::uint64_t seed, bool with_p0) {
  const ToyModelOptions options{c.max_order, c.memorization_prior};
  ModelSet s{nullptr, nullptr, nullptr, nullptr, floor_and_normalize(std::vector<double>(2, 0.0))};
  s.p = std::make_shared<ToyModel>(
      train_toy(w.background, w.sp(), lambda, derive(seed, kModelP), c.noise_sigma, options));
  s.q = std::make_shared<ToyModel>(
      train_toy(w.background, w.sq(), lambda, derive(seed, kModelQ), c.noise_sigma, options));
  s.b = std::make_shared<ToyModel>(
      train_toy(w.background, {}, 0.0, derive(seed, kModelB), c.noise_sigma, options));
  if (with_p0) {
    s.p0 = std::make_shared<ToyModel>(train_toy(w.background, w.sp(false), lambda,
                                                derive(seed, kModelP), c.noise_sigma, options));
  }
  std::vector<TokenDist> refs;
  for (std::size_t i = 0; i < c.base_reference_contexts; ++i) {
    const auto& seq = w.validation[i % w.validation.size()];
    const std::size_t cut = 1 + (i / w.validation.size()) % (seq.size() - 1);
    refs.push_back(s.b->next(std::span(seq).first(cut)));
  }
  s.constant_base = constant_base(refs);
  return s;
}

std::vector<Sequence> sample_prompts(const World& w, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(derive(seed, kPrompts));
  const Corpus* sources[] = {&w.text_p, &w.text_q, &w.validation};
  std::vector<Sequence> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Corpus& src = *sources[i % 3];
    std::uniform_int_distribution<std::size_t> which(0, src.size() - 1);
    const auto& seq = src[which(rng)];
    std::uniform_int_distribution<std::size_t> cut(1, seq.size() - 1);
    out.emplace_back(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(cut(rng)));
  }
  return out;
}

std::vector<TteExample> tte_examples(const Corpus& text, std::size_t count, std::uint64_t seed) {
  if (text.empty()) throw Error(Errc::empty_examples, "no text to draw TTE examples from");
  std::mt19937_64 rng(derive(seed, kTte));
  std::uniform_int_distribution<std::size_t> which(0, text.size() - 1);
  std::vector<TteExample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& seq = text[which(rng)];
    std::uniform_int_distribution<std::size_t> pos(std::min<std::size_t>(2, seq.size() - 1),
                                                   seq.size() - 1);
    const std::size_t k = pos(rng);
    out.push_back({Sequence(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(k)), seq[k]});
  }
  return out;
}

}  // namespace naf::harness
