#pragma once

#include <cstdint>
#include <memory>

#include "naf/attacks.hpp"
#include "naf/harness/config.hpp"
#include "naf/models.hpp"

namespace naf::harness {

// The toy data universe: a background corpus, two disjoint training
// partitions S_p and S_q, Names2IDs records, canaries and held-out text.
struct World {
  VocabLayout layout;
  std::shared_ptr<const BackgroundTable> background;
  Corpus background_corpus;
  Corpus text_p, text_q;
  Corpus pii_p, pii_q, pii_heldout;
  // Each canary follows its own prefix [marker, key token].
  std::vector<Sequence> canaries;  // inserted into S_p
  std::vector<Sequence> canary_prefixes;
  std::vector<Sequence> control_canaries;  // same format, never inserted
  std::vector<Sequence> control_prefixes;
  std::size_t canary_repetitions = 0;
  CandidateSpace canary_space;
  Corpus validation;

  Corpus sp(bool with_canaries = true) const;
  Corpus sq() const;
  // prefix followed by the words of canary i
  Sequence canary_sequence(std::size_t i) const;
};

// Independent stream seed for a (seed, tag) pair.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

World build_world(const ExperimentConfig& c, std::uint64_t seed);

struct ModelSet {
  std::shared_ptr<const ToyModel> p, q, b;
  std::shared_ptr<const ToyModel> p0;  // S_p without canaries; only when requested
  TokenDist constant_base;
};

ModelSet train_models(const World& w, const ExperimentConfig& c, double lambda,
                      std::uint64_t seed, bool with_p0 = false);

// Text-prefix prompts drawn from both partitions and the validation set.
std::vector<Sequence> sample_prompts(const World& w, std::size_t count, std::uint64_t seed);

// (prefix, next token) pairs from S_p's text (members) or validation text.
std::vector<TteExample> tte_examples(const Corpus& text, std::size_t count, std::uint64_t seed);

}  // namespace naf::harness
