#include "naf/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <set>

#include <fmt/core.h>

#include "naf/error.hpp"
#include "naf/logmath.hpp"
#include "naf/parallel.hpp"

namespace naf {

namespace {

std::size_t alphabet_index(const std::vector<Token>& alphabet, Token t) {
  auto it = std::find(alphabet.begin(), alphabet.end(), t);
  return it == alphabet.end() ? alphabet.size() : static_cast<std::size_t>(it - alphabet.begin());
}

}  // namespace

double CandidateSpace::cardinality() const {
  return std::pow(static_cast<double>(alphabet.size()), static_cast<double>(length));
}

bool CandidateSpace::contains(std::span<const Token> seq) const {
  if (seq.size() != length) return false;
  return std::all_of(seq.begin(), seq.end(),
                     [this](Token t) { return alphabet_index(alphabet, t) < alphabet.size(); });
}

double sequence_log_prob(const NextTokenModel& model, const Sequence& prefix,
                         std::span<const Token> continuation) {
  Sequence context = prefix;
  double total = 0.0;
  for (Token t : continuation) {
    total += model.next(context).log_prob(t);
    context.push_back(t);
  }
  return total;
}

double exposure_from_rank(double space_size, double rank) {
  return std::log2(space_size) - std::log2(rank);
}

CandidateScores::CandidateScores(const NextTokenModel& model, const Sequence& prefix,
                                 const CandidateSpace& space, std::uint64_t sample_seed)
    : model_(&model), prefix_(prefix), space_(space) {
  const std::size_t a = space.alphabet.size();
  if (space.length < 1 || a < 1 || space.cardinality() < 2.0) {
    throw Error(Errc::config_invalid, "candidate space needs at least 2 members");
  }
  if (std::set<Token>(space.alphabet.begin(), space.alphabet.end()).size() != a) {
    throw Error(Errc::config_invalid, "candidate alphabet has duplicate tokens");
  }
  exhaustive_ = space.cardinality() <= kExhaustiveLimit;

  if (!exhaustive_) {
    std::mt19937_64 rng(sample_seed);
    std::uniform_int_distribution<std::size_t> pick(0, a - 1);
    std::set<Sequence> unique;
    for (std::size_t i = 0; i < kSampledCandidates; ++i) {
      Sequence s(space.length);
      for (auto& t : s) t = space.alphabet[pick(rng)];
      unique.insert(std::move(s));
    }
    sampled_.assign(unique.begin(), unique.end());
    scores_.resize(sampled_.size());
    parallel_for(sampled_.size(), [&](std::size_t i) {
      scores_[i] = sequence_log_prob(model, prefix_, sampled_[i]);
    });
    return;
  }

  std::size_t total = 1;
  for (std::size_t k = 0; k < space.length; ++k) total *= a;
  scores_.assign(total, 0.0);
  const TokenDist root = model.next(prefix_);

  // Depth-first over the candidate tree; slot index is the mixed-radix value
  // of the alphabet positions, first token most significant.
  parallel_for(a, [&](std::size_t first) {
    Sequence context = prefix_;
    context.push_back(space_.alphabet[first]);
    auto fill = [&](auto&& self, std::size_t depth, std::size_t index, double acc) -> void {
      if (depth == space_.length) {
        scores_[index] = acc;
        return;
      }
      const TokenDist d = model_->next(context);
      for (std::size_t j = 0; j < a; ++j) {
        const Token t = space_.alphabet[j];
        context.push_back(t);
        self(self, depth + 1, index * a + j, acc + d.log_prob(t));
        context.pop_back();
      }
    };
    fill(fill, 1, first, root.log_prob(space_.alphabet[first]));
  });
}

double CandidateScores::score_of(std::span<const Token> seq) const {
  if (!exhaustive_) return sequence_log_prob(*model_, prefix_, seq);
  std::size_t index = 0;
  for (Token t : seq) index = index * space_.alphabet.size() + alphabet_index(space_.alphabet, t);
  return scores_[index];
}

double CandidateScores::exposure(std::span<const Token> canary) const {
  if (!space_.contains(canary)) {
    throw Error(Errc::canary_not_in_space, "canary is not a member of the candidate space");
  }
  const double s = score_of(canary);
  if (exhaustive_) {
    const auto rank = std::count_if(scores_.begin(), scores_.end(), [s](double v) { return v >= s; });
    return exposure_from_rank(static_cast<double>(scores_.size()), static_cast<double>(rank));
  }
  std::size_t rank = 1, size = 1;
  for (std::size_t i = 0; i < sampled_.size(); ++i) {
    if (std::equal(sampled_[i].begin(), sampled_[i].end(), canary.begin(), canary.end())) continue;
    ++size;
    if (scores_[i] >= s) ++rank;
  }
  return exposure_from_rank(static_cast<double>(size), static_cast<double>(rank));
}

double canary_exposure(const NextTokenModel& model, const CanarySpec& spec) {
  if (!spec.candidate_space.contains(spec.canary)) {
    throw Error(Errc::canary_not_in_space, "canary is not a member of the candidate space");
  }
  return CandidateScores(model, spec.prefix, spec.candidate_space).exposure(spec.canary);
}

std::size_t extracted_length(std::span<const Token> generated, std::span<const Token> truth) {
  std::size_t k = 0;
  while (k < generated.size() && k < truth.size() && generated[k] == truth[k]) ++k;
  return k;
}

PiiResult pii_extract(const NextTokenModel& model, const Corpus& records) {
  if (records.empty()) throw Error(Errc::empty_examples, "no Names2IDs records");
  for (const auto& rec : records) {
    if (rec.size() != kNames2IdsRecordLength ||
        !std::all_of(rec.begin() + 2, rec.end(), [](Token t) { return VocabLayout::is_digit(t); })) {
      throw Error(Errc::malformed_record, "record is not [name, separator, 10 digits]");
    }
  }
  PiiResult result;
  result.extracted_lengths.resize(records.size());
  parallel_for(records.size(), [&](std::size_t i) {
    const auto& rec = records[i];
    Sequence context{rec[0], rec[1]};
    for (std::size_t k = 0; k < kIdDigits; ++k) context.push_back(model.next(context).argmax());
    result.extracted_lengths[i] = extracted_length(std::span(context).subspan(2),
                                                   std::span(rec).subspan(2));
  });
  std::size_t total = 0, full = 0;
  for (std::size_t len : result.extracted_lengths) {
    total += len;
    full += len == kIdDigits ? 1 : 0;
  }
  result.ael = static_cast<double>(total) / static_cast<double>(records.size());
  result.fer = static_cast<double>(full) / static_cast<double>(records.size());
  return result;
}

SelectiveCurve selective_curve(std::span<const double> confidence, std::span<const bool> correct) {
  require_same_size(confidence.size(), correct.size(), "selective_curve");
  const std::size_t n = confidence.size();
  if (n == 0) throw Error(Errc::empty_examples, "no examples to score");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return confidence[a] > confidence[b]; });
  SelectiveCurve out;
  std::size_t covered = 0, hits = 0;
  for (std::size_t i = 0; i < n;) {
    const double c = confidence[order[i]];
    for (; i < n && confidence[order[i]] == c; ++i) {
      ++covered;
      hits += correct[order[i]] ? 1 : 0;
    }
    out.curve.push_back({static_cast<double>(covered) / static_cast<double>(n),
                         static_cast<double>(hits) / static_cast<double>(covered)});
  }
  out.acc = out.curve.back().accuracy;
  if (out.curve.size() == 1) {
    out.auc = out.acc;
    return out;
  }
  double area = 0.0;
  for (std::size_t i = 1; i < out.curve.size(); ++i) {
    const auto& a = out.curve[i - 1];
    const auto& b = out.curve[i];
    area += (b.coverage - a.coverage) * (a.accuracy + b.accuracy) / 2.0;
  }
  out.auc = area / (out.curve.back().coverage - out.curve.front().coverage);
  return out;
}

AttackReport tte(const NextTokenModel& model, std::span<const TteExample> examples,
                 bool filter_q_failures, const NextTokenModel* q_model) {
  if (examples.empty()) throw Error(Errc::empty_examples, "no TTE examples");
  if (filter_q_failures && q_model == nullptr) {
    throw Error(Errc::missing_q_model, "filtering needs a q model");
  }
  const std::size_t n = examples.size();
  std::vector<char> keep(n, 1), hit(n, 0);
  std::vector<double> conf(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    const auto& ex = examples[i];
    if (filter_q_failures && q_model->next(ex.prefix).argmax() == ex.target) {
      keep[i] = 0;
      return;
    }
    const TokenDist d = model.next(ex.prefix);
    const Token pred = d.argmax();
    conf[i] = d.prob(pred);
    hit[i] = pred == ex.target ? 1 : 0;
  });
  std::vector<double> kept_conf;
  std::vector<char> kept_hit;
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    kept_conf.push_back(conf[i]);
    kept_hit.push_back(hit[i]);
  }
  if (kept_conf.empty()) throw Error(Errc::empty_examples, "every example was filtered out");
  std::unique_ptr<bool[]> flags(new bool[kept_hit.size()]);
  for (std::size_t i = 0; i < kept_hit.size(); ++i) flags[i] = kept_hit[i] != 0;
  const auto sc = selective_curve(kept_conf, std::span<const bool>(flags.get(), kept_hit.size()));
  AttackReport report;
  report.curve = sc.curve;
  report.auc = sc.auc;
  report.acc = sc.acc;
  report.examples_used = kept_conf.size();
  return report;
}

double paired_sign_test(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "paired_sign_test");
  std::size_t wins = 0, trials = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    ++trials;
    wins += a[i] > b[i] ? 1 : 0;
  }
  if (trials == 0) return 1.0;
  // P(X >= wins), X ~ Binomial(trials, 1/2)
  std::vector<double> terms;
  const double nt = static_cast<double>(trials);
  for (std::size_t k = wins; k <= trials; ++k) {
    const double kk = static_cast<double>(k);
    terms.push_back(std::lgamma(nt + 1) - std::lgamma(kk + 1) - std::lgamma(nt - kk + 1) -
                    nt * std::log(2.0));
  }
  return std::min(1.0, std::exp(log_sum_exp(terms)));
}

}  // namespace naf
