#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "naf/models.hpp"

namespace naf {

// Every sequence of `length` tokens drawn from `alphabet`.
struct CandidateSpace {
  std::vector<Token> alphabet;
  std::size_t length = 3;

  // |alphabet|^length as a double (may exceed 2^64 in principle).
  double cardinality() const;
  bool contains(std::span<const Token> seq) const;
};

// Spaces up to this size are scored exhaustively; larger ones are sampled.
inline constexpr double kExhaustiveLimit = 1048576.0;  // 2^20
inline constexpr std::size_t kSampledCandidates = 16384;  // 2^14

struct CanarySpec {
  Sequence canary;       // `length` tokens from the space's alphabet
  std::size_t repetitions = 0;
  CandidateSpace candidate_space;
  Sequence prefix;       // context preceding the first canary token
};

// Sequence log-probabilities of all candidates under one model, computed once
// so that many canaries sharing a prefix and space can be ranked cheaply.
class CandidateScores {
 public:
  // Exhaustive when the space has at most kExhaustiveLimit members, otherwise
  // kSampledCandidates uniform draws (deduplicated) from `sample_seed`.
  CandidateScores(const NextTokenModel& model, const Sequence& prefix,
                  const CandidateSpace& space, std::uint64_t sample_seed = 0);

  bool exhaustive() const noexcept { return exhaustive_; }
  std::size_t size() const noexcept { return scores_.size(); }
  std::span<const double> scores() const noexcept { return scores_; }

  // Exposure in bits: log2|R| - log2 rank, rank counting every candidate
  // whose score is >= the canary's (the canary loses ties).
  double exposure(std::span<const Token> canary) const;

 private:
  double score_of(std::span<const Token> seq) const;

  const NextTokenModel* model_;
  Sequence prefix_;
  CandidateSpace space_;
  bool exhaustive_ = true;
  std::vector<double> scores_;
  std::vector<Sequence> sampled_;  // only when sampled, parallel to scores_
};

double sequence_log_prob(const NextTokenModel& model, const Sequence& prefix,
                         std::span<const Token> continuation);

// Exposure from a rank among |R| candidates.
double exposure_from_rank(double space_size, double rank);

double canary_exposure(const NextTokenModel& model, const CanarySpec& spec);

struct PiiResult {
  double ael = 0.0;
  double fer = 0.0;
  std::vector<std::size_t> extracted_lengths;
};

// Longest prefix of `truth` reproduced by `generated`.
std::size_t extracted_length(std::span<const Token> generated, std::span<const Token> truth);

PiiResult pii_extract(const NextTokenModel& model, const Corpus& records);

struct TteExample {
  Sequence prefix;
  Token target = 0;
};

struct CurvePoint {
  double coverage = 0.0;
  double accuracy = 0.0;
};

struct SelectiveCurve {
  std::vector<CurvePoint> curve;  // coverage strictly increasing
  double auc = 0.0;
  double acc = 0.0;
};

// Sweeps every distinct confidence as a threshold (keep conf >= threshold).
// auc is the trapezoid area over the realized coverage range divided by the
// width of that range; a single point yields its accuracy.
SelectiveCurve selective_curve(std::span<const double> confidence, std::span<const bool> correct);

struct AttackReport {
  std::vector<double> exposure_scores;  // bits
  std::optional<double> ael;
  std::optional<double> fer;
  std::vector<CurvePoint> curve;
  std::optional<double> auc;
  std::optional<double> acc;
  std::size_t examples_used = 0;
};

AttackReport tte(const NextTokenModel& model, std::span<const TteExample> examples,
                 bool filter_q_failures, const NextTokenModel* q_model);

// One-sided exact sign test for a[i] > b[i]; ties are dropped. Returns 1 when
// no untied pairs remain.
double paired_sign_test(std::span<const double> a, std::span<const double> b);

}  // namespace naf
