#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace naf {

using Token = std::uint32_t;

// Every distribution assigns at least e^-20 to every token.
inline constexpr double kLogFloor = -20.0;
// Stand-in for -inf entries (masked tokens in real logit dumps).
inline constexpr double kMaskedLogit = -1e4;

// Lowest log-probability a floored distribution over n tokens can hold after
// the single renormalization pass: -20 - log(1 + n e^-20).
double floor_bound(std::size_t n);

// A floored, normalized next-token distribution stored as natural logs.
// Only floor_and_normalize creates one, so the invariants always hold.
class TokenDist {
 public:
  std::size_t size() const noexcept { return log_p_.size(); }
  std::span<const double> log_p() const noexcept { return log_p_; }
  double log_prob(Token y) const { return log_p_.at(y); }
  double prob(Token y) const;
  std::vector<double> probs() const;
  // Ties resolve to the lowest index.
  Token argmax() const;

 private:
  explicit TokenDist(std::vector<double> log_p) : log_p_(std::move(log_p)) {}
  friend TokenDist floor_and_normalize(std::span<const double> raw_log_scores);

  std::vector<double> log_p_;
};

// Relative probability distribution: log_r = log p - log t with
// log t the mean log-probability, so sum(log_r) = 0.
struct Rpd {
  std::vector<double> log_r;
  double log_t = 0.0;

  std::size_t size() const noexcept { return log_r.size(); }
};

struct Divergences {
  double tv = 0.0;           // total variation
  double d_m = 0.0;          // log 1/(1 - tv)
  double d_r = 0.0;          // mean absolute log-RPD gap / 2
  double kl = 0.0;           // KL(p || q)
  double rel_kl = 0.0;       // sum p (log rp - log rq)
  double max_div = 0.0;      // max log p/q
  double rel_max_div = 0.0;  // max log rp/rq
};

// log-sum-exp normalize, clamp each entry at -20, renormalize once.
// -inf entries become kMaskedLogit first; NaN and +inf are rejected.
TokenDist floor_and_normalize(std::span<const double> raw_log_scores);

Rpd to_rpd(const TokenDist& d);

// The distribution an RPD describes: normalize exp(log_r) and floor.
TokenDist to_dist(const Rpd& r);

Divergences divergences(const TokenDist& p, const TokenDist& q);

double total_variation(const TokenDist& p, const TokenDist& q);

// log C minimizing sum_y log^2(C p(y)/q(y)); equals log tq - log tp.
double optimal_log_scale(const TokenDist& p, const TokenDist& q);

void require_same_size(std::size_t a, std::size_t b, const char* what);

}  // namespace naf
