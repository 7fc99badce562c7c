#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "naf/dist.hpp"

namespace naf {

enum class Method { cp_delta, cp_delta_r, cp_delta_kl, scp_delta_r };

std::string_view to_string(Method m) noexcept;

// Output of S_m(rp, rb): rp kept on `kept`, rb elsewhere, everything scaled
// by beta so the log-values still sum to zero.
struct SmoothedRpd {
  // rpd.log_t is the typical log-probability of the distribution the
  // smoothed RPD describes, so rpd.log_r + rpd.log_t is normalized.
  Rpd rpd;
  std::vector<Token> kept;  // sorted ascending
  double log_beta = 0.0;
  std::size_t m = 0;

  bool is_kept(Token y) const;
  // Normalized log-probabilities of the smoothed distribution (no floor).
  std::vector<double> log_probs() const;
};

struct AggregationResult {
  TokenDist dist;  // the protected model, re-floored
  // The normalized aggregate before the floor is re-applied. Bounds and
  // tightness statements are exact for this vector.
  std::vector<double> exact_log_p;
  double k_x = 0.0;
  Method method = Method::cp_delta;
  // (smoothed p side, smoothed q side); set for scp_delta_r only.
  std::optional<std::pair<SmoothedRpd, SmoothedRpd>> smoothed_inputs;

  // mean(exact_log_p)
  double log_typical() const;
};

AggregationResult cp_delta(const TokenDist& p, const TokenDist& q);
AggregationResult cp_delta_r(const TokenDist& p, const TokenDist& q);
// Geometric-mean baseline; k_x is descriptive (max-divergence to either side).
AggregationResult cp_delta_kl(const TokenDist& p, const TokenDist& q);

// score(y) = p(y) (log rp(y) - log rb(y)); the m largest are kept, ties to
// the lowest index. `rp` must come from to_rpd so p(y) is recoverable.
SmoothedRpd smooth_m(const Rpd& rp, const Rpd& rb, std::size_t m);

AggregationResult scp_delta_r(const TokenDist& b, const TokenDist& p, const TokenDist& q,
                              std::size_t m);

// Entrywise mean of log-probabilities, floored and normalized.
TokenDist constant_base(const std::vector<TokenDist>& reference_dists);

}  // namespace naf
