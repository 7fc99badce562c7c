#include "naf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "naf/error.hpp"
#include "naf/logmath.hpp"

namespace naf {

namespace {

SparpsResult sparps_from_ratios(const std::vector<double>& ratio, std::size_t m, double tol) {
  const std::size_t n = ratio.size();
  if (m >= n) {
    throw Error(Errc::m_out_of_range, fmt::format("sparps_check needs m < n ({} >= {})", m, n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&ratio](std::size_t a, std::size_t b) { return ratio[a] < ratio[b]; });

  // Widest window whose span is at most 2 tol.
  std::size_t best_lo = 0, best_hi = 0, lo = 0;
  for (std::size_t hi = 0; hi < n; ++hi) {
    while (ratio[order[hi]] - ratio[order[lo]] > 2.0 * tol) ++lo;
    if (hi - lo > best_hi - best_lo) {
      best_lo = lo;
      best_hi = hi;
    }
  }

  SparpsResult result;
  result.tolerance = tol;
  const std::size_t inliers = best_hi - best_lo + 1;
  if (inliers + m < n) return result;

  result.holds = true;
  result.log_alpha = 0.5 * (ratio[order[best_lo]] + ratio[order[best_hi]]);
  std::vector<char> in_window(n, 0);
  for (std::size_t i = best_lo; i <= best_hi; ++i) in_window[order[i]] = 1;
  std::vector<Token> witness;
  for (std::size_t y = 0; y < n; ++y) {
    if (!in_window[y]) witness.push_back(static_cast<Token>(y));
  }
  for (std::size_t y = 0; y < n && witness.size() < m; ++y) {
    if (in_window[y]) witness.push_back(static_cast<Token>(y));
  }
  std::sort(witness.begin(), witness.end());
  result.witness_set = std::move(witness);
  return result;
}

}  // namespace

SparpsResult sparps_check(const Rpd& p, const Rpd& q, std::size_t m, double tol) {
  require_same_size(p.size(), q.size(), "sparps_check");
  std::vector<double> ratio(p.size());
  for (std::size_t y = 0; y < ratio.size(); ++y) ratio[y] = p.log_r[y] - q.log_r[y];
  return sparps_from_ratios(ratio, m, tol);
}

SparpsResult sparps_check(const TokenDist& p, const TokenDist& q, std::size_t m, double tol) {
  require_same_size(p.size(), q.size(), "sparps_check");
  std::vector<double> ratio(p.size());
  for (std::size_t y = 0; y < ratio.size(); ++y) ratio[y] = p.log_p()[y] - q.log_p()[y];
  return sparps_from_ratios(ratio, m, tol);
}

double sparps_dr_bound(std::size_t m, std::size_t n, double log_M, double abs_log_alpha) {
  return static_cast<double>(m) / static_cast<double>(n) * (log_M + abs_log_alpha);
}

double smoothed_token_log_ratio_bound(std::size_t m, std::size_t n, double bound_B) {
  return 2.0 * static_cast<double>(m) * bound_B / static_cast<double>(n);
}

ExpectedSparpsCurve expected_sparps(const RpdEnsemble& ensemble_p, const RpdEnsemble& ensemble_q,
                                    const std::vector<std::size_t>& m_values,
                                    const std::vector<double>& c_values) {
  if (ensemble_p.size() < 2 || ensemble_q.size() < 2) {
    throw Error(Errc::misaligned_ensembles, "need at least 2 seeds per side");
  }
  const std::size_t prompts = ensemble_p.front().size();
  if (prompts == 0) throw Error(Errc::misaligned_ensembles, "no prompts");
  const std::size_t n = ensemble_p.front().front().size();
  for (const auto* side : {&ensemble_p, &ensemble_q}) {
    for (const auto& seed : *side) {
      if (seed.size() != prompts) {
        throw Error(Errc::misaligned_ensembles, "prompt counts differ across seeds");
      }
      for (const auto& r : seed) {
        if (r.size() != n) throw Error(Errc::misaligned_ensembles, "vocabulary sizes differ");
      }
    }
  }
  for (double c : c_values) {
    if (!(c > 0.0 && c <= 1.0)) throw Error(Errc::config_invalid, "C must lie in (0, 1]");
  }

  auto seed_mean = [n](const RpdEnsemble& e, std::size_t x) {
    std::vector<double> acc(n, 0.0);
    for (const auto& seed : e) {
      for (std::size_t y = 0; y < n; ++y) acc[y] += seed[x].log_r[y];
    }
    for (double& v : acc) v /= static_cast<double>(e.size());
    return acc;
  };

  // per_prompt[m index][x] = B_x(m)
  std::vector<std::vector<double>> per_prompt(m_values.size(), std::vector<double>(prompts));
  for (std::size_t x = 0; x < prompts; ++x) {
    const auto mp = seed_mean(ensemble_p, x);
    const auto mq = seed_mean(ensemble_q, x);
    std::vector<double> gap(n);
    for (std::size_t y = 0; y < n; ++y) gap[y] = std::abs(mp[y] - mq[y]);
    std::sort(gap.begin(), gap.end(), std::greater<>());
    for (std::size_t i = 0; i < m_values.size(); ++i) {
      per_prompt[i][x] = m_values[i] < n ? gap[m_values[i]] : 0.0;
    }
  }

  ExpectedSparpsCurve curve;
  curve.m_values = m_values;
  curve.c_values = c_values;
  curve.prompt_count = prompts;
  curve.seed_count = std::min(ensemble_p.size(), ensemble_q.size());
  for (auto& column : per_prompt) {
    std::sort(column.begin(), column.end());
    std::vector<double> row;
    for (double c : c_values) {
      auto k = static_cast<std::size_t>(std::ceil(c * static_cast<double>(prompts) - 1e-12));
      k = std::clamp<std::size_t>(k, 1, prompts);
      row.push_back(column[k - 1]);
    }
    curve.b_matrix.push_back(std::move(row));
  }
  return curve;
}

std::string_view to_string(LiraKind kind) noexcept {
  switch (kind) {
    case LiraKind::t_x: return "t_x";
    case LiraKind::v_x_cp_delta_r: return "v_x_cp_delta_r";
    case LiraKind::v_x_scp: return "v_x_scp";
    case LiraKind::v_x_cp_delta: return "v_x_cp_delta";
  }
  return "unknown";
}

LiraBound lira_bound_tx(const AggregationResult& r1, const TokenDist& q) {
  require_same_size(r1.exact_log_p.size(), q.size(), "lira_bound_tx");
  double log_tq = 0.0;
  switch (r1.method) {
    case Method::cp_delta_r:
      log_tq = mean(q.log_p());
      break;
    case Method::scp_delta_r:
      log_tq = r1.smoothed_inputs->second.rpd.log_t;
      break;
    default:
      throw Error(Errc::method_mismatch,
                  fmt::format("t_x needs an RPD-based aggregation, got {}", to_string(r1.method)));
  }
  LiraBound b;
  b.kind = LiraKind::t_x;
  b.k_x_term = r1.k_x;
  b.typical_ratio_term = r1.log_typical() - log_tq;
  b.value = b.k_x_term + b.typical_ratio_term;
  return b;
}

LiraBound lira_bound_vx(const AggregationResult& r1, const AggregationResult& r0,
                        const Rpd& q_side, const Rpd& p0_side, Token y) {
  if (r1.method != r0.method) {
    throw Error(Errc::method_mismatch, "r1 and r0 were built by different methods");
  }
  const std::size_t n = r1.exact_log_p.size();
  require_same_size(r0.exact_log_p.size(), n, "lira_bound_vx");
  require_same_size(q_side.size(), n, "lira_bound_vx");
  require_same_size(p0_side.size(), n, "lira_bound_vx");
  if (y >= n) throw Error(Errc::token_out_of_range, fmt::format("token {} >= {}", y, n));

  LiraBound b;
  b.k_x_term = r1.k_x;
  switch (r1.method) {
    case Method::cp_delta:
      b.kind = LiraKind::v_x_cp_delta;
      b.token_term = std::max(0.0, (q_side.log_r[y] + q_side.log_t) -
                                       (p0_side.log_r[y] + p0_side.log_t));
      break;
    case Method::cp_delta_r:
    case Method::scp_delta_r:
      b.kind = r1.method == Method::cp_delta_r ? LiraKind::v_x_cp_delta_r : LiraKind::v_x_scp;
      b.token_term = std::max(0.0, q_side.log_r[y] - p0_side.log_r[y]);
      b.typical_ratio_term = r1.log_typical() - r0.log_typical();
      break;
    default:
      throw Error(Errc::method_mismatch, "v_x is defined for cp_delta, cp_delta_r, scp_delta_r");
  }
  b.value = b.token_term + b.typical_ratio_term + b.k_x_term;
  return b;
}

UtilityBounds utility_bounds(const TokenDist& p, const TokenDist& q, const TokenDist& b,
                             std::size_t m) {
  require_same_size(p.size(), q.size(), "utility_bounds");
  require_same_size(b.size(), p.size(), "utility_bounds");
  const Rpd rp = to_rpd(p);
  const Rpd rb = to_rpd(b);
  const SmoothedRpd sp = smooth_m(rp, rb, m);

  std::vector<double> b_mass, residual;
  for (std::size_t y = 0; y < p.size(); ++y) {
    if (sp.is_kept(static_cast<Token>(y))) continue;
    b_mass.push_back(b.prob(static_cast<Token>(y)));
    residual.push_back(p.prob(static_cast<Token>(y)) * (rp.log_r[y] - rb.log_r[y]));
  }
  UtilityBounds u;
  u.tv_aggregation_bound = total_variation(p, q);
  u.epsilon = std::exp(rp.log_t - rb.log_t) * pairwise_sum(b_mass);
  u.kl_smoothing_bound = std::log1p(u.epsilon) + pairwise_sum(residual);
  u.tv_smoothing_bound = std::sqrt(std::max(0.0, u.kl_smoothing_bound) / 2.0);
  return u;
}

}  // namespace naf
