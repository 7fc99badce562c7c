#pragma once

#include <optional>
#include <vector>

#include "naf/aggregate.hpp"
#include "naf/dist.hpp"

namespace naf {

inline constexpr double kDefaultSparpsTol = 1e-6;

struct SparpsResult {
  bool holds = false;
  std::optional<std::vector<Token>> witness_set;  // sorted, size exactly m
  std::optional<double> log_alpha;
  double tolerance = kDefaultSparpsTol;
};

// Is p proportional to q (in log space, within tol) off at most m tokens?
// The common log-ratio is the centre of the widest 2*tol window over the
// sorted log-ratio vector.
SparpsResult sparps_check(const Rpd& p, const Rpd& q, std::size_t m,
                          double tol = kDefaultSparpsTol);
SparpsResult sparps_check(const TokenDist& p, const TokenDist& q, std::size_t m,
                          double tol = kDefaultSparpsTol);

// D_r upper bound for an m-SpaRPS pair: (m/n)(log M + |log alpha|).
double sparps_dr_bound(std::size_t m, std::size_t n, double log_M, double abs_log_alpha);

// log of the bound on rq~(y)/rp0~(y) for a token smoothed on both sides,
// given |log rb - log r| <= bound_B on kept tokens: 2 m B / n.
double smoothed_token_log_ratio_bound(std::size_t m, std::size_t n, double bound_B);

// Per-seed, per-prompt RPDs: ensemble[seed][prompt].
using RpdEnsemble = std::vector<std::vector<Rpd>>;

struct ExpectedSparpsCurve {
  std::vector<std::size_t> m_values;
  std::vector<double> c_values;
  std::vector<std::vector<double>> b_matrix;  // [m index][c index]
  std::size_t prompt_count = 0;
  std::size_t seed_count = 0;
};

// B_x(m) is the (m+1)-th largest |E log rp - E log rq| over tokens; B(m, C)
// is the ceil(C |X|)-th smallest B_x(m) over prompts.
ExpectedSparpsCurve expected_sparps(const RpdEnsemble& ensemble_p, const RpdEnsemble& ensemble_q,
                                    const std::vector<std::size_t>& m_values,
                                    const std::vector<double>& c_values);

enum class LiraKind { t_x, v_x_cp_delta_r, v_x_scp, v_x_cp_delta };

std::string_view to_string(LiraKind kind) noexcept;

struct LiraBound {
  LiraKind kind = LiraKind::t_x;
  double value = 0.0;  // nats
  double k_x_term = 0.0;
  double typical_ratio_term = 0.0;
  double token_term = 0.0;
};

// t_x = log tr1 - log tq + k_x, bounding log r1(y) - log q(y) for every y.
// For scp_delta_r the smoothed q side stored in r1 replaces q.
LiraBound lira_bound_tx(const AggregationResult& r1, const TokenDist& q);

// v_x(y) for r_i = CP(p_i, q), i in {0, 1}, with both built by the same
// method. q_side/p0_side are the RPDs entering the aggregation (smoothed ones
// for scp_delta_r, plain to_rpd for cp_delta_r and cp_delta).
LiraBound lira_bound_vx(const AggregationResult& r1, const AggregationResult& r0,
                        const Rpd& q_side, const Rpd& p0_side, Token y);

struct UtilityBounds {
  double tv_aggregation_bound = 0.0;
  double kl_smoothing_bound = 0.0;
  double tv_smoothing_bound = 0.0;
  double epsilon = 0.0;
};

UtilityBounds utility_bounds(const TokenDist& p, const TokenDist& q, const TokenDist& b,
                             std::size_t m);

}  // namespace naf
