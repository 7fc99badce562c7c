#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "naf/aggregate.hpp"
#include "naf/analysis.hpp"
#include "naf/logmath.hpp"

using namespace naf;

namespace {

Rpd rpd_from_log_r(std::vector<double> log_r) {
  Rpd r;
  r.log_r = std::move(log_r);
  return r;
}

// p = alpha q off a set of `outliers` tokens, arbitrary (bounded) elsewhere.
std::pair<TokenDist, TokenDist> make_sparps_pair(std::mt19937_64& rng, std::size_t n,
                                                 std::size_t outliers, double log_alpha,
                                                 double log_m) {
  auto q_raw = oracle::random_logits(rng, n, 1.0);
  const TokenDist q = floor_and_normalize(q_raw);
  std::vector<double> p_raw(q.log_p().begin(), q.log_p().end());
  for (double& v : p_raw) v += log_alpha;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::uniform_real_distribution<double> jump(-log_m, log_m);
  for (std::size_t i = 0; i < outliers; ++i) p_raw[idx[i]] = q.log_p()[idx[i]] + jump(rng);
  // Not normalized on purpose: sparps_check works on RPDs, which ignore scale.
  std::vector<double> logs(p_raw);
  const double z = log_sum_exp(logs);
  for (double& v : logs) v -= z;
  return {floor_and_normalize(logs), q};
}

double realized_max(std::span<const double> a, std::span<const double> b) {
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < a.size(); ++y) hi = std::max(hi, a[y] - b[y]);
  return hi;
}

}  // namespace

TEST_CASE("sparps_check: identical inputs hold with log alpha 0") {
  std::mt19937_64 rng(41);
  const TokenDist p = test::random_dist(rng, 20);
  const SparpsResult r = sparps_check(p, p, 1);
  CHECK(r.holds);
  REQUIRE(r.log_alpha.has_value());
  CHECK(*r.log_alpha == 0.0);
  REQUIRE(r.witness_set.has_value());
  CHECK(r.witness_set->size() == 1);
}

TEST_CASE("sparps_check: spike against uniform is 1-SpaRPS with A = {0}") {
  const TokenDist p = test::from_probs(test::example_p());
  const TokenDist q = test::uniform(10);
  const SparpsResult r = sparps_check(p, q, 1);
  CHECK(r.holds);
  CHECK(*r.witness_set == std::vector<Token>{0});
  CHECK(*r.log_alpha == doctest::Approx(std::log(0.01 / 0.1)));
  CHECK_FALSE(sparps_check(p, q, 0).holds);
  std::vector<double> ratio(10);
  for (std::size_t y = 0; y < 10; ++y) ratio[y] = p.log_p()[y] - q.log_p()[y];
  CHECK(oracle::minimal_sparps_m(ratio, kDefaultSparpsTol) == 1);
}

TEST_CASE("sparps_check: constructed pair with three outliers") {
  std::mt19937_64 rng(42);
  const std::size_t n = 100;
  std::vector<double> q_raw = oracle::random_logits(rng, n, 1.0);
  std::vector<double> p_raw(q_raw);
  for (double& v : p_raw) v += std::log(2.0);
  p_raw[5] += 1.0;
  p_raw[40] -= 2.0;
  p_raw[77] += 3.0;
  const Rpd p = to_rpd(floor_and_normalize(p_raw)), q = to_rpd(floor_and_normalize(q_raw));
  const SparpsResult three = sparps_check(p, q, 3);
  CHECK(three.holds);
  CHECK(*three.witness_set == std::vector<Token>{5, 40, 77});
  CHECK_FALSE(sparps_check(p, q, 2).holds);
}

TEST_CASE("sparps_check agrees with brute force over outlier sets") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = test::random_size(rng, 2, 9);
    // clustered ratios so that many instances are SpaRPS for small m
    std::vector<double> ratio(n);
    std::uniform_int_distribution<int> cluster(0, 2);
    for (double& r : ratio) r = 0.5 * cluster(rng);
    const std::size_t want = oracle::minimal_sparps_m(ratio, kDefaultSparpsTol);
    const Rpd p = rpd_from_log_r(ratio), q = rpd_from_log_r(std::vector<double>(n, 0.0));
    for (std::size_t m = 0; m < n; ++m) {
      const SparpsResult r = sparps_check(p, q, m);
      REQUIRE(r.holds == (m >= want));
      if (!r.holds) continue;
      REQUIRE(r.witness_set->size() == m);
      for (std::size_t y = 0; y < n; ++y) {
        if (std::binary_search(r.witness_set->begin(), r.witness_set->end(), static_cast<Token>(y))) continue;
        REQUIRE(std::abs(ratio[y] - *r.log_alpha) <= r.tolerance);
      }
    }
  }
}

TEST_CASE("sparps_check: holding is monotone in m") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 200;
    const auto [p, q] = make_sparps_pair(rng, n, test::random_size(rng, 0, 30), 0.3, 5.0);
    bool seen = false;
    for (std::size_t m = 0; m < n; ++m) {
      const bool h = sparps_check(p, q, m).holds;
      if (seen) REQUIRE(h);
      seen = seen || h;
    }
    CHECK(seen);
  }
}

TEST_CASE("sparps_check: errors") {
  CHECK_ERRC(sparps_check(test::uniform(3), test::uniform(3), 3), Errc::m_out_of_range);
  CHECK_ERRC(sparps_check(test::uniform(3), test::uniform(4), 1), Errc::dimension_mismatch);
}

TEST_CASE("sparps_dr_bound") {
  CHECK(sparps_dr_bound(20, 32000, 30.0, 10.0) == doctest::Approx(0.025));
  CHECK(sparps_dr_bound(0, 32000, 30.0, 10.0) == 0.0);
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = test::random_size(rng, 50, 2000);
    const std::size_t m = test::random_size(rng, 1, 20);
    const double log_alpha = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
    const double log_m = std::uniform_real_distribution<double>(0.1, 6.0)(rng);
    const auto [p, q] = make_sparps_pair(rng, n, m, log_alpha, log_m);
    const SparpsResult s = sparps_check(p, q, m);
    REQUIRE(s.holds);
    // M bounds the log-ratio of the RPDs on A, alpha is the RPD-level common ratio.
    const Rpd rp = to_rpd(p), rq = to_rpd(q);
    const SparpsResult rel = sparps_check(rp, rq, m);
    REQUIRE(rel.holds);
    double bound_m = 0.0;
    for (std::size_t y = 0; y < n; ++y) bound_m = std::max(bound_m, std::abs(rp.log_r[y] - rq.log_r[y]));
    const double bound = sparps_dr_bound(m, n, bound_m, std::abs(*rel.log_alpha));
    REQUIRE(divergences(p, q).d_r <= bound + 1e-9);
  }
}

TEST_CASE("smoothed token bound constants") {
  const double token = smoothed_token_log_ratio_bound(10, 32000, 40.0);
  CHECK(std::exp(token) < 1.026);
  CHECK(std::exp(token + sparps_dr_bound(20, 32000, 40.0, 0.0)) < 1.053);
}

TEST_CASE("expected_sparps: identical ensembles give zero everywhere") {
  std::mt19937_64 rng(46);
  RpdEnsemble e(3);
  for (auto& seed : e) {
    for (int x = 0; x < 5; ++x) seed.push_back(to_rpd(test::random_dist(rng, 30)));
  }
  const auto curve = expected_sparps(e, e, {1, 2, 4}, {0.5, 1.0});
  for (const auto& row : curve.b_matrix) {
    for (double v : row) CHECK(v == 0.0);
  }
  CHECK(curve.prompt_count == 5);
  CHECK(curve.seed_count == 3);
}

TEST_CASE("expected_sparps: single prompt order statistic") {
  RpdEnsemble p(2), q(2);
  const std::vector<double> d{5, 4, 3, 2, 1, 0, 0, 0};
  for (int s = 0; s < 2; ++s) {
    p[s].push_back(rpd_from_log_r(d));
    q[s].push_back(rpd_from_log_r(std::vector<double>(d.size(), 0.0)));
  }
  const auto curve = expected_sparps(p, q, {2}, {1.0});
  CHECK(curve.b_matrix[0][0] == 3.0);
}

TEST_CASE("expected_sparps agrees with a sort-based oracle and is monotone") {
  std::mt19937_64 rng(47);
  const std::size_t seeds = 4, prompts = 23, n = 64;
  RpdEnsemble p(seeds), q(seeds);
  for (std::size_t s = 0; s < seeds; ++s) {
    for (std::size_t x = 0; x < prompts; ++x) {
      p[s].push_back(to_rpd(test::random_dist(rng, n)));
      q[s].push_back(to_rpd(test::random_dist(rng, n)));
    }
  }
  const std::vector<std::size_t> ms{0, 1, 2, 4, 8, 16, 32, 63, 64};
  const std::vector<double> cs{0.1, 0.5, 0.75, 0.9, 1.0};
  const auto curve = expected_sparps(p, q, ms, cs);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    std::vector<double> bx(prompts);
    for (std::size_t x = 0; x < prompts; ++x) {
      std::vector<double> d(n);
      for (std::size_t y = 0; y < n; ++y) {
        long double mp = 0.0L, mq = 0.0L;
        for (std::size_t s = 0; s < seeds; ++s) {
          mp += p[s][x].log_r[y];
          mq += q[s][x].log_r[y];
        }
        d[y] = std::fabs(static_cast<double>((mp - mq) / seeds));
      }
      bx[x] = ms[i] < n ? oracle::kth_largest(d, ms[i] + 1) : 0.0;
    }
    for (std::size_t j = 0; j < cs.size(); ++j) {
      const auto k = static_cast<std::size_t>(std::ceil(cs[j] * prompts - 1e-12));
      CHECK(curve.b_matrix[i][j] == doctest::Approx(oracle::kth_smallest(bx, k)).epsilon(1e-12));
      CHECK(curve.b_matrix[i][j] >= 0.0);
      if (i > 0) CHECK(curve.b_matrix[i][j] <= curve.b_matrix[i - 1][j]);
      if (j > 0) CHECK(curve.b_matrix[i][j] >= curve.b_matrix[i][j - 1]);
    }
  }
}

TEST_CASE("expected_sparps: errors") {
  std::mt19937_64 rng(48);
  RpdEnsemble one(1, {to_rpd(test::random_dist(rng, 8))});
  RpdEnsemble two(2, {to_rpd(test::random_dist(rng, 8))});
  CHECK_ERRC(expected_sparps(one, two, {1}, {1.0}), Errc::misaligned_ensembles);
  RpdEnsemble ragged = two;
  ragged[1].push_back(ragged[1][0]);
  CHECK_ERRC(expected_sparps(ragged, two, {1}, {1.0}), Errc::misaligned_ensembles);
  RpdEnsemble wide(2, {to_rpd(test::random_dist(rng, 9))});
  CHECK_ERRC(expected_sparps(wide, two, {1}, {1.0}), Errc::misaligned_ensembles);
  CHECK_ERRC(expected_sparps(two, two, {1}, {0.0}), Errc::config_invalid);
}

TEST_CASE("t_x: identical constituents give zero") {
  std::mt19937_64 rng(49);
  const TokenDist p = test::random_dist(rng, 50);
  const LiraBound b = lira_bound_tx(cp_delta_r(p, p), p);
  CHECK(std::abs(b.value) <= 1e-12);
  CHECK(b.kind == LiraKind::t_x);
}

TEST_CASE("t_x dominates the realized log-ratio to q") {
  std::mt19937_64 rng(50);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = test::random_size(rng, 2, 400);
    const TokenDist p = test::random_dist(rng, n, 3.0), q = test::random_dist(rng, n, 3.0);
    const TokenDist b = test::random_dist(rng, n, 3.0);
    const auto r = cp_delta_r(p, q);
    const LiraBound t = lira_bound_tx(r, q);
    REQUIRE(realized_max(r.exact_log_p, q.log_p()) <= t.value + 1e-9);
    CHECK(t.value == doctest::Approx(t.k_x_term + t.typical_ratio_term + t.token_term));

    const auto s = scp_delta_r(b, p, q, std::min<std::size_t>(n, 5));
    const LiraBound ts = lira_bound_tx(s, q);
    REQUIRE(realized_max(s.exact_log_p, s.smoothed_inputs->second.log_probs()) <= ts.value + 1e-9);
  }
}

TEST_CASE("t_x rejects raw-probability aggregations") {
  const TokenDist p = test::from_probs({0.8, 0.2}), q = test::uniform(2);
  CHECK_ERRC(lira_bound_tx(cp_delta(p, q), q), Errc::method_mismatch);
  CHECK_ERRC(lira_bound_tx(cp_delta_kl(p, q), q), Errc::method_mismatch);
}

TEST_CASE("v_x: identical p1 and p0 give a non-negative bound over a zero ratio") {
  std::mt19937_64 rng(51);
  const TokenDist p = test::random_dist(rng, 40), q = test::random_dist(rng, 40);
  const auto r = cp_delta_r(p, q);
  for (Token y = 0; y < 40; ++y) {
    const LiraBound v = lira_bound_vx(r, r, to_rpd(q), to_rpd(p), y);
    CHECK(v.value >= 0.0);
    CHECK(v.kind == LiraKind::v_x_cp_delta_r);
  }
}

TEST_CASE("v_x dominates the realized log-ratio for all three variants") {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = test::random_size(rng, 2, 300);
    const double scale = trial % 2 ? 4.0 : 1.0;
    const TokenDist p1 = test::random_dist(rng, n, scale), p0 = test::random_dist(rng, n, scale);
    const TokenDist q = test::random_dist(rng, n, scale), b = test::random_dist(rng, n, scale);
    const std::size_t m = std::min<std::size_t>(n, 1 + trial % 10);

    const auto d1 = cp_delta(p1, q), d0 = cp_delta(p0, q);
    const auto r1 = cp_delta_r(p1, q), r0 = cp_delta_r(p0, q);
    const auto s1 = scp_delta_r(b, p1, q, m), s0 = scp_delta_r(b, p0, q, m);
    for (Token y = 0; y < n; ++y) {
      const LiraBound vd = lira_bound_vx(d1, d0, to_rpd(q), to_rpd(p0), y);
      REQUIRE(d1.exact_log_p[y] - d0.exact_log_p[y] <= vd.value + 1e-9);
      CHECK(vd.kind == LiraKind::v_x_cp_delta);
      const LiraBound vr = lira_bound_vx(r1, r0, to_rpd(q), to_rpd(p0), y);
      REQUIRE(r1.exact_log_p[y] - r0.exact_log_p[y] <= vr.value + 1e-9);
      const LiraBound vs = lira_bound_vx(s1, s0, s1.smoothed_inputs->second.rpd,
                                         s0.smoothed_inputs->first.rpd, y);
      REQUIRE(s1.exact_log_p[y] - s0.exact_log_p[y] <= vs.value + 1e-9);
      CHECK(vs.kind == LiraKind::v_x_scp);
      for (const auto& v : {vd, vr, vs}) {
        CHECK(v.value == doctest::Approx(v.k_x_term + v.typical_ratio_term + v.token_term));
      }
    }
  }
}

TEST_CASE("v_x for a token smoothed on both sides stays within the small-ratio constants") {
  std::mt19937_64 rng(53);
  const std::size_t n = 32000, m = 10;
  const TokenDist b = test::random_dist(rng, n, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    const TokenDist p1 = test::random_dist(rng, n, 2.0), p0 = test::random_dist(rng, n, 2.0);
    const TokenDist q = test::random_dist(rng, n, 2.0);
    const auto s1 = scp_delta_r(b, p1, q, m), s0 = scp_delta_r(b, p0, q, m);
    const auto& q_side = s1.smoothed_inputs->second;
    const auto& p0_side = s0.smoothed_inputs->first;
    int checked = 0;
    for (Token y = 0; y < n && checked < 50; ++y) {
      if (q_side.is_kept(y) || p0_side.is_kept(y)) continue;
      ++checked;
      const LiraBound v = lira_bound_vx(s1, s0, q_side.rpd, p0_side.rpd, y);
      CHECK(v.token_term <= std::log(1.026));
      CHECK(v.value - v.typical_ratio_term <= std::log(1.053));
    }
    CHECK(checked == 50);
  }
}

TEST_CASE("v_x errors") {
  const TokenDist p = test::from_probs({0.7, 0.2, 0.1}), q = test::uniform(3);
  const auto r = cp_delta_r(p, q);
  CHECK_ERRC(lira_bound_vx(r, cp_delta(p, q), to_rpd(q), to_rpd(p), 0), Errc::method_mismatch);
  CHECK_ERRC(lira_bound_vx(cp_delta_kl(p, q), cp_delta_kl(p, q), to_rpd(q), to_rpd(p), 0),
             Errc::method_mismatch);
  CHECK_ERRC(lira_bound_vx(r, r, to_rpd(q), to_rpd(p), 3), Errc::token_out_of_range);
  CHECK(to_string(LiraKind::v_x_scp) == "v_x_scp");
}

TEST_CASE("utility bounds: p = b leaves only the epsilon term") {
  std::mt19937_64 rng(54);
  const TokenDist p = test::random_dist(rng, 100);
  for (std::size_t m : {1, 10, 50}) {
    const UtilityBounds u = utility_bounds(p, p, p, m);
    const SmoothedRpd s = smooth_m(to_rpd(p), to_rpd(p), m);
    long double eps = 0.0L;
    for (Token y = 0; y < 100; ++y) {
      if (!s.is_kept(y)) eps += p.prob(y);
    }
    CHECK(u.epsilon == doctest::Approx(static_cast<double>(eps)).epsilon(1e-12));
    CHECK(u.kl_smoothing_bound == doctest::Approx(std::log1p(u.epsilon)).epsilon(1e-12));
    CHECK(u.tv_aggregation_bound == 0.0);
  }
}

TEST_CASE("utility bounds hold as properties") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = trial < 30 ? 1000 : test::random_size(rng, 2, 300);
    const std::size_t m = std::min<std::size_t>(n, std::vector<std::size_t>{1, 10, 100}[trial % 3]);
    const double scale = trial % 2 ? 3.0 : 1.0;
    const TokenDist p = test::random_dist(rng, n, scale), q = test::random_dist(rng, n, scale);
    const TokenDist b = test::random_dist(rng, n, scale);
    const UtilityBounds u = utility_bounds(p, q, b, m);
    const TokenDist r = cp_delta_r(p, q).dist;
    REQUIRE(total_variation(r, q) <= u.tv_aggregation_bound + 1e-9);
    REQUIRE(total_variation(r, p) <= u.tv_aggregation_bound + 1e-9);
    const auto smoothed = smooth_m(to_rpd(p), to_rpd(b), m).log_probs();
    REQUIRE(oracle::kl_logs(test::logs(p), smoothed) <= u.kl_smoothing_bound + 1e-9);
    CHECK(u.tv_smoothing_bound == doctest::Approx(std::sqrt(std::max(0.0, u.kl_smoothing_bound) / 2.0)));
  }
}
