#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "naf/aggregate.hpp"
#include "naf/analysis.hpp"
#include "naf/logmath.hpp"

using namespace naf;

namespace {

double max_gap(std::span<const double> a, std::span<const double> b) {
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < a.size(); ++y) hi = std::max(hi, a[y] - b[y]);
  return hi;
}

std::vector<double> rel(std::span<const double> log_p) {
  return oracle::log_rpd({log_p.begin(), log_p.end()});
}

}  // namespace

TEST_CASE("table: spike example under CP-Δ and CP-Δr") {
  const TokenDist p = test::from_probs(test::example_p());
  const TokenDist q = test::uniform(10);

  const auto a = cp_delta(p, q);
  CHECK(std::abs(a.dist.prob(0) - 0.53) <= 0.01);
  const Rpd ra = to_rpd(a.dist);
  CHECK(std::abs(std::exp(ra.log_r[0]) - 7.9) <= 0.01 * 7.9);
  for (Token y = 1; y < 10; ++y) {
    CHECK(std::abs(a.dist.prob(y) - 0.05) <= 0.01);
    CHECK(std::abs(std::exp(ra.log_r[y]) - 0.79) <= 0.01);
  }
  CHECK(a.k_x == doctest::Approx(std::log(1.0 / 0.19)).epsilon(1e-12));

  const auto b = cp_delta_r(p, q);
  const Rpd rb = to_rpd(b.dist);
  CHECK(std::abs(b.dist.prob(0) - 0.15) <= 0.01);
  CHECK(std::abs(std::exp(rb.log_r[0]) - 1.5) <= 0.01);
  for (Token y = 1; y < 10; ++y) {
    CHECK(std::abs(b.dist.prob(y) - 0.09) <= 0.01);
    CHECK(std::abs(std::exp(rb.log_r[y]) - 0.96) <= 0.01);
  }
}

TEST_CASE("aggregations of identical inputs return the input with k_x = 0") {
  std::mt19937_64 rng(21);
  const TokenDist p = test::random_dist(rng, 40);
  for (const auto& r : {cp_delta(p, p), cp_delta_r(p, p), cp_delta_kl(p, p)}) {
    for (Token y = 0; y < p.size(); ++y) CHECK(r.dist.log_p()[y] == doctest::Approx(p.log_p()[y]));
    CHECK(std::abs(r.k_x) <= 1e-12);
  }
}

TEST_CASE("two-token example for each aggregation") {
  const TokenDist p = test::from_probs({0.8, 0.2});
  const TokenDist q = test::from_probs({0.5, 0.5});
  const auto a = cp_delta(p, q);
  CHECK(a.dist.prob(0) == doctest::Approx(5.0 / 7.0).epsilon(1e-12));
  CHECK(a.dist.prob(1) == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
  CHECK(a.k_x == doctest::Approx(std::log(10.0 / 7.0)).epsilon(1e-12));
  const auto b = cp_delta_r(p, q);
  CHECK(b.dist.prob(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(b.dist.prob(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(b.k_x == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
  const auto c = cp_delta_kl(p, q);
  const double z = std::sqrt(0.40) + std::sqrt(0.10);
  CHECK(c.dist.prob(0) == doctest::Approx(std::sqrt(0.40) / z).epsilon(1e-12));
  CHECK(c.dist.prob(1) == doctest::Approx(std::sqrt(0.10) / z).epsilon(1e-12));
}

TEST_CASE("geometric mean on the spike example") {
  const auto r = cp_delta_kl(test::from_probs(test::example_p()), test::uniform(10));
  const double z = std::sqrt(0.091) + 9.0 * std::sqrt(0.001);
  CHECK(r.dist.prob(0) == doctest::Approx(std::sqrt(0.091) / z).epsilon(1e-12));
  CHECK(r.k_x >= 0.0);
}

TEST_CASE("aggregations agree with linear-space oracles") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = test::random_size(rng, 2, 300);
    const TokenDist p = test::random_dist(rng, n, 3.0), q = test::random_dist(rng, n, 3.0);
    const auto pp = oracle::probs_from_logs(test::logs(p)), qp = oracle::probs_from_logs(test::logs(q));
    const auto a = oracle::cp_delta(pp, qp);
    const auto b = oracle::cp_delta_r(pp, qp);
    const auto ra = cp_delta(p, q), rb = cp_delta_r(p, q);
    for (std::size_t y = 0; y < n; ++y) {
      REQUIRE(std::exp(ra.exact_log_p[y]) == doctest::Approx(a[y]).epsilon(1e-10));
      REQUIRE(std::exp(rb.exact_log_p[y]) == doctest::Approx(b[y]).epsilon(1e-10));
    }
  }
}

TEST_CASE("CP-Δ tightness: divergence to both inputs equals D_m") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = test::random_size(rng, 2, 512);
    const TokenDist p = test::random_dist(rng, n, 3.0), q = test::random_dist(rng, n, 3.0);
    const auto r = cp_delta(p, q);
    const double d_m = divergences(p, q).d_m;
    REQUIRE(std::abs(max_gap(r.exact_log_p, p.log_p()) - d_m) <= 1e-9);
    REQUIRE(std::abs(max_gap(r.exact_log_p, q.log_p()) - d_m) <= 1e-9);
    REQUIRE(r.k_x == doctest::Approx(d_m).epsilon(1e-12));
  }
}

TEST_CASE("CP-Δr tightness and the normalization identity Z tr = exp(-D_r)") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = test::random_size(rng, 2, 512);
    const TokenDist p = test::random_dist(rng, n, 3.0), q = test::random_dist(rng, n, 3.0);
    const auto r = cp_delta_r(p, q);
    const double d_r = divergences(p, q).d_r;
    const auto rr = rel(r.exact_log_p), rp = rel(p.log_p()), rq = rel(q.log_p());
    REQUIRE(std::abs(max_gap(rr, rp) - d_r) <= 1e-9);
    REQUIRE(std::abs(max_gap(rr, rq) - d_r) <= 1e-9);
    REQUIRE(r.k_x == doctest::Approx(d_r).epsilon(1e-12));
    // Z = sum min(rp, rq)
    std::vector<double> u(n);
    for (std::size_t y = 0; y < n; ++y) u[y] = std::min(rp[y], rq[y]);
    const double log_z = log_sum_exp(u);
    REQUIRE(std::abs(log_z + r.log_typical() + d_r) <= 1e-9);
  }
}

TEST_CASE("aggregation outputs are floored distributions with k_x >= 0") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = test::random_size(rng, 2, 2000);
    const TokenDist p = test::random_dist(rng, n, 15.0), q = test::random_dist(rng, n, 15.0);
    const TokenDist b = test::random_dist(rng, n, 15.0);
    for (const auto& r : {cp_delta(p, q), cp_delta_r(p, q), cp_delta_kl(p, q),
                          scp_delta_r(b, p, q, std::min<std::size_t>(10, n))}) {
      CHECK(r.k_x >= -1e-12);
      CHECK(std::abs(log_sum_exp(r.dist.log_p())) <= 1e-9);
      CHECK(*std::min_element(r.dist.log_p().begin(), r.dist.log_p().end()) >= floor_bound(n) - 1e-12);
      CHECK(std::abs(log_sum_exp(r.exact_log_p)) <= 1e-9);
    }
  }
}

TEST_CASE("aggregation dimension errors") {
  CHECK_ERRC(cp_delta(test::uniform(2), test::uniform(3)), Errc::dimension_mismatch);
  CHECK_ERRC(cp_delta_r(test::uniform(2), test::uniform(3)), Errc::dimension_mismatch);
  CHECK_ERRC(cp_delta_kl(test::uniform(2), test::uniform(3)), Errc::dimension_mismatch);
  CHECK_ERRC(scp_delta_r(test::uniform(3), test::uniform(2), test::uniform(2), 1),
             Errc::dimension_mismatch);
  CHECK_ERRC(scp_delta_r(test::uniform(3), test::uniform(3), test::uniform(3), 0), Errc::m_out_of_range);
  CHECK_ERRC(scp_delta_r(test::uniform(3), test::uniform(3), test::uniform(3), 4), Errc::m_out_of_range);
  CHECK_ERRC(smooth_m(to_rpd(test::uniform(3)), to_rpd(test::uniform(4)), 1), Errc::dimension_mismatch);
}

TEST_CASE("smooth_m: m = n keeps rp unchanged") {
  std::mt19937_64 rng(26);
  const Rpd rp = to_rpd(test::random_dist(rng, 30)), rb = to_rpd(test::random_dist(rng, 30));
  const SmoothedRpd s = smooth_m(rp, rb, 30);
  CHECK(s.log_beta == 0.0);
  CHECK(s.kept.size() == 30);
  for (std::size_t y = 0; y < 30; ++y) CHECK(s.rpd.log_r[y] == rp.log_r[y]);
}

TEST_CASE("smooth_m: rp = rb gives rb with log beta = 0 for every m") {
  std::mt19937_64 rng(27);
  const Rpd r = to_rpd(test::random_dist(rng, 25));
  for (std::size_t m = 1; m <= 25; ++m) {
    const SmoothedRpd s = smooth_m(r, r, m);
    CHECK(s.log_beta == 0.0);
    for (std::size_t y = 0; y < 25; ++y) CHECK(s.rpd.log_r[y] == doctest::Approx(r.log_r[y]));
    // every score is zero, so ties resolve to the lowest indices
    for (std::size_t i = 0; i < m; ++i) CHECK(s.kept[i] == i);
  }
}

TEST_CASE("smooth_m: four-token example") {
  const Rpd rp = to_rpd(test::from_probs({0.7, 0.1, 0.1, 0.1}));
  const Rpd rb = to_rpd(test::uniform(4));
  const SmoothedRpd s = smooth_m(rp, rb, 1);
  REQUIRE(s.kept == std::vector<Token>{0});
  CHECK(s.log_beta == doctest::Approx(-0.3648).epsilon(1e-3));
  CHECK(std::exp(s.rpd.log_r[0]) == doctest::Approx(2.987).epsilon(1e-3));
  for (std::size_t y = 1; y < 4; ++y) CHECK(std::exp(s.rpd.log_r[y]) == doctest::Approx(0.694).epsilon(1e-3));
  CHECK(oracle::best_smoothing_subset(test::logs(test::from_probs({0.7, 0.1, 0.1, 0.1})),
                                      test::logs(test::uniform(4)), 1) == std::vector<std::size_t>{0});
}

TEST_CASE("smooth_m: kept set is the residual-minimizing subset") {
  std::mt19937_64 rng(28);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = test::random_size(rng, 2, 9);
    const std::size_t m = test::random_size(rng, 1, n);
    const TokenDist p = test::random_dist(rng, n, 2.0), b = test::random_dist(rng, n, 2.0);
    const SmoothedRpd s = smooth_m(to_rpd(p), to_rpd(b), m);
    const auto best = oracle::best_smoothing_subset(test::logs(p), test::logs(b), m);
    REQUIRE(std::vector<std::size_t>(s.kept.begin(), s.kept.end()) == best);
  }
}

TEST_CASE("smooth_m: invariants") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = test::random_size(rng, 2, 3000);
    const std::size_t m = test::random_size(rng, 1, std::min<std::size_t>(n, 50));
    const double scale = trial % 2 ? 20.0 : 2.0;
    const Rpd rp = to_rpd(test::random_dist(rng, n, scale));
    const Rpd rb = to_rpd(test::random_dist(rng, n, scale));
    const SmoothedRpd s = smooth_m(rp, rb, m);
    REQUIRE(s.kept.size() == m);
    CHECK(std::adjacent_find(s.kept.begin(), s.kept.end()) == s.kept.end());
    CHECK(std::is_sorted(s.kept.begin(), s.kept.end()));
    CHECK(s.kept.back() < n);
    CHECK(std::abs(oracle::sum(s.rpd.log_r)) <= 1e-6 * static_cast<double>(n));
    long double identity = 0.0L;
    for (Token y : s.kept) identity += rb.log_r[y] - rp.log_r[y];
    CHECK(std::abs(static_cast<double>(n) * s.log_beta - static_cast<double>(identity)) <= 1e-6);
    CHECK(std::abs(s.log_beta) <= static_cast<double>(m) / static_cast<double>(n) * 40.0);
    // log_t makes the smoothed vector a normalized distribution
    CHECK(std::abs(log_sum_exp(s.log_probs())) <= 1e-9);
    for (std::size_t y = 0; y < n; ++y) {
      const double expect = s.log_beta + (s.is_kept(static_cast<Token>(y)) ? rp.log_r[y] : rb.log_r[y]);
      REQUIRE(s.rpd.log_r[y] == expect);
    }
  }
}

TEST_CASE("smooth_m: smoothing an already smoothed RPD again rescales by (n - m)/n") {
  // Re-smoothing re-applies the rescale, so the operator is not idempotent
  // unless log beta = 0. When the kept set survives, log beta' = log beta (n - m) / n.
  std::mt19937_64 rng(30);
  int same_kept = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = test::random_size(rng, 5, 500);
    const std::size_t m = test::random_size(rng, 1, n / 2);
    const Rpd rp = to_rpd(test::random_dist(rng, n, 3.0));
    const Rpd rb = to_rpd(test::random_dist(rng, n, 3.0));
    const SmoothedRpd once = smooth_m(rp, rb, m);
    const SmoothedRpd twice = smooth_m(once.rpd, rb, m);
    if (twice.kept != once.kept) continue;
    ++same_kept;
    const double factor = static_cast<double>(n - m) / static_cast<double>(n);
    CHECK(std::abs(twice.log_beta - once.log_beta * factor) <= 1e-9);
    for (std::size_t y = 0; y < n; ++y) {
      const double expect = once.is_kept(static_cast<Token>(y)) ? once.rpd.log_r[y] + twice.log_beta
                                                                : rb.log_r[y] + twice.log_beta;
      REQUIRE(std::abs(twice.rpd.log_r[y] - expect) <= 1e-9);
    }
  }
  CHECK(same_kept >= 100);
  // With log beta = 0 it is a fixed point.
  const Rpd r = to_rpd(test::random_dist(rng, 20));
  const SmoothedRpd a = smooth_m(r, r, 3);
  const SmoothedRpd b = smooth_m(a.rpd, r, 3);
  CHECK(a.kept == b.kept);
  for (std::size_t y = 0; y < 20; ++y) CHECK(std::abs(a.rpd.log_r[y] - b.rpd.log_r[y]) <= 1e-9);
}

TEST_CASE("SCP-Δr: identical constituents") {
  std::mt19937_64 rng(31);
  const TokenDist p = test::random_dist(rng, 60), b = test::random_dist(rng, 60);
  for (int which = 0; which < 2; ++which) {
    const TokenDist& base = which == 0 ? p : b;
    for (std::size_t m : {1, 10, 60}) {
      const auto r = scp_delta_r(base, p, p, m);
      CHECK(r.k_x == 0.0);
      REQUIRE(r.smoothed_inputs.has_value());
      CHECK(r.method == Method::scp_delta_r);
      // p = q = b returns p; p = q != b returns the common smoothed distribution,
      // which is p itself only when nothing is smoothed
      const auto expect = r.smoothed_inputs->first.log_probs();
      for (Token y = 0; y < 60; ++y) CHECK(r.exact_log_p[y] == doctest::Approx(expect[y]));
      if (which == 0 || m == 60) {
        for (Token y = 0; y < 60; ++y) CHECK(r.dist.log_p()[y] == doctest::Approx(p.log_p()[y]));
      }
    }
  }
}

TEST_CASE("SCP-Δr: k_x is D_r of the smoothed inputs and Remark 2 holds") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = test::random_size(rng, 3, 400);
    const std::size_t m = test::random_size(rng, 1, (n - 1) / 2);
    const TokenDist p = test::random_dist(rng, n, 3.0), q = test::random_dist(rng, n, 3.0);
    const TokenDist b = test::random_dist(rng, n, 3.0);
    const auto r = scp_delta_r(b, p, q, m);
    const auto& [sp, sq] = *r.smoothed_inputs;
    long double gap = 0.0L;
    for (std::size_t y = 0; y < n; ++y) gap += std::fabs(sp.rpd.log_r[y] - sq.rpd.log_r[y]);
    CHECK(r.k_x == doctest::Approx(static_cast<double>(gap / (2.0L * n))).epsilon(1e-10));
    REQUIRE(sparps_check(sp.rpd, sq.rpd, 2 * m).holds);
  }
}

TEST_CASE("SCP-Δr k_x is far below CP-Δr's for independent constituents at n = 32000") {
  std::mt19937_64 rng(33);
  const std::size_t n = 32000;
  const TokenDist b = test::random_dist(rng, n, 2.0);
  std::vector<double> scp, cpr;
  for (int prompt = 0; prompt < 40; ++prompt) {
    const TokenDist p = test::random_dist(rng, n, 2.0), q = test::random_dist(rng, n, 2.0);
    scp.push_back(scp_delta_r(b, p, q, 10).k_x);
    cpr.push_back(cp_delta_r(p, q).k_x);
  }
  const double scp99 = oracle::kth_largest(scp, 1), cpr99 = oracle::kth_largest(cpr, 1);
  CHECK(scp99 * 100.0 < cpr99);
}

TEST_CASE("constant_base") {
  std::mt19937_64 rng(34);
  const TokenDist d = test::random_dist(rng, 30);
  const TokenDist single = constant_base({d});
  for (Token y = 0; y < 30; ++y) CHECK(single.log_p()[y] == doctest::Approx(d.log_p()[y]));
  const TokenDist u = constant_base({test::uniform(5), test::uniform(5)});
  for (Token y = 0; y < 5; ++y) CHECK(u.log_p()[y] == doctest::Approx(std::log(0.2)));

  std::vector<TokenDist> refs;
  for (int i = 0; i < 100; ++i) refs.push_back(test::random_dist(rng, 64, 3.0));
  const TokenDist base = constant_base(refs);
  std::vector<double> avg(64, 0.0);
  for (Token y = 0; y < 64; ++y) {
    long double s = 0.0L;
    for (const auto& r : refs) s += r.log_p()[y];
    avg[y] = static_cast<double>(s / refs.size());
  }
  const auto expect = oracle::floor_logs(avg);
  for (Token y = 0; y < 64; ++y) CHECK(base.log_p()[y] == doctest::Approx(expect[y]).epsilon(1e-11));

  CHECK_ERRC(constant_base({}), Errc::empty_list);
  CHECK_ERRC(constant_base({test::uniform(3), test::uniform(4)}), Errc::dimension_mismatch);
}

TEST_CASE("method names") {
  CHECK(to_string(Method::cp_delta) == "cp_delta");
  CHECK(to_string(Method::scp_delta_r) == "scp_delta_r");
}
