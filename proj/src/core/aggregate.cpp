#include "naf/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "naf/error.hpp"
#include "naf/logmath.hpp"

namespace naf {

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::cp_delta: return "cp_delta";
    case Method::cp_delta_r: return "cp_delta_r";
    case Method::cp_delta_kl: return "cp_delta_kl";
    case Method::scp_delta_r: return "scp_delta_r";
  }
  return "unknown";
}

bool SmoothedRpd::is_kept(Token y) const {
  return std::binary_search(kept.begin(), kept.end(), y);
}

std::vector<double> SmoothedRpd::log_probs() const {
  std::vector<double> out(rpd.log_r);
  for (double& v : out) v += rpd.log_t;
  return out;
}

double AggregationResult::log_typical() const { return mean(exact_log_p); }

namespace {

AggregationResult finish(std::vector<double> unnormalized, double k_x, Method method) {
  AggregationResult r{floor_and_normalize(unnormalized), log_normalize(unnormalized), k_x,
                      method, std::nullopt};
  return r;
}

// CP over two log-vectors: normalize exp(min(a, b)).
std::vector<double> pointwise_min(std::span<const double> a, std::span<const double> b) {
  std::vector<double> u(a.size());
  for (std::size_t y = 0; y < a.size(); ++y) u[y] = std::min(a[y], b[y]);
  return u;
}

double half_mean_abs_gap(std::span<const double> a, std::span<const double> b) {
  std::vector<double> gaps(a.size());
  for (std::size_t y = 0; y < a.size(); ++y) gaps[y] = std::abs(a[y] - b[y]);
  return pairwise_sum(gaps) / (2.0 * static_cast<double>(a.size()));
}

}  // namespace

AggregationResult cp_delta(const TokenDist& p, const TokenDist& q) {
  require_same_size(p.size(), q.size(), "cp_delta");
  auto u = pointwise_min(p.log_p(), q.log_p());
  const double k_x = std::max(0.0, -log_sum_exp(u));
  return finish(std::move(u), k_x, Method::cp_delta);
}

AggregationResult cp_delta_r(const TokenDist& p, const TokenDist& q) {
  require_same_size(p.size(), q.size(), "cp_delta_r");
  const Rpd rp = to_rpd(p);
  const Rpd rq = to_rpd(q);
  auto u = pointwise_min(rp.log_r, rq.log_r);
  return finish(std::move(u), half_mean_abs_gap(rp.log_r, rq.log_r), Method::cp_delta_r);
}

AggregationResult cp_delta_kl(const TokenDist& p, const TokenDist& q) {
  require_same_size(p.size(), q.size(), "cp_delta_kl");
  std::vector<double> u(p.size());
  for (std::size_t y = 0; y < u.size(); ++y) u[y] = 0.5 * (p.log_p()[y] + q.log_p()[y]);
  const auto r = log_normalize(u);
  double k_x = 0.0;
  for (std::size_t y = 0; y < u.size(); ++y) {
    k_x = std::max({k_x, r[y] - p.log_p()[y], r[y] - q.log_p()[y]});
  }
  return finish(std::move(u), k_x, Method::cp_delta_kl);
}

SmoothedRpd smooth_m(const Rpd& rp, const Rpd& rb, std::size_t m) {
  require_same_size(rp.size(), rb.size(), "smooth_m");
  const std::size_t n = rp.size();
  if (m < 1 || m > n) {
    throw Error(Errc::m_out_of_range, fmt::format("m = {} outside [1, {}]", m, n));
  }

  SmoothedRpd out;
  out.m = m;
  if (m == n) {
    out.rpd = rp;
    out.kept.resize(n);
    std::iota(out.kept.begin(), out.kept.end(), Token{0});
    return out;
  }

  std::vector<double> score(n);
  for (std::size_t y = 0; y < n; ++y) {
    score[y] = std::exp(rp.log_r[y] + rp.log_t) * (rp.log_r[y] - rb.log_r[y]);
  }
  std::vector<Token> order(n);
  std::iota(order.begin(), order.end(), Token{0});
  auto better = [&score](Token a, Token b) {
    return score[a] > score[b] || (score[a] == score[b] && a < b);
  };
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m - 1),
                   order.end(), better);
  out.kept.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
  std::sort(out.kept.begin(), out.kept.end());

  // n log beta = sum over kept of (log rb - log rp).
  std::vector<double> shift(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Token y = out.kept[i];
    shift[i] = rb.log_r[y] - rp.log_r[y];
  }
  out.log_beta = pairwise_sum(shift) / static_cast<double>(n);

  out.rpd.log_r.resize(n);
  for (std::size_t y = 0; y < n; ++y) out.rpd.log_r[y] = out.log_beta + rb.log_r[y];
  for (Token y : out.kept) out.rpd.log_r[y] = out.log_beta + rp.log_r[y];
  out.rpd.log_t = -log_sum_exp(out.rpd.log_r);
  return out;
}

AggregationResult scp_delta_r(const TokenDist& b, const TokenDist& p, const TokenDist& q,
                              std::size_t m) {
  require_same_size(p.size(), q.size(), "scp_delta_r");
  require_same_size(b.size(), p.size(), "scp_delta_r");
  const Rpd rb = to_rpd(b);
  SmoothedRpd sp = smooth_m(to_rpd(p), rb, m);
  SmoothedRpd sq = smooth_m(to_rpd(q), rb, m);
  auto u = pointwise_min(sp.rpd.log_r, sq.rpd.log_r);
  const double k_x = half_mean_abs_gap(sp.rpd.log_r, sq.rpd.log_r);
  AggregationResult r = finish(std::move(u), k_x, Method::scp_delta_r);
  r.smoothed_inputs.emplace(std::move(sp), std::move(sq));
  return r;
}

TokenDist constant_base(const std::vector<TokenDist>& reference_dists) {
  if (reference_dists.empty()) throw Error(Errc::empty_list, "constant_base needs inputs");
  const std::size_t n = reference_dists.front().size();
  std::vector<std::vector<double>> columns(n, std::vector<double>(reference_dists.size()));
  for (std::size_t i = 0; i < reference_dists.size(); ++i) {
    require_same_size(reference_dists[i].size(), n, "constant_base");
    for (std::size_t y = 0; y < n; ++y) columns[y][i] = reference_dists[i].log_p()[y];
  }
  std::vector<double> avg(n);
  for (std::size_t y = 0; y < n; ++y) avg[y] = mean(columns[y]);
  return floor_and_normalize(avg);
}

}  // namespace naf
