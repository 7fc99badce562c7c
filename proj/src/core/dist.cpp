#include "naf/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "naf/error.hpp"
#include "naf/logmath.hpp"

namespace naf {

double floor_bound(std::size_t n) {
  return kLogFloor - std::log1p(static_cast<double>(n) * std::exp(kLogFloor));
}

double TokenDist::prob(Token y) const { return std::exp(log_p_.at(y)); }

std::vector<double> TokenDist::probs() const {
  std::vector<double> out(log_p_.size());
  std::transform(log_p_.begin(), log_p_.end(), out.begin(),
                 [](double v) { return std::exp(v); });
  return out;
}

Token TokenDist::argmax() const {
  return static_cast<Token>(std::max_element(log_p_.begin(), log_p_.end()) - log_p_.begin());
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(Errc::dimension_mismatch, fmt::format("{}: {} vs {}", what, a, b));
  }
}

TokenDist floor_and_normalize(std::span<const double> raw_log_scores) {
  if (raw_log_scores.size() < 2) {
    throw Error(Errc::empty_vector,
                fmt::format("need at least 2 scores, got {}", raw_log_scores.size()));
  }
  std::vector<double> v(raw_log_scores.begin(), raw_log_scores.end());
  for (double& x : v) {
    if (std::isnan(x) || x == std::numeric_limits<double>::infinity()) {
      throw Error(Errc::non_finite_input, "NaN or +inf in raw scores");
    }
    if (x == -std::numeric_limits<double>::infinity()) x = kMaskedLogit;
  }
  const double z = log_sum_exp(v);
  bool clamped = false;
  for (double& x : v) {
    x -= z;
    if (x < kLogFloor) {
      x = kLogFloor;
      clamped = true;
    }
  }
  // Without clamping the vector is already normalized.
  if (clamped) {
    const double z2 = log_sum_exp(v);
    for (double& x : v) x -= z2;
  }
  return TokenDist(std::move(v));
}

Rpd to_rpd(const TokenDist& d) {
  Rpd r;
  r.log_t = mean(d.log_p());
  r.log_r.resize(d.size());
  std::transform(d.log_p().begin(), d.log_p().end(), r.log_r.begin(),
                 [t = r.log_t](double v) { return v - t; });
  return r;
}

TokenDist to_dist(const Rpd& r) { return floor_and_normalize(r.log_r); }

double total_variation(const TokenDist& p, const TokenDist& q) {
  require_same_size(p.size(), q.size(), "total_variation");
  std::vector<double> gaps(p.size());
  for (std::size_t y = 0; y < p.size(); ++y) {
    gaps[y] = std::abs(std::exp(p.log_p()[y]) - std::exp(q.log_p()[y]));
  }
  return std::clamp(0.5 * pairwise_sum(gaps), 0.0, 1.0);
}

Divergences divergences(const TokenDist& p, const TokenDist& q) {
  require_same_size(p.size(), q.size(), "divergences");
  const std::size_t n = p.size();
  const Rpd rp = to_rpd(p);
  const Rpd rq = to_rpd(q);

  std::vector<double> log_min(n), abs_rel(n), kl_terms(n), rel_kl_terms(n);
  double max_div = -std::numeric_limits<double>::infinity();
  double rel_max_div = max_div;
  for (std::size_t y = 0; y < n; ++y) {
    const double lp = p.log_p()[y];
    const double lq = q.log_p()[y];
    const double rel = rp.log_r[y] - rq.log_r[y];
    const double py = std::exp(lp);
    log_min[y] = std::min(lp, lq);
    abs_rel[y] = std::abs(rel);
    kl_terms[y] = py * (lp - lq);
    rel_kl_terms[y] = py * rel;
    max_div = std::max(max_div, lp - lq);
    rel_max_div = std::max(rel_max_div, rel);
  }

  Divergences d;
  d.tv = total_variation(p, q);
  // 1 - tv = sum min(p, q); taking the log of that sum directly keeps d_m
  // accurate when the overlap is tiny.
  d.d_m = std::max(0.0, -log_sum_exp(log_min));
  d.d_r = pairwise_sum(abs_rel) / (2.0 * static_cast<double>(n));
  d.kl = std::max(0.0, pairwise_sum(kl_terms));
  d.rel_kl = pairwise_sum(rel_kl_terms);
  d.max_div = max_div;
  d.rel_max_div = rel_max_div;
  return d;
}

double optimal_log_scale(const TokenDist& p, const TokenDist& q) {
  require_same_size(p.size(), q.size(), "optimal_log_scale");
  return mean(q.log_p()) - mean(p.log_p());
}

}  // namespace naf
