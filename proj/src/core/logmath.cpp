#include "naf/logmath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace naf {

double log_sum_exp(std::span<const double> x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  const double hi = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(hi)) return hi;
  std::vector<double> shifted(x.size());
  std::transform(x.begin(), x.end(), shifted.begin(),
                 [hi](double v) { return std::exp(v - hi); });
  return hi + std::log(pairwise_sum(shifted));
}

double pairwise_sum(std::span<const double> x) {
  constexpr std::size_t kBlock = 64;
  if (x.size() <= kBlock) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

double mean(std::span<const double> x) {
  return x.empty() ? 0.0 : pairwise_sum(x) / static_cast<double>(x.size());
}

std::vector<double> log_normalize(std::span<const double> x) {
  const double z = log_sum_exp(x);
  std::vector<double> out(x.begin(), x.end());
  for (double& v : out) v -= z;
  return out;
}

}  // namespace naf
