#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "naf/dist.hpp"
#include "naf/error.hpp"
#include "oracles.hpp"

namespace test {

inline naf::TokenDist from_probs(const std::vector<double>& p) {
  std::vector<double> logs(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) logs[i] = std::log(p[i]);
  return naf::floor_and_normalize(logs);
}

inline naf::TokenDist uniform(std::size_t n) {
  return naf::floor_and_normalize(std::vector<double>(n, 0.0));
}

inline naf::TokenDist random_dist(std::mt19937_64& rng, std::size_t n, double scale = 2.0) {
  return naf::floor_and_normalize(oracle::random_logits(rng, n, scale));
}

inline std::vector<double> logs(const naf::TokenDist& d) {
  return {d.log_p().begin(), d.log_p().end()};
}

inline std::size_t random_size(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Example 1: a memorized spike against a uniform q.
inline std::vector<double> example_p() {
  std::vector<double> p(10, 0.01);
  p[0] = 0.91;
  return p;
}

}  // namespace test

#define CHECK_ERRC(expr, errc)                                   \
  do {                                                           \
    bool naf_thrown_ = false;                                    \
    try {                                                        \
      (void)(expr);                                              \
    } catch (const naf::Error& e) {                              \
      naf_thrown_ = true;                                        \
      CHECK_MESSAGE(e.code() == (errc), naf::to_string(e.code())); \
    }                                                            \
    CHECK_MESSAGE(naf_thrown_, "expected naf::Error");           \
  } while (0)
