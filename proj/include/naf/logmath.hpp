#pragma once

#include <span>
#include <vector>

namespace naf {

// log(sum(exp(x))) with max subtraction. Returns -inf for an all -inf input.
double log_sum_exp(std::span<const double> x);

// Pairwise (cascade) summation; error grows as O(log n) rather than O(n).
double pairwise_sum(std::span<const double> x);

double mean(std::span<const double> x);

// x - log_sum_exp(x), no flooring.
std::vector<double> log_normalize(std::span<const double> x);

}  // namespace naf
