#pragma once

#include <optional>

#include "naf/aggregate.hpp"
#include "naf/harness/config.hpp"
#include "naf/harness/world.hpp"
#include "naf/models.hpp"

namespace naf::harness {

std::optional<Method> core_method(MethodId m);

// One aggregation step on already-queried distributions. `b` is used by
// scp_delta_r_b and `constant_base` by scp_delta_r_c.
AggregationResult aggregate_dists(MethodId method, const TokenDist& p, const TokenDist& q,
                                  const TokenDist& b, const TokenDist& constant_base,
                                  std::size_t m);

// p protected against q by one aggregation rule, queried like any model.
class ProtectedModel final : public NextTokenModel {
 public:
  ProtectedModel(MethodId method, const NextTokenModel& p, const NextTokenModel& q,
                 const NextTokenModel& b, TokenDist constant_base, std::size_t m);
  ProtectedModel(MethodId method, const ModelSet& models, std::size_t m);

  std::size_t vocab_size() const override { return p_->vocab_size(); }
  TokenDist next(std::span<const Token> context) const override;
  // Not available for no_cp.
  AggregationResult aggregate(std::span<const Token> context) const;
  MethodId method() const noexcept { return method_; }

 private:
  MethodId method_;
  const NextTokenModel* p_;
  const NextTokenModel* q_;
  const NextTokenModel* b_;
  TokenDist constant_base_;
  std::size_t m_;
};

}  // namespace naf::harness
