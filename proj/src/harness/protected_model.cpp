#include "naf/harness/protected_model.hpp"

#include "naf/error.hpp"

namespace naf::harness {

std::optional<Method> core_method(MethodId m) {
  switch (m) {
    case MethodId::no_cp: return std::nullopt;
    case MethodId::cp_delta: return Method::cp_delta;
    case MethodId::cp_delta_kl: return Method::cp_delta_kl;
    case MethodId::cp_delta_r: return Method::cp_delta_r;
    case MethodId::scp_delta_r_b:
    case MethodId::scp_delta_r_c: return Method::scp_delta_r;
  }
  return std::nullopt;
}

ProtectedModel::ProtectedModel(MethodId method, const NextTokenModel& p, const NextTokenModel& q,
                               const NextTokenModel& b, TokenDist constant_base, std::size_t m)
    : method_(method), p_(&p), q_(&q), b_(&b), constant_base_(std::move(constant_base)), m_(m) {
  if (q.vocab_size() != p.vocab_size() || b.vocab_size() != p.vocab_size()) {
    throw Error(Errc::dimension_mismatch, "p, q and b disagree on vocabulary size");
  }
  if (method == MethodId::scp_delta_r_c && constant_base_.size() != p.vocab_size()) {
    throw Error(Errc::dimension_mismatch, "constant base has the wrong vocabulary size");
  }
}

ProtectedModel::ProtectedModel(MethodId method, const ModelSet& models, std::size_t m)
    : ProtectedModel(method, *models.p, *models.q, *models.b, models.constant_base, m) {}

TokenDist ProtectedModel::next(std::span<const Token> context) const {
  if (method_ == MethodId::no_cp) return p_->next(context);
  return aggregate(context).dist;
}

AggregationResult ProtectedModel::aggregate(std::span<const Token> context) const {
  const TokenDist p = p_->next(context);
  const TokenDist q = q_->next(context);
  if (method_ == MethodId::scp_delta_r_b) {
    return scp_delta_r(b_->next(context), p, q, m_);
  }
  return aggregate_dists(method_, p, q, constant_base_, constant_base_, m_);
}

AggregationResult aggregate_dists(MethodId method, const TokenDist& p, const TokenDist& q,
                                  const TokenDist& b, const TokenDist& constant_base,
                                  std::size_t m) {
  switch (method) {
    case MethodId::cp_delta: return cp_delta(p, q);
    case MethodId::cp_delta_kl: return cp_delta_kl(p, q);
    case MethodId::cp_delta_r: return cp_delta_r(p, q);
    case MethodId::scp_delta_r_b: return scp_delta_r(b, p, q, m);
    case MethodId::scp_delta_r_c: return scp_delta_r(constant_base, p, q, m);
    case MethodId::no_cp: break;
  }
  throw Error(Errc::method_mismatch, "no_cp has no aggregation");
}

}  // namespace naf::harness
