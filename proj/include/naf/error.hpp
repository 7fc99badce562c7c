#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace naf {

enum class Errc {
  empty_vector,
  non_finite_input,
  dimension_mismatch,
  m_out_of_range,
  empty_list,
  method_mismatch,
  token_out_of_range,
  misaligned_ensembles,
  empty_corpus,
  vocab_mismatch,
  bad_magic,
  version_unsupported,
  truncated_record,
  vocab_exhausted,
  canary_not_in_space,
  malformed_record,
  empty_examples,
  missing_q_model,
  config_invalid,
  input_missing,
  degenerate_ensemble,
};

std::string_view to_string(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace naf
