#include "naf/error.hpp"

namespace naf {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::empty_vector: return "EmptyVector";
    case Errc::non_finite_input: return "NonFiniteInput";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::m_out_of_range: return "MOutOfRange";
    case Errc::empty_list: return "EmptyList";
    case Errc::method_mismatch: return "MethodMismatch";
    case Errc::token_out_of_range: return "TokenOutOfRange";
    case Errc::misaligned_ensembles: return "MisalignedEnsembles";
    case Errc::empty_corpus: return "EmptyCorpus";
    case Errc::vocab_mismatch: return "VocabMismatch";
    case Errc::bad_magic: return "BadMagic";
    case Errc::version_unsupported: return "VersionUnsupported";
    case Errc::truncated_record: return "TruncatedRecord";
    case Errc::vocab_exhausted: return "VocabExhausted";
    case Errc::canary_not_in_space: return "CanaryNotInSpace";
    case Errc::malformed_record: return "MalformedRecord";
    case Errc::empty_examples: return "EmptyExamples";
    case Errc::missing_q_model: return "MissingQModel";
    case Errc::config_invalid: return "ConfigInvalid";
    case Errc::input_missing: return "InputMissing";
    case Errc::degenerate_ensemble: return "DegenerateEnsemble";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace naf
