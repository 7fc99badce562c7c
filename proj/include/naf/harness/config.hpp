#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "naf/models.hpp"

namespace naf::harness {

enum class MethodId { no_cp, cp_delta, cp_delta_kl, cp_delta_r, scp_delta_r_b, scp_delta_r_c };

std::string_view to_string(MethodId m) noexcept;
MethodId method_from_string(std::string_view s);
std::vector<MethodId> all_methods();

struct SyntheticConfig {
  std::vector<SyntheticKind> schemes{SyntheticKind::uniform_spike, SyntheticKind::correlated_smoothed,
                                     SyntheticKind::correlated_half_smoothed,
                                     SyntheticKind::correlated_unsmoothed};
  std::size_t vocab_size = 32000;
  std::size_t trials = 200;
  std::vector<double> spike_log_boosts{0.0, 2.0, 4.0, 6.0, 8.0, 10.0};
  std::size_t m = 10;
};

struct LogitsInputs {
  std::filesystem::path p, q, b;  // b optional (empty path)
};

struct ExperimentConfig {
  // vocabulary and data
  std::size_t vocab_size = 1024;
  std::size_t name_count = 400;
  std::size_t word_successors = 4;
  std::size_t text_min_length = 8;
  std::size_t text_max_length = 20;
  std::size_t background_sequences = 2000;
  // Share of background text drawn from the partitions' language; the rest
  // comes from an unrelated general-purpose chain over the same words.
  double background_domain_fraction = 0.2;
  std::size_t background_names = 100;
  std::size_t partition_examples = 300;
  std::size_t pii_records = 50;        // per partition
  std::size_t heldout_pii_records = 50;
  std::size_t validation_sequences = 200;

  // canaries
  std::size_t canaries = 64;
  std::size_t canary_repetitions = 3;
  std::size_t canary_words = 32;

  // models
  double lambda = 0.7;
  std::vector<double> lambda_sweep{0.4, 0.7, 1.0};
  double noise_sigma = 0.5;
  std::size_t max_order = 14;
  double memorization_prior = 1.0;
  std::vector<std::uint64_t> seeds{0, 1, 2,  3,  4,  5,  6,  7,
                                   8, 9, 10, 11, 12, 13, 14, 15};

  // aggregation
  std::size_t smoothing_m = 10;
  std::vector<std::size_t> m_sweep{1, 10, 100, 1000};
  std::size_t base_reference_contexts = 100;
  std::vector<MethodId> methods = all_methods();

  // experiments
  std::size_t prompts = 400;
  std::vector<std::size_t> sparps_m_values{1, 2, 4, 8, 16, 32, 64, 128, 256, 512};
  std::vector<double> sparps_c_values{0.5, 0.75, 0.9, 0.95, 1.0};
  std::size_t sparps_prompts = 100;
  std::size_t tte_examples = 600;
  bool tte_filter = true;
  std::string attack = "canary";
  SyntheticConfig synthetic;
  std::optional<LogitsInputs> logits;

  std::filesystem::path output_dir = "naf-out";
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);
// Throws ConfigInvalid on any violated constraint.
void validate(const ExperimentConfig& c);

// Replaces the seed list with count consecutive seeds starting at `base`.
void override_seed(ExperimentConfig& c, std::uint64_t base);
// Comma-separated method names.
std::vector<MethodId> parse_method_list(std::string_view list);

}  // namespace naf::harness
