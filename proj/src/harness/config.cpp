#include "naf/harness/config.hpp"

#include <fstream>
#include <set>

#include <fmt/core.h>

#include "naf/error.hpp"

namespace naf::harness {

namespace {

using nlohmann::json;

template <typename T>
void read(const json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::config_invalid, fmt::format("field '{}': {}", key, e.what()));
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const char* where) {
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) {
      throw Error(Errc::config_invalid, fmt::format("unknown field '{}' in {}", key, where));
    }
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::config_invalid, what);
}

}  // namespace

std::string_view to_string(MethodId m) noexcept {
  switch (m) {
    case MethodId::no_cp: return "no_cp";
    case MethodId::cp_delta: return "cp_delta";
    case MethodId::cp_delta_kl: return "cp_delta_kl";
    case MethodId::cp_delta_r: return "cp_delta_r";
    case MethodId::scp_delta_r_b: return "scp_delta_r_b";
    case MethodId::scp_delta_r_c: return "scp_delta_r_c";
  }
  return "unknown";
}

std::vector<MethodId> all_methods() {
  return {MethodId::no_cp,      MethodId::cp_delta,      MethodId::cp_delta_kl,
          MethodId::cp_delta_r, MethodId::scp_delta_r_b, MethodId::scp_delta_r_c};
}

MethodId method_from_string(std::string_view s) {
  for (MethodId m : all_methods()) {
    if (to_string(m) == s) return m;
  }
  throw Error(Errc::config_invalid, fmt::format("unknown method '{}'", s));
}

std::vector<MethodId> parse_method_list(std::string_view list) {
  std::vector<MethodId> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    const auto name = list.substr(start, comma - start);
    if (!name.empty()) out.push_back(method_from_string(name));
    start = comma + 1;
  }
  require(!out.empty(), "method list is empty");
  return out;
}

ExperimentConfig config_from_json(const json& j) {
  require(j.is_object(), "config must be a JSON object");
  reject_unknown(j,
                 {"vocab_size", "name_count", "word_successors", "text_min_length",
                  "text_max_length", "background_sequences", "background_domain_fraction", "background_names",
                  "partition_examples", "pii_records", "heldout_pii_records",
                  "validation_sequences", "canaries", "canary_repetitions", "canary_words",
                  "lambda", "lambda_sweep", "noise_sigma", "max_order", "memorization_prior",
                  "seeds", "smoothing_m", "m_sweep", "base_reference_contexts", "methods",
                  "prompts", "sparps_m_values", "sparps_c_values", "sparps_prompts",
                  "tte_examples", "tte_filter", "attack", "synthetic", "logits", "output_dir"},
                 "config");
  ExperimentConfig c;
  read(j, "vocab_size", c.vocab_size);
  read(j, "name_count", c.name_count);
  read(j, "word_successors", c.word_successors);
  read(j, "text_min_length", c.text_min_length);
  read(j, "text_max_length", c.text_max_length);
  read(j, "background_sequences", c.background_sequences);
  read(j, "background_domain_fraction", c.background_domain_fraction);
  read(j, "background_names", c.background_names);
  read(j, "partition_examples", c.partition_examples);
  read(j, "pii_records", c.pii_records);
  read(j, "heldout_pii_records", c.heldout_pii_records);
  read(j, "validation_sequences", c.validation_sequences);
  read(j, "canaries", c.canaries);
  read(j, "canary_repetitions", c.canary_repetitions);
  read(j, "canary_words", c.canary_words);
  read(j, "lambda", c.lambda);
  read(j, "lambda_sweep", c.lambda_sweep);
  read(j, "noise_sigma", c.noise_sigma);
  read(j, "max_order", c.max_order);
  read(j, "memorization_prior", c.memorization_prior);
  read(j, "seeds", c.seeds);
  read(j, "smoothing_m", c.smoothing_m);
  read(j, "m_sweep", c.m_sweep);
  read(j, "base_reference_contexts", c.base_reference_contexts);
  if (j.contains("methods")) {
    require(j["methods"].is_array(), "methods must be an array");
    c.methods.clear();
    for (const auto& m : j["methods"]) {
      require(m.is_string(), "method names must be strings");
      c.methods.push_back(method_from_string(m.get<std::string>()));
    }
  }
  read(j, "prompts", c.prompts);
  read(j, "sparps_m_values", c.sparps_m_values);
  read(j, "sparps_c_values", c.sparps_c_values);
  read(j, "sparps_prompts", c.sparps_prompts);
  read(j, "tte_examples", c.tte_examples);
  read(j, "tte_filter", c.tte_filter);
  read(j, "attack", c.attack);
  if (j.contains("synthetic")) {
    const auto& s = j["synthetic"];
    require(s.is_object(), "synthetic must be an object");
    reject_unknown(s, {"schemes", "vocab_size", "trials", "spike_log_boosts", "m"}, "synthetic");
    if (s.contains("schemes")) {
      c.synthetic.schemes.clear();
      for (const auto& k : s["schemes"]) {
        require(k.is_string(), "scheme names must be strings");
        c.synthetic.schemes.push_back(synthetic_kind_from_string(k.get<std::string>()));
      }
    }
    read(s, "vocab_size", c.synthetic.vocab_size);
    read(s, "trials", c.synthetic.trials);
    read(s, "spike_log_boosts", c.synthetic.spike_log_boosts);
    read(s, "m", c.synthetic.m);
  }
  if (j.contains("logits") && !j["logits"].is_null()) {
    const auto& l = j["logits"];
    require(l.is_object(), "logits must be an object");
    reject_unknown(l, {"p", "q", "b"}, "logits");
    LogitsInputs in;
    std::string p, q, b;
    read(l, "p", p);
    read(l, "q", q);
    read(l, "b", b);
    require(!p.empty() && !q.empty(), "logits needs both p and q paths");
    in.p = p;
    in.q = q;
    in.b = b;
    c.logits = in;
  }
  std::string out = c.output_dir.string();
  read(j, "output_dir", out);
  c.output_dir = out;
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json methods = json::array();
  for (MethodId m : c.methods) methods.push_back(std::string(to_string(m)));
  json schemes = json::array();
  for (SyntheticKind k : c.synthetic.schemes) schemes.push_back(std::string(to_string(k)));
  json j{{"vocab_size", c.vocab_size},
         {"name_count", c.name_count},
         {"word_successors", c.word_successors},
         {"text_min_length", c.text_min_length},
         {"text_max_length", c.text_max_length},
         {"background_sequences", c.background_sequences},
         {"background_domain_fraction", c.background_domain_fraction},
         {"background_names", c.background_names},
         {"partition_examples", c.partition_examples},
         {"pii_records", c.pii_records},
         {"heldout_pii_records", c.heldout_pii_records},
         {"validation_sequences", c.validation_sequences},
         {"canaries", c.canaries},
         {"canary_repetitions", c.canary_repetitions},
         {"canary_words", c.canary_words},
         {"lambda", c.lambda},
         {"lambda_sweep", c.lambda_sweep},
         {"noise_sigma", c.noise_sigma},
         {"max_order", c.max_order},
         {"memorization_prior", c.memorization_prior},
         {"seeds", c.seeds},
         {"smoothing_m", c.smoothing_m},
         {"m_sweep", c.m_sweep},
         {"base_reference_contexts", c.base_reference_contexts},
         {"methods", methods},
         {"prompts", c.prompts},
         {"sparps_m_values", c.sparps_m_values},
         {"sparps_c_values", c.sparps_c_values},
         {"sparps_prompts", c.sparps_prompts},
         {"tte_examples", c.tte_examples},
         {"tte_filter", c.tte_filter},
         {"attack", c.attack},
         {"synthetic",
          {{"schemes", schemes},
           {"vocab_size", c.synthetic.vocab_size},
           {"trials", c.synthetic.trials},
           {"spike_log_boosts", c.synthetic.spike_log_boosts},
           {"m", c.synthetic.m}}},
         {"output_dir", c.output_dir.string()}};
  if (c.logits) {
    j["logits"] = {{"p", c.logits->p.string()},
                   {"q", c.logits->q.string()},
                   {"b", c.logits->b.string()}};
  }
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config_invalid, fmt::format("cannot open config {}", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::config_invalid, fmt::format("config {} is not JSON: {}", path.string(), e.what()));
  }
  return config_from_json(j);
}

void validate(const ExperimentConfig& c) {
  require(c.vocab_size >= 64, "vocab_size must be >= 64");
  require(c.name_count >=
              c.background_names + 2 * c.pii_records + c.heldout_pii_records + 2 * c.canaries,
          "name_count too small for the requested records and canary keys");
  require(c.vocab_size > 16 + c.name_count + c.canary_words,
          "vocab_size too small for names and canary words");
  require(c.canary_words >= 2 && c.canary_words <= c.vocab_size - 16 - c.name_count,
          "canary_words outside the text-word range");
  require(c.word_successors >= 1, "word_successors must be >= 1");
  require(c.text_min_length >= 2 && c.text_max_length >= c.text_min_length,
          "text lengths need 2 <= min <= max");
  require(c.background_sequences >= 1 && c.partition_examples >= 1, "corpora must be non-empty");
  require(c.background_domain_fraction >= 0.0 && c.background_domain_fraction <= 1.0,
          "background_domain_fraction must lie in [0, 1]");
  require(c.validation_sequences >= 1, "validation_sequences must be >= 1");
  require(c.lambda >= 0.0 && c.lambda <= 1.0, "lambda outside [0, 1]");
  for (double l : c.lambda_sweep) require(l >= 0.0 && l <= 1.0, "lambda_sweep entry outside [0, 1]");
  require(c.noise_sigma >= 0.0, "noise_sigma must be >= 0");
  require(c.max_order >= 1, "max_order must be >= 1");
  require(c.memorization_prior > 0.0, "memorization_prior must be > 0");
  require(!c.seeds.empty(), "seed list must be non-empty");
  require(c.smoothing_m >= 1 && c.smoothing_m <= c.vocab_size, "smoothing_m outside [1, n]");
  for (auto m : c.m_sweep) require(m >= 1 && m <= c.vocab_size, "m_sweep entry outside [1, n]");
  require(c.base_reference_contexts >= 1, "base_reference_contexts must be >= 1");
  require(!c.methods.empty(), "method list must be non-empty");
  require(c.prompts >= 1 && c.sparps_prompts >= 1, "prompt counts must be >= 1");
  for (double v : c.sparps_c_values) require(v > 0.0 && v <= 1.0, "sparps_c_values must lie in (0, 1]");
  require(c.tte_examples >= 1, "tte_examples must be >= 1");
  require(c.attack == "canary" || c.attack == "pii" || c.attack == "tte",
          "attack must be canary, pii or tte");
  require(c.synthetic.trials >= 2, "synthetic.trials must be >= 2");
  require(c.synthetic.vocab_size >= 2, "synthetic.vocab_size must be >= 2");
  require(c.synthetic.m >= 1 && c.synthetic.m <= c.synthetic.vocab_size,
          "synthetic.m outside [1, n]");
  require(!c.synthetic.schemes.empty() && !c.synthetic.spike_log_boosts.empty(),
          "synthetic schemes and spike levels must be non-empty");
}

void override_seed(ExperimentConfig& c, std::uint64_t base) {
  const std::size_t count = std::max<std::size_t>(1, c.seeds.size());
  c.seeds.clear();
  for (std::size_t i = 0; i < count; ++i) c.seeds.push_back(base + i);
}

}  // namespace naf::harness
