#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "naf/error.hpp"
#include "naf/harness/commands.hpp"
#include "naf/harness/config.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;

int exit_code_for(naf::Errc e) {
  switch (e) {
    case naf::Errc::config_invalid:
      return kExitConfig;
    case naf::Errc::input_missing:
    case naf::Errc::bad_magic:
    case naf::Errc::version_unsupported:
    case naf::Errc::truncated_record:
    case naf::Errc::vocab_mismatch:
    case naf::Errc::misaligned_ensembles:
    case naf::Errc::degenerate_ensemble:
    case naf::Errc::non_finite_input:
    case naf::Errc::token_out_of_range:
      return kExitInput;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Protected decoding experiments on toy models and logit dumps", "naf"};
  app.require_subcommand(1);

  std::string config_path, out_dir, methods, attack;
  std::optional<std::uint64_t> seed;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON experiment config");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "base seed (consecutive seeds for ensembles)");
    sub->add_option("--method", methods, "comma-separated method list");
  };
  const char* names[] = {"kx-hist", "tde-bounds", "synthetic-prop",
                         "attack", "expected-sparps", "smoothing-sweep"};
  const char* help[] = {"per-prompt k_x histogram data",
                        "t_x and v_x bounds at canary tokens",
                        "v_x(y_s) curves on synthetic distributions",
                        "canary, PII or token-by-token extraction",
                        "Expected SpaRPS B(m, C) grid",
                        "canary exposure and utility against m"};
  for (std::size_t i = 0; i < 6; ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    add_common(sub);
    if (std::string(names[i]) == "attack") {
      sub->add_option("--attack", attack, "canary, pii or tte");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    naf::harness::ExperimentConfig config;
    if (!config_path.empty()) config = naf::harness::load_config(config_path);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (seed) naf::harness::override_seed(config, *seed);
    if (!methods.empty()) config.methods = naf::harness::parse_method_list(methods);
    if (!attack.empty()) config.attack = attack;
    naf::harness::validate(config);
    for (const auto& f : naf::harness::run_command(command, config)) {
      fmt::print("{}\n", f.string());
    }
    return 0;
  } catch (const naf::Error& e) {
    fmt::print(stderr, "naf {}: {}: {}\n", command, naf::to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    fmt::print(stderr, "naf {}: {}\n", command, e.what());
    return 1;
  }
}
