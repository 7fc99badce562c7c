#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "naf/analysis.hpp"
#include "naf/attacks.hpp"
#include "naf/harness/config.hpp"
#include "naf/harness/world.hpp"

namespace naf::harness {

// ---- computations (also used directly by tests) ----

struct KxRow {
  std::size_t prompt = 0;
  MethodId method = MethodId::cp_delta;
  double k_x = 0.0;
};

// Toy models, or NAFL inputs when config.logits is set.
std::vector<KxRow> kx_hist(const ExperimentConfig& c);

struct TdeRow {
  std::size_t target = 0;    // canary index
  std::size_t position = 0;  // token position inside the canary
  MethodId method = MethodId::cp_delta;
  LiraBound bound;
  double realized = 0.0;  // the log-ratio the bound covers, at the target token
};

std::vector<TdeRow> tde_bounds(const ExperimentConfig& c);

struct SyntheticCell {
  SyntheticKind scheme = SyntheticKind::uniform_spike;
  double spike_log_boost = 0.0;
  std::string method;  // cp_delta, cp_delta_r or scp_delta_r
  std::vector<double> v_x;           // per trial, nats
  std::vector<double> p1_target;     // per trial, probability of y_s under p1
  std::vector<char> target_kept_in_q;  // per trial (SCP only)
};

std::vector<SyntheticCell> synthetic_prop(const ExperimentConfig& c);

ExpectedSparpsCurve expected_sparps_toy(const ExperimentConfig& c);

struct CanaryOutcome {
  double space_size = 0.0;
  std::map<MethodId, std::vector<double>> exposure;          // inserted canaries, bits
  std::map<MethodId, std::vector<double>> control_exposure;  // never inserted, bits
};

CanaryOutcome run_canary(const ExperimentConfig& c, const World& w, const ModelSet& models,
                         const std::vector<MethodId>& methods, std::size_t m);

struct PiiOutcome {
  std::map<MethodId, PiiResult> results;
  PiiResult no_cp_val;  // p on records it never saw
};

PiiOutcome run_pii(const ExperimentConfig& c, const World& w, const ModelSet& models);

struct TteOutcome {
  std::vector<double> lambdas;
  std::vector<std::map<MethodId, AttackReport>> reports;  // per lambda
  std::vector<AttackReport> no_cp_val;                    // per lambda, held-out text
};

TteOutcome run_tte(const ExperimentConfig& c, const World& w);

struct SweepRow {
  std::size_t m = 0;
  MethodId method = MethodId::scp_delta_r_b;
  double mean_exposure = 0.0;
  double p99_exposure = 0.0;
  double validation_accuracy = 0.0;
};

std::vector<SweepRow> smoothing_sweep(const ExperimentConfig& c);

// Fraction of (prefix, next) pairs where the argmax is the next token.
double next_token_accuracy(const NextTokenModel& model, const std::vector<TteExample>& examples);

// Nearest-rank percentile, q in (0, 1].
double percentile(std::vector<double> values, double q);

// ---- commands: write results under c.output_dir, return the files written ----

std::vector<std::filesystem::path> cmd_kx_hist(const ExperimentConfig& c);
std::vector<std::filesystem::path> cmd_tde_bounds(const ExperimentConfig& c);
std::vector<std::filesystem::path> cmd_synthetic_prop(const ExperimentConfig& c);
std::vector<std::filesystem::path> cmd_attack(const ExperimentConfig& c);
std::vector<std::filesystem::path> cmd_expected_sparps(const ExperimentConfig& c);
std::vector<std::filesystem::path> cmd_smoothing_sweep(const ExperimentConfig& c);

// Runs a named command, then writes manifest.json next to its outputs.
std::vector<std::filesystem::path> run_command(const std::string& name, const ExperimentConfig& c);

}  // namespace naf::harness
