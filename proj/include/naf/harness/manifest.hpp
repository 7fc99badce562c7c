#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "naf/harness/config.hpp"

namespace naf::harness {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct RunManifest {
  std::string command;
  std::string config_hash;  // SHA-256 hex of the canonical config JSON
  std::string artifact_version = kArtifactVersion;
  double wall_clock_seconds = 0.0;
  std::string started_utc;
  std::vector<std::filesystem::path> files;
};

std::string sha256_hex(const std::string& data);
// Keys sorted, no whitespace.
std::string canonical_config(const ExperimentConfig& c);
std::string config_hash(const ExperimentConfig& c);

void write_manifest(const std::filesystem::path& path, const RunManifest& m);

}  // namespace naf::harness
