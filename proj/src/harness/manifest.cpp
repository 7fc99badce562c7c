#include "naf/harness/manifest.hpp"

#include <fstream>

#include <fmt/core.h>
#include <openssl/evp.h>

#include "naf/error.hpp"

namespace naf::harness {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string canonical_config(const ExperimentConfig& c) { return config_to_json(c).dump(); }

std::string config_hash(const ExperimentConfig& c) { return sha256_hex(canonical_config(c)); }

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& f : m.files) files.push_back(f.filename().string());
  const nlohmann::json j{{"command", m.command},
                         {"config_hash", m.config_hash},
                         {"artifact_version", m.artifact_version},
                         {"wall_clock_seconds", m.wall_clock_seconds},
                         {"started_utc", m.started_utc},
                         {"files", files}};
  std::ofstream out(path);
  if (!out) throw Error(Errc::input_missing, fmt::format("cannot write {}", path.string()));
  out << j.dump(2) << '\n';
}

}  // namespace naf::harness
