#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "naf/dist.hpp"

namespace naf {

// Binary next-token log-probability dump ("NAFL", version 1, little-endian).
inline constexpr std::uint16_t kNaflVersion = 1;
inline constexpr std::uint32_t kNaflNoLabel = 0xFFFFFFFFu;

struct LogitsRecord {
  std::uint64_t prompt_id = 0;
  std::optional<Token> label_token;
  TokenDist dist;
};

struct NaflManifest {
  std::string model_name;
  std::string dataset_name;
  std::uint32_t vocab_size = 0;
  std::string tokenizer_note;
};

// Path of the JSON manifest that sits next to a NAFL file.
std::filesystem::path manifest_path_for(const std::filesystem::path& nafl_path);
void write_manifest(const std::filesystem::path& path, const NaflManifest& manifest);
NaflManifest read_manifest(const std::filesystem::path& path);

// Streams records one at a time; the header is validated on open.
class NaflReader {
 public:
  // expected_vocab = 0 accepts any vocabulary size.
  explicit NaflReader(const std::filesystem::path& path, std::uint32_t expected_vocab = 0);

  std::uint32_t vocab_size() const noexcept { return vocab_size_; }
  std::uint64_t record_count() const noexcept { return record_count_; }
  std::uint64_t records_read() const noexcept { return records_read_; }

  // Next record, or nullopt once record_count records were read.
  std::optional<LogitsRecord> next();

 private:
  std::ifstream in_;
  std::uint32_t vocab_size_ = 0;
  std::uint64_t record_count_ = 0;
  std::uint64_t records_read_ = 0;
  std::vector<float> buffer_;
};

// Reads every record. Prefer NaflReader for large files.
std::vector<LogitsRecord> load_logits(const std::filesystem::path& path,
                                      std::uint32_t expected_vocab = 0);

class NaflWriter {
 public:
  NaflWriter(const std::filesystem::path& path, std::uint32_t vocab_size);
  ~NaflWriter();
  NaflWriter(const NaflWriter&) = delete;
  NaflWriter& operator=(const NaflWriter&) = delete;

  void write(std::uint64_t prompt_id, std::optional<Token> label, std::span<const double> log_p);
  // Patches record_count into the header and closes the file.
  void close();

 private:
  std::ofstream out_;
  std::uint32_t vocab_size_;
  std::uint64_t count_ = 0;
  bool closed_ = false;
};

}  // namespace naf
