#include "naf/nafl.hpp"

#include <array>
#include <bit>
#include <cstring>

#include <fmt/core.h>
#include <json.hpp>

#include "naf/error.hpp"

namespace naf {

namespace {

constexpr std::array<unsigned char, 4> kMagic{0x4E, 0x41, 0x46, 0x4C};
constexpr std::size_t kHeaderSize = 4 + 2 + 2 + 4 + 8;

static_assert(std::endian::native == std::endian::little,
              "NAFL I/O assumes a little-endian host");

template <typename T>
T read_le(const unsigned char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <typename T>
void put_le(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

std::filesystem::path manifest_path_for(const std::filesystem::path& nafl_path) {
  auto p = nafl_path;
  p += ".json";
  return p;
}

void write_manifest(const std::filesystem::path& path, const NaflManifest& m) {
  nlohmann::json j{{"model_name", m.model_name},
                   {"dataset_name", m.dataset_name},
                   {"vocab_size", m.vocab_size},
                   {"tokenizer_note", m.tokenizer_note}};
  std::ofstream out(path);
  if (!out) throw Error(Errc::input_missing, fmt::format("cannot write {}", path.string()));
  out << j.dump(2) << '\n';
}

NaflManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::input_missing, fmt::format("cannot open {}", path.string()));
  try {
    const auto j = nlohmann::json::parse(in);
    return {j.at("model_name").get<std::string>(), j.at("dataset_name").get<std::string>(),
            j.at("vocab_size").get<std::uint32_t>(), j.value("tokenizer_note", std::string{})};
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::config_invalid, fmt::format("bad manifest {}: {}", path.string(), e.what()));
  }
}

NaflReader::NaflReader(const std::filesystem::path& path, std::uint32_t expected_vocab)
    : in_(path, std::ios::binary) {
  if (!in_) throw Error(Errc::input_missing, fmt::format("cannot open {}", path.string()));
  std::array<unsigned char, kHeaderSize> header{};
  in_.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in_.gcount() < 4 || std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0) {
    throw Error(Errc::bad_magic, fmt::format("{} is not a NAFL file", path.string()));
  }
  if (static_cast<std::size_t>(in_.gcount()) < header.size()) {
    throw Error(Errc::truncated_record, "header is truncated");
  }
  const auto version = read_le<std::uint16_t>(header.data() + 4);
  if (version != kNaflVersion) {
    throw Error(Errc::version_unsupported, fmt::format("NAFL version {} unsupported", version));
  }
  vocab_size_ = read_le<std::uint32_t>(header.data() + 8);
  record_count_ = read_le<std::uint64_t>(header.data() + 12);
  if (vocab_size_ < 2) throw Error(Errc::vocab_mismatch, "vocabulary size below 2");
  if (expected_vocab != 0 && expected_vocab != vocab_size_) {
    throw Error(Errc::vocab_mismatch,
                fmt::format("file vocabulary {} != expected {}", vocab_size_, expected_vocab));
  }
  buffer_.resize(vocab_size_);
}

std::optional<LogitsRecord> NaflReader::next() {
  if (records_read_ >= record_count_) return std::nullopt;
  std::array<unsigned char, 12> head{};
  in_.read(reinterpret_cast<char*>(head.data()), head.size());
  if (static_cast<std::size_t>(in_.gcount()) != head.size()) {
    throw Error(Errc::truncated_record, fmt::format("record {} is truncated", records_read_));
  }
  const std::size_t bytes = buffer_.size() * sizeof(float);
  in_.read(reinterpret_cast<char*>(buffer_.data()), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in_.gcount()) != bytes) {
    throw Error(Errc::truncated_record, fmt::format("record {} is truncated", records_read_));
  }
  const auto label = read_le<std::uint32_t>(head.data() + 8);
  if (label != kNaflNoLabel && label >= vocab_size_) {
    throw Error(Errc::token_out_of_range, fmt::format("label {} >= {}", label, vocab_size_));
  }
  std::vector<double> raw(buffer_.begin(), buffer_.end());
  ++records_read_;
  return LogitsRecord{read_le<std::uint64_t>(head.data()),
                      label == kNaflNoLabel ? std::nullopt : std::optional<Token>(label),
                      floor_and_normalize(raw)};
}

std::vector<LogitsRecord> load_logits(const std::filesystem::path& path,
                                      std::uint32_t expected_vocab) {
  NaflReader reader(path, expected_vocab);
  std::vector<LogitsRecord> out;
  while (auto rec = reader.next()) out.push_back(std::move(*rec));
  return out;
}

NaflWriter::NaflWriter(const std::filesystem::path& path, std::uint32_t vocab_size)
    : out_(path, std::ios::binary | std::ios::trunc), vocab_size_(vocab_size) {
  if (!out_) throw Error(Errc::input_missing, fmt::format("cannot write {}", path.string()));
  out_.write(reinterpret_cast<const char*>(kMagic.data()), kMagic.size());
  put_le<std::uint16_t>(out_, kNaflVersion);
  put_le<std::uint16_t>(out_, 0);
  put_le<std::uint32_t>(out_, vocab_size_);
  put_le<std::uint64_t>(out_, 0);
}

NaflWriter::~NaflWriter() {
  try {
    close();
  } catch (...) {
  }
}

void NaflWriter::write(std::uint64_t prompt_id, std::optional<Token> label,
                       std::span<const double> log_p) {
  if (log_p.size() != vocab_size_) {
    throw Error(Errc::vocab_mismatch,
                fmt::format("record has {} entries, file vocabulary is {}", log_p.size(), vocab_size_));
  }
  put_le<std::uint64_t>(out_, prompt_id);
  put_le<std::uint32_t>(out_, label ? *label : kNaflNoLabel);
  for (double v : log_p) put_le<float>(out_, static_cast<float>(v));
  ++count_;
}

void NaflWriter::close() {
  if (closed_) return;
  closed_ = true;
  out_.seekp(12);
  put_le<std::uint64_t>(out_, count_);
  out_.close();
}

}  // namespace naf
