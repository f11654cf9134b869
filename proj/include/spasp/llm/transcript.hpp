#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace spasp::llm {

/// FNV-1a 64 over model_id + "\n" + prompt, as 16 lowercase hex digits.
std::string fingerprint(std::string_view model_id, std::string_view prompt);

struct TranscriptEntry {
  std::string fingerprint;
  std::string model_id;
  std::string prompt;
  std::string response;
  double latency_ms = 0.0;
  std::string timestamp;  // ISO 8601, UTC

  bool operator==(const TranscriptEntry&) const = default;
};

std::string to_json_line(const TranscriptEntry& entry);
/// Throws std::invalid_argument on malformed records.
TranscriptEntry parse_json_line(std::string_view line);

/// Newline-delimited JSON, one entry per line.
class Transcript {
 public:
  /// Throws std::runtime_error naming the file and line on bad input.
  static Transcript load(const std::filesystem::path& path);
  static Transcript parse(std::string_view text);

  void add(TranscriptEntry entry);
  /// First entry with this fingerprint, if any.
  const TranscriptEntry* find(std::string_view fp) const;

  const std::vector<TranscriptEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  void save(const std::filesystem::path& path) const;

 private:
  std::vector<TranscriptEntry> entries_;
  std::unordered_map<std::string, std::size_t> first_;
};

/// Append-only, thread-safe sink; optionally mirrors every entry to a file as
/// it arrives so an interrupted run keeps what it paid for.
class TranscriptRecorder {
 public:
  TranscriptRecorder() = default;
  explicit TranscriptRecorder(const std::filesystem::path& path, bool append = false);

  void record(TranscriptEntry entry);
  Transcript snapshot() const;

 private:
  mutable std::mutex mutex_;
  Transcript transcript_;
  std::ofstream out_;
};

std::string utc_timestamp();

}  // namespace spasp::llm
