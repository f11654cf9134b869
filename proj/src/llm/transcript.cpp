#include "spasp/llm/transcript.hpp"

#include "json.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>
#include <stdexcept>

namespace spasp::llm {

std::string fingerprint(std::string_view model_id, std::string_view prompt) {
  std::uint64_t h = 14695981039346656037ull;
  auto feed = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  feed(model_id);
  feed("\n");
  feed(prompt);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string to_json_line(const TranscriptEntry& e) {
  nlohmann::ordered_json j;
  j["fingerprint"] = e.fingerprint;
  j["model_id"] = e.model_id;
  j["prompt"] = e.prompt;
  j["response"] = e.response;
  j["latency_ms"] = e.latency_ms;
  j["timestamp"] = e.timestamp;
  return j.dump();
}

TranscriptEntry parse_json_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& err) {
    throw std::invalid_argument(std::string("invalid JSON: ") + err.what());
  }
  if (!j.is_object()) throw std::invalid_argument("record is not an object");
  auto text = [&](const char* key, bool required) -> std::string {
    auto it = j.find(key);
    if (it == j.end()) {
      if (required) throw std::invalid_argument(std::string("missing field '") + key + "'");
      return {};
    }
    if (!it->is_string()) throw std::invalid_argument(std::string("field '") + key + "' is not a string");
    return it->get<std::string>();
  };
  TranscriptEntry e;
  e.model_id = text("model_id", false);
  e.prompt = text("prompt", false);
  e.response = text("response", true);
  e.timestamp = text("timestamp", false);
  e.fingerprint = text("fingerprint", false);
  if (e.fingerprint.empty()) {
    if (!j.contains("prompt")) throw std::invalid_argument("record needs a fingerprint or a prompt");
    e.fingerprint = fingerprint(e.model_id, e.prompt);
  }
  if (auto it = j.find("latency_ms"); it != j.end()) {
    if (!it->is_number()) throw std::invalid_argument("field 'latency_ms' is not a number");
    e.latency_ms = it->get<double>();
  }
  return e;
}

Transcript Transcript::parse(std::string_view text) {
  Transcript t;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      t.add(parse_json_line(line));
    } catch (const std::invalid_argument& err) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " + err.what());
    }
  }
  return t;
}

Transcript Transcript::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open transcript " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const std::runtime_error& err) {
    throw std::runtime_error(path.string() + ": " + err.what());
  }
}

void Transcript::add(TranscriptEntry entry) {
  first_.try_emplace(entry.fingerprint, entries_.size());
  entries_.push_back(std::move(entry));
}

const TranscriptEntry* Transcript::find(std::string_view fp) const {
  auto it = first_.find(std::string(fp));
  return it == first_.end() ? nullptr : &entries_[it->second];
}

void Transcript::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write transcript " + path.string());
  for (const auto& e : entries_) out << to_json_line(e) << '\n';
}

TranscriptRecorder::TranscriptRecorder(const std::filesystem::path& path, bool append)
    : out_(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc)) {
  if (!out_) throw std::runtime_error("cannot write transcript " + path.string());
}

void TranscriptRecorder::record(TranscriptEntry entry) {
  std::lock_guard lock(mutex_);
  if (out_.is_open()) out_ << to_json_line(entry) << '\n' << std::flush;
  transcript_.add(std::move(entry));
}

Transcript TranscriptRecorder::snapshot() const {
  std::lock_guard lock(mutex_);
  return transcript_;
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

}  // namespace spasp::llm
