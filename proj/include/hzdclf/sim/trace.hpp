#pragma once

#include <json.hpp>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

namespace hzdclf {

enum class TraceFormat { kCsv, kJsonl };

TraceFormat traceFormatFromName(const std::string& name);

// Streaming run log. CSV mode writes one header line and numeric rows, with
// discrete events as '#'-prefixed JSON comment lines so a comment-aware CSV
// reader skips them. JSONL mode writes one object per line; tick rows carry
// "kind": "tick" and events carry their own kind.
class TraceWriter {
 public:
  TraceWriter(std::unique_ptr<std::ostream> stream, TraceFormat format);

  // File-backed writer; throws ConfigError when the path cannot be opened.
  static std::unique_ptr<TraceWriter> open(const std::string& path, TraceFormat format);

  void setColumns(std::vector<std::string> columns);
  void row(const std::vector<double>& values);
  void event(const std::string& kind, const nlohmann::json& payload);
  void flush();

  TraceFormat format() const { return format_; }

 private:
  void writeHeaderIfNeeded();

  std::unique_ptr<std::ostream> stream_;
  TraceFormat format_ = TraceFormat::kCsv;
  std::vector<std::string> columns_;
  bool header_written_ = false;
};

}  // namespace hzdclf
