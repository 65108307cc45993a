#include "hzdclf/sim/trace.hpp"

#include <fstream>
#include <iomanip>
#include <utility>

#include "hzdclf/errors.hpp"

namespace hzdclf {

TraceFormat traceFormatFromName(const std::string& name) {
  if (name == "csv") return TraceFormat::kCsv;
  if (name == "jsonl") return TraceFormat::kJsonl;
  throw ConfigError("unknown trace format '" + name + "', expected csv or jsonl");
}

TraceWriter::TraceWriter(std::unique_ptr<std::ostream> stream, TraceFormat format)
    : stream_(std::move(stream)), format_(format) {
  if (!stream_ || !*stream_) throw ConfigError("trace writer needs a valid stream");
  *stream_ << std::setprecision(17);
}

std::unique_ptr<TraceWriter> TraceWriter::open(const std::string& path, TraceFormat format) {
  auto file = std::make_unique<std::ofstream>(path);
  if (!file->is_open()) throw ConfigError("cannot open trace file '" + path + "'");
  return std::make_unique<TraceWriter>(std::move(file), format);
}

void TraceWriter::setColumns(std::vector<std::string> columns) {
  if (header_written_) throw InvalidArgumentError("trace columns are fixed after the first row");
  columns_ = std::move(columns);
}

void TraceWriter::writeHeaderIfNeeded() {
  if (header_written_ || format_ != TraceFormat::kCsv) return;
  for (size_t i = 0; i < columns_.size(); ++i) {
    if (i) *stream_ << ',';
    *stream_ << columns_[i];
  }
  *stream_ << '\n';
  header_written_ = true;
}

void TraceWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_.size()) {
    throw InvalidArgumentError("trace row has " + std::to_string(values.size()) +
                               " values for " + std::to_string(columns_.size()) + " columns");
  }
  if (format_ == TraceFormat::kCsv) {
    writeHeaderIfNeeded();
    for (size_t i = 0; i < values.size(); ++i) {
      if (i) *stream_ << ',';
      *stream_ << values[i];
    }
    *stream_ << '\n';
    return;
  }
  nlohmann::json j;
  j["kind"] = "tick";
  for (size_t i = 0; i < values.size(); ++i) j[columns_[i]] = values[i];
  *stream_ << j.dump() << '\n';
}

void TraceWriter::event(const std::string& kind, const nlohmann::json& payload) {
  nlohmann::json j = payload;
  j["kind"] = kind;
  if (format_ == TraceFormat::kCsv) {
    writeHeaderIfNeeded();
    *stream_ << "# " << j.dump() << '\n';
    return;
  }
  *stream_ << j.dump() << '\n';
}

void TraceWriter::flush() { stream_->flush(); }

}  // namespace hzdclf
