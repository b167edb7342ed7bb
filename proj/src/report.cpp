#include "coneheat/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <utility>

namespace coneheat {

const char* const kArtifactVersion = "1.0.0";
const int kSchemaVersion = 1;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> columns)
    : ncols_(columns.size()) {
  if (ncols_ == 0) throw std::invalid_argument("csv: no columns");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out_ += ',';
    out_ += columns[i];
  }
  out_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  raw_row(cells);
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
  if (cells.size() != ncols_)
    throw std::invalid_argument("csv: row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ += ',';
    out_ += cells[i];
  }
  out_ += '\n';
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("short write: " + path);
}

nlohmann::json make_manifest(const std::string& command,
                             const nlohmann::json& resolved_config) {
  nlohmann::json m;
  m["artifact_version"] = kArtifactVersion;
  m["schema_version"] = kSchemaVersion;
  m["command"] = command;
  m["config"] = resolved_config;
  return m;
}

}  // namespace coneheat
