#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace coneheat {

// All report numbers go through one formatter so identical runs produce
// byte-identical files.
std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void row(const std::vector<double>& values);
  void raw_row(const std::vector<std::string>& cells);
  const std::string& str() const { return out_; }

 private:
  std::size_t ncols_;
  std::string out_;
};

void write_text_file(const std::string& path, const std::string& content);

// Manifest: resolved configuration echoed verbatim, plus format versions.
// No timestamps: identical configs must yield identical bytes.
nlohmann::json make_manifest(const std::string& command,
                             const nlohmann::json& resolved_config);

extern const char* const kArtifactVersion;
extern const int kSchemaVersion;

}  // namespace coneheat
