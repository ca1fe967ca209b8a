#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtc/config.hpp"

namespace dtc {

inline constexpr std::string_view kProgramVersion = "1.0.0";

/// 17 significant digits, shortest exponent form, locale-independent.
std::string format_double(double value);

/// Writes `contents` to a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

/// CSV text: a `# config_hash=` provenance line, the header, then rows.
class CsvTable {
 public:
  CsvTable(std::string config_hash, std::vector<std::string> columns);
  CsvTable& row(std::span<const std::string> cells);
  CsvTable& row(std::initializer_list<std::string> cells);
  std::string str() const { return text_; }

 private:
  std::size_t width_;
  std::string text_;
};

struct ExecutionResult {
  std::vector<std::filesystem::path> files;  // in the order written
};

/// Runs the command's pipeline and writes its files into config.output_dir.
/// Throws on any failure; no file is left half written.
ExecutionResult execute(const ExperimentConfig& config);

/// {"error": {"type": ..., "message": ...}} for a failed run.
std::string error_json(std::string_view type, std::string_view message);

}  // namespace dtc
