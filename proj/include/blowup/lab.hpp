#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "blowup/errors.hpp"
#include "json.hpp"

namespace blowup::lab {

/// Malformed or out-of-range experiment configuration. The message names the
/// offending field (or line and column for JSON syntax errors).
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Shortest-free 17 significant digit rendering, '.' decimal separator.
std::string format_real(double x);

/// Header plus one line per row, LF endings. Throws ContractError on duplicate
/// or empty column names and on ragged rows.
std::string csv_text(const CsvTable& table);

/// Writes csv_text to `path`; I/O failures raise Error naming the path.
void emit_csv(const CsvTable& table, const std::filesystem::path& path);

/// Git blob hash: SHA-1 of "blob <size>\0" followed by the bytes.
std::string git_blob_sha1(std::string_view bytes);

struct Check {
  std::string name;
  double value = 0.0;
  std::string bound;
  bool pass = false;
};

struct ExperimentResult {
  std::string kind;
  std::string model;
  std::vector<std::pair<std::string, CsvTable>> tables;  ///< file name, contents
  std::vector<std::pair<std::string, nlohmann::json>> documents;
  std::vector<std::pair<std::string, double>> values;    ///< reported, not gated
  std::vector<Check> checks;
  std::vector<std::string> notes;

  bool passed() const;
};

const std::vector<std::string>& experiment_kinds();

/// Runs the experiment named in config["experiment"].
ExperimentResult run_experiment(const nlohmann::json& config);

/// Plain-text summary written next to the artifacts.
std::string summary_text(const ExperimentResult& result);

/// Entry point of the blowup-lab executable. Exit codes: 0 all checks passed,
/// 1 a threshold check failed, 2 malformed config or bad parameters, 3 capacity
/// exceeded, 4 I/O or internal failure.
int run_cli(int argc, char** argv);

}  // namespace blowup::lab
