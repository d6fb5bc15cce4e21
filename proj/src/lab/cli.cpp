#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "blowup/lab.hpp"
#include "blowup/parallel.hpp"

namespace blowup::lab {
namespace {

constexpr const char* kVersion = "0.1.0";

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw Error("failed writing " + path.string());
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int run_config(const std::string& config_path, const std::string& out_override, bool quiet) {
  const auto started = std::chrono::steady_clock::now();
  const std::string started_utc = utc_now();
  std::string text;
  nlohmann::json config;
  try {
    text = read_file(config_path);
    config = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "error: malformed config " << config_path << ": " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  if (!config.is_object()) {
    std::cerr << "error: malformed config " << config_path << ": top level must be an object\n";
    return 2;
  }

  ExperimentResult result;
  try {
    result = run_experiment(config);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << config_path << ": " << e.what() << '\n';
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "error: capacity exceeded: " << e.what() << '\n';
    if (e.minimal_budget() > 0) {
      std::cerr << "hint: set \"budget\" to at least " << e.minimal_budget()
                << " or lower the quadrature orders in \"params\"\n";
    } else {
      std::cerr << "hint: relax the parameters named above\n";
    }
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: invalid experiment parameters in " << config_path << ": " << e.what() << '\n';
    return 2;
  }

  std::filesystem::path out = out_override;
  if (out.empty()) out = config.value("output", std::string("blowup-lab-out"));
  try {
    std::filesystem::create_directories(out);
    nlohmann::json files = nlohmann::json::array();
    for (const auto& [name, table] : result.tables) {
      emit_csv(table, out / name);
      files.push_back(name);
    }
    for (const auto& [name, doc] : result.documents) {
      write_text(out / name, doc.dump(2) + "\n");
      files.push_back(name);
    }
    const std::string summary = summary_text(result);
    write_text(out / "summary.txt", summary);
    files.push_back("summary.txt");
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    nlohmann::json manifest{{"tool", "blowup-lab"},
                            {"version", kVersion},
                            {"experiment", result.kind},
                            {"model", result.model},
                            {"config", config},
                            {"config_path", config_path},
                            {"config_blob_sha1", git_blob_sha1(text)},
                            {"started_utc", started_utc},
                            {"wall_clock_seconds", wall},
                            {"threads", worker_count()},
                            {"passed", result.passed()},
                            {"outputs", files}};
    write_text(out / "manifest.json", manifest.dump(2) + "\n");
    if (!quiet) std::cout << summary << "artifacts: " << out.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return result.passed() ? 0 : 1;
}

void list_experiments() {
  for (const auto& k : experiment_kinds()) std::cout << k << '\n';
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"blowup-lab: numerical experiments for multi-peak bubble towers"};
  app.set_version_flag("--version", kVersion);
  bool list_flag = false;
  app.add_flag("--list-experiments", list_flag, "Print the experiment kinds and exit");
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  std::string config;
  std::string out;
  bool quiet = false;
  run->add_option("--config", config, "Path to the JSON config")->required();
  run->add_option("--out", out, "Output directory (overrides the config's \"output\")");
  run->add_flag("--quiet", quiet, "Do not print the summary");
  auto* list = app.add_subcommand("list-experiments", "Print the experiment kinds");
  app.require_subcommand(0, 1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (list_flag || list->parsed()) {
    list_experiments();
    return 0;
  }
  if (run->parsed()) {
    try {
      return run_config(config, out, quiet);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 4;
    }
  }
  std::cerr << app.help();
  return 2;
}

}  // namespace blowup::lab
