// Command-line front end: `run` executes a config and writes CSV tables with
// JSON sidecars, `summarize` reports pass/fail counts of existing tables.

#include <boost/version.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hdlab/error.hpp"
#include "hdlab/experiment.hpp"

namespace fs = std::filesystem;
using hdlab::ErrorKind;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitFailingRows = 4;
constexpr int kExitNumeric = 5;
constexpr int kExitUsage = 64;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return kExitIo;
    case ErrorKind::config_parse: return kExitConfig;
    case ErrorKind::numeric_failure: return kExitNumeric;
    default: return kExitPrecondition;
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) hdlab::fail(ErrorKind::io, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string sidecar(const hdlab::ExperimentConfig& e, const hdlab::Table& table, double seconds,
                    unsigned workers) {
  nlohmann::ordered_json meta;
  meta["config_hash"] = hdlab::hash_hex(hdlab::config_hash(e));
  meta["seed"] = e.seed;
  meta["experiment"] = e.name;
  meta["kind"] = std::string(hdlab::kind_name(e.params));
  meta["config"] = nlohmann::json::parse(hdlab::to_text(e));
  meta["columns"] = table.header;
  meta["rows"] = table.rows.size();
  meta["wall_time_seconds"] = seconds;
  meta["workers"] = workers;
  meta["versions"] = {{"hdlab", HDLAB_VERSION},
                      {"boost", BOOST_LIB_VERSION},
                      {"compiler", __VERSION__}};
  return meta.dump(2) + "\n";
}

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  unsigned workers = 1;
};

int run(const RunOptions& opt) {
  hdlab::SuiteConfig suite = hdlab::parse_suite(read_text(opt.config));
  if (opt.seed) {
    suite.seed = *opt.seed;
    for (auto& e : suite.experiments) e.seed = *opt.seed;
  }
  // Every precondition is checked before the first sample is drawn.
  for (const auto& e : suite.experiments) hdlab::validate(e);

  const auto target = opt.out ? std::optional<fs::path>(*opt.out)
                              : suite.output ? std::optional<fs::path>(*suite.output)
                                             : std::nullopt;
  const auto table_path = [&](const hdlab::ExperimentConfig& e) -> fs::path {
    if (suite.single && target && !fs::is_directory(*target)) return *target;
    const fs::path dir = target ? *target : suite.single ? fs::path(".") : fs::path("results");
    return dir / (e.name + ".csv");
  };

  std::uint64_t failing = 0;
  for (const auto& e : suite.experiments) {
    const auto start = std::chrono::steady_clock::now();
    const hdlab::Table table = hdlab::run_experiment(e, opt.workers);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const fs::path path = table_path(e);
    hdlab::write_file(path, hdlab::to_csv(table));
    hdlab::write_file(hdlab::sidecar_path(path), sidecar(e, table, seconds, opt.workers));

    const std::size_t pass = table.column("pass");
    std::uint64_t failed = 0;
    for (const auto& row : table.rows) failed += row[pass] != "true";
    failing += failed;
    std::cout << e.name << " (" << hdlab::kind_name(e.params) << "): " << table.rows.size()
              << " rows, " << failed << " failed, " << seconds << " s -> " << path.string() << "\n";
  }
  return failing == 0 ? 0 : kExitFailingRows;
}

int summarize(const std::string& path) {
  const hdlab::Summary summary = hdlab::summarize(path);
  std::cout << hdlab::render(summary);
  return summary.all_passed() ? 0 : kExitFailingRows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for testing in the Gaussian sequence model"};
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run_cmd = app.add_subcommand("run", "Run the experiments of a config file");
  run_cmd->add_option("config", run_opt.config, "Config path")->required();
  run_cmd->add_option("--seed", run_opt.seed, "Override the config seed");
  run_cmd->add_option("--out", run_opt.out,
                      "Output table (single experiment) or directory (suite)");
  run_cmd->add_option("--workers", run_opt.workers, "Worker threads")
      ->check(CLI::Range(1u, 1024u));

  std::string table;
  auto* sum_cmd = app.add_subcommand("summarize", "Summarize a result table or directory");
  sum_cmd->add_option("table", table, "CSV table or directory of tables")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run_cmd) return run(run_opt);
    return summarize(table);
  } catch (const hdlab::Error& e) {
    std::cerr << "error (" << hdlab::to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error (io): " << e.what() << "\n";
    return kExitIo;
  }
}
