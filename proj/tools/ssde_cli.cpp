// Batch entry point: ssde <command> --seed N [--config FILE] [--out DIR] [--key value ...]

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "ssde/config.hpp"
#include "ssde/core.hpp"
#include "ssde/experiments.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kConfig = 2, kIo = 3, kFailed = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// `--key value` or `--key=value` pairs left over after the fixed options.
std::vector<std::pair<std::string, std::string>> parse_overrides(const std::vector<std::string>& extras) {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.size() < 3) throw UsageError("unexpected argument '" + arg + "'");
    const auto eq = arg.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(arg.substr(2, eq - 2), arg.substr(eq + 1));
    } else {
      if (i + 1 >= extras.size()) throw UsageError("option '" + arg + "' needs a value");
      out.emplace_back(arg.substr(2), extras[++i]);
    }
  }
  return out;
}

void print_report(const ssde::Report& report) {
  for (const auto& r : report.rows)
    std::printf("%-40s %-12.6g %-12.6g %s\n", r.check.c_str(), r.statistic, r.threshold, r.pass ? "PASS" : "FAIL");
}

int run(const std::string& command, const std::string& config_path, std::uint64_t seed, const std::string& out_dir,
        const std::vector<std::pair<std::string, std::string>>& overrides) {
  const auto sections = ssde::command_sections(command);
  ssde::Config cfg = config_path.empty() ? ssde::Config{} : ssde::Config::load(config_path);
  for (const auto& [key, value] : overrides)
    for (const auto& section : sections) cfg.set(section, key, value);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ssde::IoError("cannot create output directory " + out_dir + ": " + ec.message());
  const std::filesystem::path out(out_dir);

  if (command == "simulate") {
    const auto paths = ssde::simulate_ensemble(ssde::read_simulate(cfg, "simulate"), seed);
    ssde::write_text_file(out / "paths.csv", ssde::paths_csv(paths));
    return kOk;
  }
  const auto report = ssde::run_command(command, cfg, seed);
  ssde::write_text_file(out / "report.csv", ssde::report_csv(report));
  print_report(report);
  return report.all_pass() ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo experiments for singular one-dimensional SDEs"};
  app.allow_extras();
  std::string command, config_path, out_dir = ".";
  std::uint64_t seed = 0;
  app.add_option("command", command, "simulate, check-density, check-martingale, check-localtime, check-transform or check-uniqueness")
      ->required();
  app.add_option("--seed", seed, "random seed (required)")->required();
  app.add_option("--config", config_path, "key = value config file with one [section] per experiment");
  app.add_option("--out", out_dir, "output directory");
  app.footer("Any other --key value pair overrides that key in every section the command reads.\n"
             "SSDE_THREADS caps the number of worker threads.");

  try {
    app.parse(argc, argv);
    const auto& known = ssde::check_commands();
    if (command != "simulate" && std::find(known.begin(), known.end(), command) == known.end())
      throw UsageError("unknown command '" + command + "'");
    return run(command, config_path, seed, out_dir, parse_overrides(app.remaining()));
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const ssde::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ssde::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ssde::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kFailed;
  }
}
