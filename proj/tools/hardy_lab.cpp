// hardy_lab: runs the certification experiments and writes their artifacts.
//
//   hardy_lab list
//   hardy_lab describe <id>
//   hardy_lab run <id>|all [--config FILE] [--seed N] [--n 1|2] [--tmax T] [--tol E] [--out DIR]
//
// Exit status: 0 when every gate passes, 1 on a gate failure, 2 on an invalid
// configuration or missing file.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "hardy/verify.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace hardy;

namespace {

constexpr int kExitGate = 1;
constexpr int kExitConfig = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void read_config(const std::string& path, Settings& settings) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("{}:{}: expected key=value", path, number));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(fmt::format("{}:{}: empty key or value", path, number));
    settings.set(key, value, "config");
  }
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct Artifact {
  std::string file;
  std::string hash;
};

Artifact write_file(const fs::path& dir, const std::string& name, const std::string& bytes) {
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  out << bytes;
  return {name, fmt::format("{:016x}", fnv1a64(bytes))};
}

struct RunOptions {
  std::string target;
  std::string config;
  std::optional<long> seed;
  std::optional<long> n;
  std::optional<std::string> tmax;
  std::optional<std::string> tol;
  std::optional<std::string> out;
};

int run(const RunOptions& opt) {
  Settings base;
  if (!opt.config.empty()) read_config(opt.config, base);
  if (opt.seed) base.set("seed", std::to_string(*opt.seed), "flag");
  if (opt.n) base.set("n", std::to_string(*opt.n), "flag");
  if (opt.tmax) base.set("tmax", *opt.tmax, "flag");
  if (opt.tol) base.set("tol", *opt.tol, "flag");

  std::vector<const ExperimentInfo*> chosen;
  if (opt.target == "all") {
    for (const auto& e : experiment_catalogue()) chosen.push_back(&e);
  } else {
    try {
      chosen.push_back(&find_experiment(opt.target));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  for (const auto* info : chosen) {
    try {
      check_settings(*info, base);
    } catch (const std::invalid_argument& e) {
      // a shared config file may carry keys for other experiments
      if (opt.target != "all") throw ConfigError(e.what());
    }
  }

  // --out wins over an out= line; neither is part of the result echo unless it came from the config
  const fs::path dir(opt.out ? *opt.out : (base.has("out") ? base.text("out", "results") : "results"));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));

  nlohmann::json manifest = {{"command", opt.target}, {"config", base.echo()}, {"experiments", nlohmann::json::array()}};
  bool all_pass = true;
  for (const auto* info : chosen) {
    ExperimentResult result;
    const Settings local = base;  // keeps the parameter echo per experiment
    try {
      result = info->run(local);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("{}: {}", info->id, e.what()));
    }
    std::vector<Artifact> artifacts;
    artifacts.push_back(write_file(dir, info->id + ".json", to_json(result).dump(2) + "\n"));
    for (const auto& table : result.tables) {
      std::ostringstream csv;
      write_csv(table, csv);
      artifacts.push_back(write_file(dir, fmt::format("{}_{}.csv", info->id, table.name), csv.str()));
    }
    nlohmann::json files = nlohmann::json::array();
    for (const auto& a : artifacts) files.push_back({{"file", a.file}, {"fnv1a64", a.hash}});
    manifest["experiments"].push_back({{"id", info->id}, {"pass", result.pass()}, {"artifacts", files}});

    std::cout << fmt::format("{} {}\n", result.pass() ? "PASS" : "FAIL", info->id);
    for (const auto& g : result.gates) {
      std::cout << fmt::format("  [{}] {}: {:.6g} {} {:.6g} ({})\n", g.pass ? "ok" : "FAIL", g.name, g.measured,
                               g.relation, g.threshold, g.source);
    }
    all_pass = all_pass && result.pass();
  }
  write_file(dir, "manifest.json", manifest.dump(2) + "\n");
  return all_pass ? 0 : kExitGate;
}

void list() {
  for (const auto& e : experiment_catalogue()) std::cout << fmt::format("{:<22} {}\n", e.id, e.summary);
}

void describe(const std::string& id) {
  const ExperimentInfo* info = nullptr;
  try {
    info = &find_experiment(id);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  std::cout << info->id << "\n  " << info->summary << "\n\nclaim:\n  " << info->claim << "\n\nreference:\n  "
            << info->reference << "\n\nparameters:\n";
  for (const auto& p : info->parameters) {
    std::cout << fmt::format("  {:<26} {:<12} {}\n", p.key, p.fallback, p.meaning);
  }
  std::cout << "\ncommon keys: seed (1), n (1), tol, tmax, out (results)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Runs the heat maximal-regularity certification experiments"};
  app.require_subcommand(1);

  RunOptions opt;
  auto* run_cmd = app.add_subcommand("run", "run one experiment, or all");
  run_cmd->add_option("experiment", opt.target, "experiment id or 'all'")->required();
  run_cmd->add_option("--config", opt.config, "key=value file; flags win");
  run_cmd->add_option("--seed", opt.seed, "random seed");
  run_cmd->add_option("--n", opt.n, "spatial dimension (1 or 2)");
  run_cmd->add_option("--tmax", opt.tmax, "time horizon");
  run_cmd->add_option("--tol", opt.tol, "main tolerance");
  run_cmd->add_option("--out", opt.out, "output directory");

  app.add_subcommand("list", "list the experiments");
  std::string describe_id;
  auto* describe_cmd = app.add_subcommand("describe", "show the parameters and the claim of an experiment");
  describe_cmd->add_option("experiment", describe_id)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) return run(opt);
    if (*describe_cmd) {
      describe(describe_id);
      return 0;
    }
    list();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
