#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "mbtk/config.hpp"
#include "mbtk/group_spec.hpp"

using namespace mbtk;

namespace {

int run_with(RunConfig cfg) {
  RunResult res = run_command(cfg);
  if (!res.error.empty()) std::cerr << "error: " << res.error << "\n";
  std::string dump = res.report.dump(2);
  if (!cfg.out_json.empty()) {
    std::ofstream out(cfg.out_json);
    out << dump << "\n";
  } else {
    std::cout << dump << "\n";
  }
  if (!cfg.out_csv.empty() && !res.csv.empty()) {
    std::ofstream out(cfg.out_csv);
    out << res.csv;
  }
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Malle invariants, local hom enumeration, Malle-Bhargava "
               "series and random groups with local data"};
  app.require_subcommand(1);

  std::string config_path;
  std::string group, weight, mode, engine, normalize_by, out_json, out_csv;
  std::string places_expr;
  std::vector<std::string> wild_tables;
  long x = -1, p_max = -1, samples = -1, designated = -1, degree = -1;
  std::vector<long> x_schedule, checkpoints;
  int parallelism = -1;
  int64_t seed = -1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--group", group, "group spec, e.g. S3, C4@4, C2xC2");
    cmd->add_option("--degree", degree, "expected permutation degree (validated)");
    cmd->add_option("--weight", weight, "index | ramified-primes");
    cmd->add_option("--places", places_expr,
                    "explicit list '2,3,5' or bound 'norm<=100'");
    cmd->add_option("--wild-table", wild_tables, "wild table JSON file(s)");
    cmd->add_option("--x", x, "coefficient / counting bound");
    cmd->add_option("--x-schedule", x_schedule, "counting bounds");
    cmd->add_option("--checkpoints", checkpoints, "partial-sum checkpoints");
    cmd->add_option("--pmax", p_max, "Euler product truncation");
    cmd->add_option("--samples", samples, "Monte Carlo sample count");
    cmd->add_option("--seed", seed, "RNG seed (required for stochastic runs)");
    cmd->add_option("--mode", mode, "no-torsion | structural");
    cmd->add_option("--engine", engine, "auto | abelian | generic");
    cmd->add_option("--normalize-by", normalize_by, "partial-sum | prediction");
    cmd->add_option("--designated-places", designated,
                    "leading places for the grunwald table");
    cmd->add_option("--parallelism", parallelism, "worker threads (0 = all)");
    cmd->add_option("--out", out_json, "report JSON path (default stdout)");
    cmd->add_option("--csv", out_csv, "CSV summary path");
  };

  for (const char* name :
       {"invariants", "local", "series", "constant", "moments", "simulate",
        "lln", "grunwald", "decay", "oracle"})
    add_common(app.add_subcommand(name));

  CLI11_PARSE(app, argc, argv);

  Json base = Json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot open config " << config_path << "\n";
      return kValidation;
    }
    try {
      in >> base;
    } catch (const std::exception& e) {
      std::cerr << "error: bad config JSON: " << e.what() << "\n";
      return kValidation;
    }
  }
  if (!base.contains("schema_version")) base["schema_version"] = 1;
  base["command"] = app.get_subcommands().front()->get_name();

  // flags override the config file
  if (!group.empty()) base["group"] = group;
  if (!weight.empty()) base["weight"] = weight;
  if (!places_expr.empty()) {
    Json places = Json::object();
    if (places_expr.rfind("norm<=", 0) == 0) {
      places["norms_le"] = std::stol(places_expr.substr(6));
    } else {
      std::vector<long> list;
      std::string cur;
      for (char c : places_expr + ",") {
        if (c == ',') {
          if (!cur.empty()) list.push_back(std::stol(cur));
          cur.clear();
        } else {
          cur += c;
        }
      }
      places["list"] = list;
    }
    base["places"] = places;
  }
  if (!wild_tables.empty()) base["wild_tables"] = wild_tables;
  if (x >= 0) base["x"] = x;
  if (!x_schedule.empty()) base["x_schedule"] = x_schedule;
  if (!checkpoints.empty()) base["checkpoints"] = checkpoints;
  if (p_max >= 0) base["p_max"] = p_max;
  if (samples >= 0) base["samples"] = samples;
  if (seed >= 0) base["seed"] = seed;
  if (!mode.empty()) base["mode"] = mode;
  if (!engine.empty()) base["engine"] = engine;
  if (!normalize_by.empty()) base["normalize_by"] = normalize_by;
  if (designated >= 0) base["designated_places"] = designated;
  if (parallelism >= 0) base["parallelism"] = parallelism;

  RunConfig cfg;
  try {
    cfg = parse_config(base);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
  if (degree >= 0) {
    try {
      if (parse_group_spec(cfg.group).degree() != degree) {
        std::cerr << "error: group " << cfg.group << " does not act in degree "
                  << degree << "\n";
        return kValidation;
      }
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kValidation;
    }
  }
  if (!out_json.empty()) cfg.out_json = out_json;
  if (!out_csv.empty()) cfg.out_csv = out_csv;
  return run_with(std::move(cfg));
}
