// aggfw: instance generation, FW/SFW runs, seed sweeps and bound reports.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "aggfw/bounds.hpp"
#include "aggfw/errors.hpp"
#include "aggfw/experiment.hpp"
#include "aggfw/miqp.hpp"
#include "aggfw/parallel.hpp"

namespace fs = std::filesystem;
using namespace aggfw;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

const std::set<std::string> kCommands = {"generate", "run-fw", "run-sfw",
                                         "sweep", "bounds"};

// Turns a JSON config object into command-line tokens. Keys use the long
// flag names (underscores allowed); keys also given on the command line are
// skipped so the command line wins.
std::vector<std::string> config_tokens(const fs::path& path,
                                       const std::set<std::string>& given) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("config " + path.string() + " must be a JSON object");
  }
  std::vector<std::string> out;
  for (const auto& [raw_key, value] : doc.items()) {
    std::string key = raw_key;
    for (char& ch : key) {
      if (ch == '_') ch = '-';
    }
    const std::string flag = "--" + key;
    if (given.count(flag) || given.count("--no-" + key)) continue;
    auto scalar = [&](const nlohmann::json& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_integer()) return std::to_string(v.get<long long>());
      if (v.is_number()) return format_field(v.get<double>());
      throw ConfigError("config key '" + raw_key + "' has an unsupported type");
    };
    if (value.is_boolean()) {
      if (value.get<bool>()) {
        out.push_back(flag);
      } else if (key == "keep-if-worse") {
        out.push_back("--no-keep-if-worse");
      }
    } else if (value.is_array()) {
      for (const auto& v : value) {
        out.push_back(flag);
        out.push_back(scalar(v));
      }
    } else {
      out.push_back(flag);
      out.push_back(scalar(value));
    }
  }
  return out;
}

struct Cli {
  std::string instance;
  std::size_t rows = 100;
  std::size_t agents = 100;
  std::uint64_t instance_seed = 1;
  std::size_t iters = 200;
  std::string rule = "canonical";
  std::vector<std::string> schedules;
  std::string seeds;
  std::size_t select_n = 0;
  bool keep_if_worse = true;
  bool stopping_time = false;
  std::size_t max_draws = 0;
  std::string out = "out";
  bool svg = false;
  unsigned threads = 1;
  std::vector<double> eps;
  std::vector<double> zeta{0.1, 0.05};
  std::string bounds_json;
};

void add_instance_options(CLI::App* cmd, Cli& c) {
  cmd->add_option("--instance", c.instance,
                  "instance JSON from `generate`, or balanced:<N>");
  cmd->add_option("--rows,-m", c.rows, "M when generating in place")
      ->capture_default_str();
  cmd->add_option("--agents,-n", c.agents, "N when generating in place")
      ->capture_default_str();
  cmd->add_option("--instance-seed", c.instance_seed,
                  "seed when generating in place")
      ->capture_default_str();
}

ExperimentConfig to_config(const Cli& c, Algorithm algo,
                           const char* default_seeds) {
  ExperimentConfig cfg;
  cfg.algorithm = algo;
  cfg.instance = c.instance;
  cfg.gen_rows = c.rows;
  cfg.gen_agents = c.agents;
  cfg.gen_seed = c.instance_seed;
  cfg.iterations = c.iters;
  cfg.rule = parse_step_rule(c.rule);
  for (const auto& s : c.schedules) {
    cfg.schedules.push_back(SamplingSchedule::parse(s));
  }
  cfg.seeds = parse_seed_list(c.seeds.empty() ? default_seeds : c.seeds);
  cfg.select_n = c.select_n;
  cfg.keep_if_worse = c.keep_if_worse;
  cfg.stopping_time = c.stopping_time;
  cfg.out_dir = c.out;
  cfg.svg = c.svg;
  cfg.threads = c.threads;
  validate(cfg);
  return cfg;
}

std::vector<double> gap_curve(const std::vector<double>& values,
                              const LoadedProblem& lp) {
  std::vector<double> g = values;
  if (lp.relaxed_optimum) {
    for (double& v : g) v -= *lp.relaxed_optimum;
  }
  return g;
}

Series make_series(std::string label, const std::vector<double>& gaps) {
  Series s;
  s.label = std::move(label);
  for (std::size_t k = 0; k < gaps.size(); ++k) {
    s.k.push_back(static_cast<double>(k));
    s.value.push_back(gaps[k]);
  }
  return s;
}

std::string y_label(const LoadedProblem& lp) {
  return lp.relaxed_optimum ? "value - relaxed optimum" : "value";
}

void print_constants(const ProblemInstance& p) {
  const ProblemConstants c = compute_constants(p);
  const double n = static_cast<double>(p.num_agents());
  std::printf("C0                      %.10g\n", c.c0);
  std::printf("C1                      %.10g\n", c.c1);
  std::printf("C1/(2N)                 %.10g\n", c.c1 / (2.0 * n));
  std::printf("D[min(q,N)]/(2N^2)      %.10g\n", gap_bound_refined(c));
}

int cmd_generate(const Cli& c, std::uint64_t seed) {
  const MiqpInstance inst = MiqpInstance::generate(c.rows, c.agents, seed);
  save_instance(inst, c.out);
  std::printf("wrote %s (M=%zu N=%zu seed=%llu)\n", c.out.c_str(), c.rows,
              c.agents, static_cast<unsigned long long>(seed));
  print_constants(inst);
  return 0;
}

int cmd_run_fw(const Cli& c) {
  const ExperimentConfig cfg = to_config(c, Algorithm::kFw, "0");
  if (cfg.seeds.size() != 1) {
    throw ConfigError("run-fw takes a single seed; use sweep for several");
  }
  const LoadedProblem lp = load_problem(cfg);
  const fs::path csv = cfg.out_dir / "fw.csv";
  if (cfg.iterations == 0) {
    write_atomic(csv, std::string(kCsvHeader) + "\n");
    std::printf("%s: K=0, wrote header only to %s\n", lp.description.c_str(),
                csv.c_str());
    return 0;
  }
  FwConfig fc;
  fc.iterations = cfg.iterations;
  fc.rule = cfg.rule;
  fc.seed = cfg.seeds.front();
  fc.threads = cfg.threads;
  std::optional<FwSelectionResult> sel;
  if (cfg.select_n > 0) sel = fw_with_selection(*lp.problem, fc, cfg.select_n);
  const FwResult run = sel ? sel->run : fw_run(*lp.problem, fc);
  write_atomic(csv, fw_csv(run.records));
  std::vector<double> values;
  for (const auto& r : run.records) values.push_back(r.objective);
  const std::vector<double> gaps = gap_curve(values, lp);
  if (cfg.svg) {
    write_atomic(cfg.out_dir / "fw.svg",
                 render_svg({make_series("fw " + c.rule, gaps)},
                            lp.relaxed_optimum.has_value(), y_label(lp)));
  }
  std::printf("%s\n", lp.description.c_str());
  std::printf("final relaxed value     %.10g\n", values.back());
  std::printf("final beta              %.10g\n", run.records.back().beta);
  if (lp.relaxed_optimum) {
    std::printf("relaxed optimum         %.10g\n", *lp.relaxed_optimum);
    std::printf("final gap               %.6g\n", gaps.back());
  }
  if (sel) {
    std::printf("selection n=%zu J       %.10g\n", cfg.select_n, sel->value);
    if (lp.relaxed_optimum) {
      std::printf("selection J - opt       %.6g\n",
                  sel->value - *lp.relaxed_optimum);
    }
    if (sel->recommended_draws) {
      std::printf("recommended n (zeta=0.1) %zu\n", *sel->recommended_draws);
    }
  }
  std::printf("wrote %s\n", csv.c_str());
  return 0;
}

SfwConfig sfw_config(const ExperimentConfig& cfg, const SamplingSchedule& s,
                     std::uint64_t seed, std::size_t max_draws,
                     unsigned threads) {
  SfwConfig sc;
  sc.iterations = cfg.iterations;
  sc.rule = cfg.rule;
  sc.schedule = s;
  sc.seed = seed;
  sc.keep_if_worse = cfg.keep_if_worse;
  sc.stopping_time = cfg.stopping_time;
  if (max_draws > 0) sc.max_draws = max_draws;
  sc.threads = threads;
  return sc;
}

std::vector<SfwRecord> run_sfw_records(const LoadedProblem& lp,
                                       const SfwConfig& sc) {
  if (sc.iterations == 0) return {};
  SfwResult r = sfw_run(*lp.problem, sc);
  for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return std::move(r.records);
}

int cmd_run_sfw(const Cli& c) {
  ExperimentConfig cfg = to_config(c, Algorithm::kSfw, "0");
  if (cfg.seeds.size() != 1) {
    throw ConfigError("run-sfw takes a single seed; use sweep for several");
  }
  if (cfg.schedules.size() > 1) {
    throw ConfigError("run-sfw takes a single schedule; use sweep for several");
  }
  const SamplingSchedule schedule =
      cfg.schedules.empty() ? SamplingSchedule::constant(1)
                            : cfg.schedules.front();
  const LoadedProblem lp = load_problem(cfg);
  const auto records = run_sfw_records(
      lp, sfw_config(cfg, schedule, cfg.seeds.front(), c.max_draws,
                     cfg.threads));
  const fs::path csv = cfg.out_dir / "sfw.csv";
  write_atomic(csv, sfw_csv(records));
  std::printf("%s\n", lp.description.c_str());
  if (!records.empty()) {
    std::vector<double> values;
    for (const auto& r : records) values.push_back(r.value);
    const std::vector<double> gaps = gap_curve(values, lp);
    if (cfg.svg) {
      write_atomic(cfg.out_dir / "sfw.svg",
                   render_svg({make_series("sfw " + schedule.to_string(), gaps)},
                              lp.relaxed_optimum.has_value(), y_label(lp)));
    }
    std::printf("final J                 %.10g\n", values.back());
    if (lp.relaxed_optimum) {
      std::printf("final J - opt           %.6g\n", gaps.back());
    }
  }
  std::printf("wrote %s\n", csv.c_str());
  return 0;
}

std::string schedule_dir(const SamplingSchedule& s) {
  std::string name = s.to_string();
  for (char& ch : name) {
    if (ch == ':') ch = '_';
  }
  return name;
}

int cmd_sweep(const Cli& c) {
  ExperimentConfig cfg = to_config(c, Algorithm::kSfw, "1-50");
  if (cfg.schedules.empty()) {
    for (std::size_t n : {10, 100, 1000}) {
      cfg.schedules.push_back(SamplingSchedule::constant(n));
    }
  }
  const LoadedProblem lp = load_problem(cfg);
  std::printf("%s, %zu seeds\n", lp.description.c_str(), cfg.seeds.size());
  std::vector<Series> mean_curves;
  for (const SamplingSchedule& s : cfg.schedules) {
    const fs::path dir = cfg.out_dir / schedule_dir(s);
    std::vector<std::vector<double>> curves(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), cfg.threads, [&](std::size_t t) {
      const auto records = run_sfw_records(
          lp, sfw_config(cfg, s, cfg.seeds[t], c.max_draws, 1));
      write_atomic(dir / ("seed_" + std::to_string(cfg.seeds[t]) + ".csv"),
                   sfw_csv(records));
      std::vector<double> values;
      for (const auto& r : records) values.push_back(r.value);
      curves[t] = gap_curve(values, lp);
    });
    const std::vector<SweepRow> rows = summarize(curves);
    write_atomic(dir / "summary.csv", summary_csv(rows));
    if (!rows.empty()) {
      std::printf("%-12s final mean %.6g  std %.6g  min %.6g  max %.6g\n",
                  s.to_string().c_str(), rows.back().mean, rows.back().std,
                  rows.back().min, rows.back().max);
      std::vector<double> means;
      for (const auto& r : rows) means.push_back(r.mean);
      mean_curves.push_back(make_series(s.to_string(), means));
    }
  }
  if (cfg.svg && !mean_curves.empty()) {
    write_atomic(cfg.out_dir / "sweep.svg",
                 render_svg(mean_curves, lp.relaxed_optimum.has_value(),
                            "mean " + y_label(lp)));
  }
  std::printf("wrote %s\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_bounds(const Cli& c) {
  ExperimentConfig cfg = to_config(c, Algorithm::kSfw, "0");
  const SamplingSchedule schedule =
      cfg.schedules.empty() ? SamplingSchedule::constant(1)
                            : cfg.schedules.front();
  const LoadedProblem lp = load_problem(cfg);
  std::vector<double> eps = c.eps;
  if (eps.empty()) {
    const double c1 = compute_constants(*lp.problem).c1;
    const double n = static_cast<double>(lp.problem->num_agents());
    eps = {c1 / (2.0 * n), c1 / n};
  }
  const nlohmann::json report =
      bounds_report(*lp.problem, cfg.iterations, schedule, eps, c.zeta);
  std::printf("%s\n%s", lp.description.c_str(), bounds_text(report).c_str());
  if (!c.bounds_json.empty()) {
    write_atomic(c.bounds_json, report.dump(2) + "\n");
    std::printf("wrote %s\n", c.bounds_json.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  std::set<std::string> given;
  std::vector<std::string> user;
  for (std::size_t t = 0; t < args.size(); ++t) {
    if (args[t] == "--config" && t + 1 < args.size()) {
      config_path = args[++t];
      continue;
    }
    if (args[t].rfind("--config=", 0) == 0) {
      config_path = args[t].substr(9);
      continue;
    }
    if (args[t].rfind("--", 0) == 0) given.insert(args[t].substr(0, args[t].find('=')));
    user.push_back(args[t]);
  }

  CLI::App app{"Frank-Wolfe and stochastic Frank-Wolfe experiments for "
               "aggregative optimization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "aggfw 1.0");
  Cli c;
  std::uint64_t gen_seed = 0;

  auto* gen = app.add_subcommand("generate", "write a random MIQP instance");
  gen->add_option("--rows,-m", c.rows, "M")->capture_default_str();
  gen->add_option("--agents,-n", c.agents, "N")->capture_default_str();
  gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
  gen->add_option("--out", c.out, "output JSON path")->required();

  auto* fw = app.add_subcommand("run-fw", "relaxed Frank-Wolfe run");
  auto* sfw = app.add_subcommand("run-sfw", "stochastic Frank-Wolfe run");
  auto* sweep = app.add_subcommand("sweep", "multi-seed SFW sweep");
  auto* bnd = app.add_subcommand("bounds", "certificate report");
  for (CLI::App* cmd : {fw, sfw, sweep, bnd}) {
    add_instance_options(cmd, c);
    cmd->add_option("--iters,-K", c.iters, "iterations K")
        ->capture_default_str();
    cmd->add_option("--threads", c.threads,
                    "worker threads (agents for runs, seeds for sweep)")
        ->capture_default_str();
  }
  for (CLI::App* cmd : {fw, sfw, sweep}) {
    cmd->add_option("--rule", c.rule, "canonical | ls-fw | ls-sfw")
        ->capture_default_str();
    cmd->add_option("--seeds", c.seeds, "seed list, e.g. 3 or 1-50 or 1,4,9");
    cmd->add_option("--out", c.out, "output directory")->capture_default_str();
    cmd->add_flag("--svg", c.svg, "also render SVG charts");
  }
  fw->add_option("--select-n", c.select_n,
                 "draws of the selection step on the final profile");
  for (CLI::App* cmd : {sfw, sweep}) {
    cmd->add_option("--schedule", c.schedules,
                    "const:<n> or quad:<A>; repeatable for sweep");
    cmd->add_flag("--keep-if-worse,!--no-keep-if-worse", c.keep_if_worse,
                  "keep x^k when every candidate is worse (default on)");
    cmd->add_flag("--stopping-time", c.stopping_time,
                  "draw candidates until the acceptance test passes");
    cmd->add_option("--max-draws", c.max_draws,
                    "draw cap of the stopping-time variant");
  }
  bnd->add_option("--schedule", c.schedules, "const:<n> or quad:<A>");
  bnd->add_option("--eps", c.eps, "deviation levels for the tail bounds");
  bnd->add_option("--zeta", c.zeta, "failure levels for sample sizes")
      ->capture_default_str();
  bnd->add_option("--out", c.bounds_json, "JSON twin of the report");

  try {
    std::vector<std::string> tokens = user;
    if (!config_path.empty()) {
      auto pos = std::find_if(tokens.begin(), tokens.end(),
                              [](const std::string& s) {
                                return kCommands.count(s) > 0;
                              });
      if (pos == tokens.end()) {
        throw ConfigError("--config needs a subcommand");
      }
      const auto extra = config_tokens(config_path, given);
      tokens.insert(pos + 1, extra.begin(), extra.end());
    }
    std::reverse(tokens.begin(), tokens.end());
    app.parse(tokens);

    if (gen->parsed()) return cmd_generate(c, gen_seed);
    if (fw->parsed()) return cmd_run_fw(c);
    if (sfw->parsed()) return cmd_run_sfw(c);
    if (sweep->parsed()) return cmd_sweep(c);
    if (bnd->parsed()) return cmd_bounds(c);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }
  return 0;
}
