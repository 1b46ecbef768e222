#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "aggfw/frank_wolfe.hpp"
#include "aggfw/problem.hpp"
#include "aggfw/schedule.hpp"
#include "aggfw/stochastic_fw.hpp"

namespace aggfw {

enum class Algorithm { kFw, kSfw };

// Everything a run, sweep or bounds report needs. The instance is either a
// file written by `generate`, "balanced:<N>", or generated from
// (gen_rows, gen_agents, gen_seed) when `instance` is empty.
struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kFw;
  std::string instance;
  std::size_t gen_rows = 100;
  std::size_t gen_agents = 100;
  std::uint64_t gen_seed = 1;
  std::size_t iterations = 200;
  StepRule rule = StepRule::kCanonical;
  std::vector<SamplingSchedule> schedules;
  std::vector<std::uint64_t> seeds{0};
  std::size_t select_n = 0;
  bool keep_if_worse = true;
  bool stopping_time = false;
  std::filesystem::path out_dir = ".";
  bool svg = false;
  unsigned threads = 1;
};

// Rejects combinations that do not make sense before any work is done.
void validate(const ExperimentConfig& config);

// "1,2,5" and "1-50" (inclusive) forms, mixed freely.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

struct LoadedProblem {
  std::shared_ptr<const ProblemInstance> problem;
  std::string description;
  std::optional<double> relaxed_optimum;  // reference value when available
};

// Loads or generates the instance and, for the MIQP family, solves the
// reference relaxation.
LoadedProblem load_problem(const ExperimentConfig& config);

// %.17g, or empty for NaN.
std::string format_field(double v);

inline constexpr const char* kCsvHeader =
    "k,value,beta,omega,n_k,active_count,wall_ms";

std::string fw_csv(const std::vector<FwRecord>& records);
std::string sfw_csv(const std::vector<SfwRecord>& records);

// Writes through a temporary file in the same directory and renames it in
// place. Throws std::runtime_error naming the path on I/O failure.
void write_atomic(const std::filesystem::path& path,
                  const std::string& content);

struct Series {
  std::string label;
  std::vector<double> k;
  std::vector<double> value;
};

// Line chart in an 800x600 viewBox. With log_axes, points with a
// non-positive coordinate are dropped.
std::string render_svg(const std::vector<Series>& series, bool log_axes,
                       const std::string& y_label);

// Per-iteration statistics over seeds.
struct SweepRow {
  std::size_t k = 0;
  double mean = 0.0;
  double std = 0.0;  // n - 1 denominator, 0 for a single seed
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

// curves[s][k]; all curves must have the same length.
std::vector<SweepRow> summarize(const std::vector<std::vector<double>>& curves);
std::string summary_csv(const std::vector<SweepRow>& rows);

// Certificate values for the instance, K, schedule, eps and zeta lists.
nlohmann::json bounds_report(const ProblemInstance& p, std::size_t big_k,
                             const SamplingSchedule& schedule,
                             const std::vector<double>& eps,
                             const std::vector<double>& zeta);
std::string bounds_text(const nlohmann::json& report);

}  // namespace aggfw
