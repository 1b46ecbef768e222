#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aggfw/bounds.hpp"
#include "aggfw/errors.hpp"
#include "aggfw/experiment.hpp"
#include "aggfw/miqp.hpp"

using namespace aggfw;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    if (!line.empty() && line.back() == ',') row.push_back("");
    rows.push_back(row);
  }
  return rows;
}

// Drops the wall_ms column.
std::string without_timing(const std::string& csv) {
  std::string out;
  for (const auto& row : parse_csv(csv)) {
    for (std::size_t c = 0; c + 1 < row.size(); ++c) out += row[c] + ",";
    out += "\n";
  }
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("field formatting") {
  CHECK(format_field(std::nan("")).empty());
  CHECK(format_field(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_field(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("fw csv layout") {
  const MiqpInstance inst = MiqpInstance::generate(3, 6, 1);
  FwConfig cfg;
  cfg.iterations = 4;
  const FwResult r = fw_run(inst, cfg);
  const auto rows = parse_csv(fw_csv(r.records));
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].size() == 7);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    REQUIRE(rows[k].size() == 7);
    CHECK(rows[k][0] == std::to_string(k - 1));
    CHECK(std::stod(rows[k][1]) == r.records[k - 1].objective);
    CHECK(rows[k][4].empty());
    CHECK(rows[k][5].empty());
  }
  CHECK(rows[5][3].empty());
  CHECK(fw_csv({}) == std::string(kCsvHeader) + "\n");
}

TEST_CASE("sfw csv layout and reruns") {
  const MiqpInstance inst = MiqpInstance::generate(3, 8, 1);
  SfwConfig cfg;
  cfg.iterations = 6;
  cfg.schedule = SamplingSchedule::constant(4);
  cfg.seed = 9;
  const std::string a = sfw_csv(sfw_run(inst, cfg).records);
  const std::string b = sfw_csv(sfw_run(inst, cfg).records);
  CHECK(without_timing(a) == without_timing(b));
  const auto rows = parse_csv(a);
  REQUIRE(rows.size() == 8);
  CHECK(rows[1][4] == "4");
  CHECK(rows[7][4].empty());
  CHECK(rows[7][5].empty());
  CHECK(sfw_csv({}) == std::string(kCsvHeader) + "\n");
}

TEST_CASE("summary statistics recompute from the curves") {
  const std::vector<std::vector<double>> curves{
      {1.0, 0.5, 0.2}, {3.0, 0.7, 0.1}, {2.0, 0.3, 0.3}};
  const auto rows = summarize(curves);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].mean == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rows[0].std == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rows[1].min == 0.3);
  CHECK(rows[1].max == 0.7);
  CHECK(rows[2].count == 3);
  const auto table = parse_csv(summary_csv(rows));
  CHECK(table[0][0] == "k");
  CHECK(std::abs(std::stod(table[2][1]) - 0.5) <= 1e-12);
  CHECK(summarize({{4.0}})[0].std == 0.0);
  CHECK_THROWS_AS(summarize({{1.0, 2.0}, {1.0}}), ConfigError);
}

TEST_CASE("atomic writes") {
  const auto dir = std::filesystem::temp_directory_path() / "aggfw_test_exp";
  std::filesystem::remove_all(dir);
  write_atomic(dir / "sub" / "x.csv", "a,b\n");
  CHECK(slurp(dir / "sub" / "x.csv") == "a,b\n");
  CHECK_FALSE(std::filesystem::exists(dir / "sub" / "x.csv.tmp"));
  write_atomic(dir / "sub" / "x.csv", "c\n");
  CHECK(slurp(dir / "sub" / "x.csv") == "c\n");
  std::filesystem::remove_all(dir);
}

TEST_CASE("svg output") {
  Series s{"fw", {1, 2, 3, 4}, {1.0, 0.5, 0.25, 0.0}};
  const std::string log = render_svg({s}, true, "gap");
  CHECK(log.find("viewBox=\"0 0 800 600\"") != std::string::npos);
  CHECK(log.find("<polyline") != std::string::npos);
  const std::string lin = render_svg({s, s}, false, "J");
  std::size_t count = 0;
  for (std::size_t p = lin.find("<polyline"); p != std::string::npos;
       p = lin.find("<polyline", p + 1)) {
    ++count;
  }
  CHECK(count == 2);
}

TEST_CASE("seed lists") {
  CHECK(parse_seed_list("3") == std::vector<std::uint64_t>{3});
  CHECK(parse_seed_list("1-4,9") == std::vector<std::uint64_t>{1, 2, 3, 4, 9});
  CHECK(parse_seed_list("1-50").size() == 50);
  CHECK_THROWS_AS(parse_seed_list(""), ConfigError);
  CHECK_THROWS_AS(parse_seed_list("5-2"), ConfigError);
  CHECK_THROWS_AS(parse_seed_list("x"), ConfigError);
}

TEST_CASE("configuration validation") {
  ExperimentConfig fw;
  CHECK_NOTHROW(validate(fw));
  fw.stopping_time = true;
  CHECK_THROWS_AS(validate(fw), ConfigError);
  fw.stopping_time = false;
  fw.schedules = {SamplingSchedule::constant(3)};
  CHECK_THROWS_AS(validate(fw), ConfigError);

  ExperimentConfig sfw;
  sfw.algorithm = Algorithm::kSfw;
  CHECK_NOTHROW(validate(sfw));
  sfw.rule = StepRule::kLineSearchFw;
  CHECK_THROWS_AS(validate(sfw), ConfigError);
  sfw.rule = StepRule::kLineSearchSfw;
  sfw.stopping_time = true;
  CHECK_THROWS_AS(validate(sfw), ConfigError);
  sfw.stopping_time = false;
  sfw.select_n = 10;
  CHECK_THROWS_AS(validate(sfw), ConfigError);
}

TEST_CASE("problem loading") {
  ExperimentConfig cfg;
  cfg.gen_rows = 3;
  cfg.gen_agents = 5;
  const LoadedProblem gen = load_problem(cfg);
  CHECK(gen.problem->num_agents() == 5);
  CHECK(gen.relaxed_optimum.has_value());
  cfg.instance = "balanced:6";
  const LoadedProblem bal = load_problem(cfg);
  CHECK(bal.problem->num_agents() == 6);
  CHECK(*bal.relaxed_optimum == -1.0);
  cfg.instance = "balanced:zero";
  CHECK_THROWS_AS(load_problem(cfg), ConfigError);
  cfg.instance = "/nonexistent/instance.json";
  CHECK_THROWS_AS(load_problem(cfg), ConfigError);
}

TEST_CASE("bounds report") {
  const MiqpInstance inst = MiqpInstance::generate(100, 100, 1);
  const auto schedule = SamplingSchedule::quadratic(24.0);
  const nlohmann::json r =
      bounds_report(inst, 200, schedule, {0.3, 0.6}, {0.1});
  CHECK(r["gap_refined D[min(q,N)]/(2N^2)"].get<double>() <=
        r["gap_basic C1/(2N)"].get<double>());
  CHECK(r["quadratic_schedule confidence 1-exp(-A/12)"].get<double>() ==
        doctest::Approx(1 - std::exp(-2.0)));

  // v_K and m_K straight from their sums.
  const double c0 = compute_constants(inst).c0;
  double v = 0.0;
  double m = 0.0;
  for (std::size_t k = 1; k < 200; ++k) {
    const double nk = std::max(std::ceil(24.0 * k * k / 100.0), 1.0);
    v += k * (k + 1.0) * (k + 1.0) / nk;
    m = std::max(m, (k + 1.0) * (k + 2.0) / nk);
  }
  v *= 2 * c0 * c0 / (200.0 * 200.0 * 201.0 * 201.0);
  m *= c0 / (200.0 * 201.0);
  CHECK(r["sfw_v_K"].get<double>() == doctest::Approx(v).epsilon(1e-12));
  CHECK(r["sfw_m_K"].get<double>() == doctest::Approx(m).epsilon(1e-12));
  CHECK(r["tails"].size() == 2);
  CHECK(bounds_text(r).find("C1") != std::string::npos);
  CHECK_FALSE(r.contains("warning"));
  CHECK(bounds_report(inst, 201, schedule, {}, {}).contains("warning"));
}
