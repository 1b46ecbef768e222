#include "aggfw/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "aggfw/balanced_signs.hpp"
#include "aggfw/bounds.hpp"
#include "aggfw/errors.hpp"
#include "aggfw/miqp.hpp"

namespace aggfw {

void validate(const ExperimentConfig& config) {
  if (config.seeds.empty()) throw ConfigError("no seeds given");
  if (config.threads == 0) throw ConfigError("threads must be >= 1");
  if (config.algorithm == Algorithm::kFw) {
    if (config.stopping_time) {
      throw ConfigError("--stopping-time applies to run-sfw and sweep only");
    }
    if (!config.schedules.empty()) {
      throw ConfigError("--schedule applies to run-sfw and sweep only");
    }
  } else {
    if (config.rule == StepRule::kLineSearchFw) {
      throw ConfigError("rule ls-fw is for run-fw; SFW takes canonical or "
                        "ls-sfw");
    }
    if (config.stopping_time && config.rule != StepRule::kCanonical) {
      throw ConfigError("--stopping-time requires the canonical rule");
    }
    if (config.select_n != 0) {
      throw ConfigError("--select-n applies to run-fw only");
    }
  }
  if (config.instance.empty() &&
      (config.gen_rows == 0 || config.gen_agents == 0)) {
    throw ConfigError("generated instance needs M, N >= 1");
  }
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  auto number = [&](const std::string& s) -> std::uint64_t {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      if (s.empty() || s[0] == '-' || s[0] == '+') throw std::invalid_argument(s);
      v = std::stoull(s, &used);
    } catch (const std::logic_error&) {
      throw ConfigError("invalid seed '" + s + "' in '" + text + "'");
    }
    if (used != s.size()) {
      throw ConfigError("invalid seed '" + s + "' in '" + text + "'");
    }
    return v;
  };
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) {
      seeds.push_back(number(item));
      continue;
    }
    const std::uint64_t lo = number(item.substr(0, dash));
    const std::uint64_t hi = number(item.substr(dash + 1));
    if (hi < lo || hi - lo >= 1000000) {
      throw ConfigError("invalid seed range '" + item + "'");
    }
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw ConfigError("empty seed list '" + text + "'");
  return seeds;
}

LoadedProblem load_problem(const ExperimentConfig& config) {
  LoadedProblem out;
  const std::string& source = config.instance;
  if (source.rfind("balanced:", 0) == 0) {
    const std::string arg = source.substr(9);
    std::size_t used = 0;
    long long n = 0;
    try {
      n = std::stoll(arg, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used != arg.size() || n < 1) {
      throw ConfigError("invalid instance '" + source + "'");
    }
    out.problem =
        std::make_shared<BalancedSignsInstance>(static_cast<std::size_t>(n));
    out.description = "balanced-signs N=" + arg;
    out.relaxed_optimum = BalancedSignsInstance::relaxed_optimum();
    return out;
  }
  std::shared_ptr<const MiqpInstance> inst;
  if (source.empty()) {
    inst = std::make_shared<MiqpInstance>(MiqpInstance::generate(
        config.gen_rows, config.gen_agents, config.gen_seed));
  } else {
    inst = std::make_shared<MiqpInstance>(load_instance(source));
  }
  out.description = "miqp M=" + std::to_string(inst->rows()) +
                    " N=" + std::to_string(inst->cols()) +
                    " seed=" + std::to_string(inst->seed());
  out.relaxed_optimum = reference_relaxed_optimum(*inst).value;
  out.problem = std::move(inst);
  return out;
}

std::string format_field(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fw_csv(const std::vector<FwRecord>& records) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const FwRecord& r : records) {
    out += std::to_string(r.k) + "," + format_field(r.objective) + "," +
           format_field(r.beta) + "," + format_field(r.omega) + ",,," +
           format_field(r.wall_ms) + "\n";
  }
  return out;
}

std::string sfw_csv(const std::vector<SfwRecord>& records) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const SfwRecord& r : records) {
    const bool stepped = !std::isnan(r.omega);
    out += std::to_string(r.k) + "," + format_field(r.value) + "," +
           format_field(r.beta) + "," + format_field(r.omega) + "," +
           (stepped ? std::to_string(r.n_k) : "") + "," +
           (stepped ? std::to_string(r.active_count) : "") + "," +
           format_field(r.wall_ms) + "\n";
  }
  return out;
}

void write_atomic(const std::filesystem::path& path,
                  const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
      throw std::runtime_error("cannot create directory " +
                               path.parent_path().string() + ": " +
                               ec.message());
    }
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot rename onto " + path.string());
  }
}

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 60.0;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::string render_svg(const std::vector<Series>& series, bool log_axes,
                       const std::string& y_label) {
  auto tx = [&](double v) { return log_axes ? std::log10(v) : v; };
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const Series& s : series) {
    for (std::size_t t = 0; t < s.k.size(); ++t) {
      if (log_axes && (s.k[t] <= 0.0 || s.value[t] <= 0.0)) continue;
      if (!std::isfinite(s.value[t])) continue;
      xmin = std::min(xmin, tx(s.k[t]));
      xmax = std::max(xmax, tx(s.k[t]));
      ymin = std::min(ymin, tx(s.value[t]));
      ymax = std::max(ymax, tx(s.value[t]));
    }
  }
  if (!(xmin <= xmax)) xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (tx(v) - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double v) {
    return kTop + (1.0 - (tx(v) - ymin) / (ymax - ymin)) * ph;
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" "
        "width=\"800\" height=\"600\">\n"
     << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n"
     << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
     << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  // Axis ticks at the ends and middle of each range.
  for (int t = 0; t <= 2; ++t) {
    const double fx = xmin + (xmax - xmin) * t / 2.0;
    const double fy = ymin + (ymax - ymin) * t / 2.0;
    const double vx = log_axes ? std::pow(10.0, fx) : fx;
    const double vy = log_axes ? std::pow(10.0, fy) : fy;
    const double sx = kLeft + pw * t / 2.0;
    const double sy = kTop + ph * (1.0 - t / 2.0);
    os << "<text x=\"" << num(sx) << "\" y=\"" << num(kTop + ph + 18)
       << "\" font-size=\"12\" text-anchor=\"middle\">" << tick_label(vx)
       << "</text>\n"
       << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy + 4)
       << "\" font-size=\"12\" text-anchor=\"end\">" << tick_label(vy)
       << "</text>\n";
  }
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 15)
     << "\" font-size=\"14\" text-anchor=\"middle\">k</text>\n"
     << "<text x=\"18\" y=\"" << num(kTop + ph / 2)
     << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << num(kTop + ph / 2) << ")\">" << y_label << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    const Series& ser = series[s];
    for (std::size_t t = 0; t < ser.k.size(); ++t) {
      if (log_axes && (ser.k[t] <= 0.0 || ser.value[t] <= 0.0)) continue;
      if (!std::isfinite(ser.value[t])) continue;
      os << num(px(ser.k[t])) << "," << num(py(ser.value[t])) << " ";
    }
    os << "\"/>\n"
       << "<text x=\"" << num(kLeft + pw - 10) << "\" y=\""
       << num(kTop + 18 + 16 * static_cast<double>(s)) << "\" font-size=\"12\" "
       << "text-anchor=\"end\" fill=\"" << color << "\">" << ser.label
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<SweepRow> summarize(
    const std::vector<std::vector<double>>& curves) {
  std::vector<SweepRow> rows;
  if (curves.empty()) return rows;
  const std::size_t len = curves.front().size();
  for (const auto& c : curves) {
    if (c.size() != len) throw ConfigError("sweep curves differ in length");
  }
  const double count = static_cast<double>(curves.size());
  for (std::size_t k = 0; k < len; ++k) {
    SweepRow r;
    r.k = k;
    r.count = curves.size();
    r.min = std::numeric_limits<double>::infinity();
    r.max = -r.min;
    double sum = 0.0;
    for (const auto& c : curves) {
      sum += c[k];
      r.min = std::min(r.min, c[k]);
      r.max = std::max(r.max, c[k]);
    }
    r.mean = sum / count;
    double ss = 0.0;
    for (const auto& c : curves) ss += (c[k] - r.mean) * (c[k] - r.mean);
    r.std = curves.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
    rows.push_back(r);
  }
  return rows;
}

std::string summary_csv(const std::vector<SweepRow>& rows) {
  std::string out = "k,mean,std,min,max,count\n";
  for (const SweepRow& r : rows) {
    out += std::to_string(r.k) + "," + format_field(r.mean) + "," +
           format_field(r.std) + "," + format_field(r.min) + "," +
           format_field(r.max) + "," + std::to_string(r.count) + "\n";
  }
  return out;
}

nlohmann::json bounds_report(const ProblemInstance& p, std::size_t big_k,
                             const SamplingSchedule& schedule,
                             const std::vector<double>& eps,
                             const std::vector<double>& zeta) {
  if (big_k == 0) throw ConfigError("bounds need K >= 1");
  const ProblemConstants c = compute_constants(p);
  const std::size_t n = p.num_agents();
  nlohmann::json r;
  r["N"] = n;
  r["M"] = c.num_blocks;
  r["q"] = c.q;
  r["K"] = big_k;
  r["schedule"] = schedule.to_string();
  r["C0"] = c.c0;
  r["C1"] = c.c1;
  r["gap_basic C1/(2N)"] = gap_bound_basic(c);
  r["gap_refined D[min(q,N)]/(2N^2)"] = gap_bound_refined(c);
  r["fw_gap 2C1/K"] = fw_gap_bound(big_k, c.c1);
  const SfwTailConstants tc = sfw_tail_constants(big_k, c.c0, schedule, n);
  r["sfw_v_K"] = tc.v;
  r["sfw_m_K"] = tc.m;
  r["sfw_expectation 4C1/K"] = sfw_expectation_bound(big_k, c.c1);
  r["sfw_variance 16C1^2/K^2+v_K/N"] =
      sfw_variance_bound(big_k, c.c1, tc, n);
  r["stopping_time_draws E[n_K] bound"] = stopping_time_draw_bound(big_k, n);
  if (big_k > 2 * n) {
    r["warning"] = "K > 2N: the SFW certificates are only proven for K <= 2N";
  }
  if (schedule.kind() == SamplingSchedule::Kind::kQuadratic) {
    r["quadratic_schedule threshold (4C1+C0)/K"] =
        (4.0 * c.c1 + c.c0) / static_cast<double>(big_k);
    r["quadratic_schedule confidence 1-exp(-A/12)"] =
        quadratic_schedule_confidence(schedule.quadratic_factor());
  }
  nlohmann::json tails = nlohmann::json::array();
  for (double e : eps) {
    tails.push_back({{"eps", e},
                     {"selection exp(-2N eps^2/C0^2)",
                      mcdiarmid_tail(n, e, c.c0)},
                     {"sfw exp(-eps^2 N/(2(v_K+eps m_K/3)))",
                      sfw_tail(e, n, tc)}});
  }
  r["tails"] = tails;
  nlohmann::json sizes = nlohmann::json::array();
  for (double z : zeta) {
    nlohmann::json row{{"zeta", z}};
    const std::size_t k = std::min(big_k, n);
    if (c.c1 > 0.0) {
      row["k"] = k;
      row["sample_size (2C0^2/C1^2)(k^2/N)ln(1/zeta)"] =
          sample_size_for_confidence(k, n, z, c.c0, c.c1);
      row["target 3C1/k"] = 3.0 * c.c1 / static_cast<double>(k);
    }
    sizes.push_back(row);
  }
  r["selection_sample_sizes"] = sizes;
  return r;
}

std::string bounds_text(const nlohmann::json& report) {
  std::ostringstream os;
  auto line = [&](const std::string& key, const nlohmann::json& v) {
    os << "  " << key;
    for (std::size_t pad = key.size(); pad < 44; ++pad) os << ' ';
    if (v.is_number_float()) {
      os << format_field(v.get<double>());
    } else {
      os << v.dump();
    }
    os << "\n";
  };
  os << "certificates\n";
  for (const auto& [key, v] : report.items()) {
    if (v.is_array()) continue;
    line(key, v);
  }
  for (const char* list : {"tails", "selection_sample_sizes"}) {
    if (!report.contains(list)) continue;
    os << list << "\n";
    for (const auto& row : report.at(list)) {
      for (const auto& [key, v] : row.items()) line(key, v);
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace aggfw
