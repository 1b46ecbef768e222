#include "aggfw/schedule.hpp"

#include <cmath>
#include <sstream>

#include "aggfw/errors.hpp"

namespace aggfw {

SamplingSchedule SamplingSchedule::constant(std::size_t n) {
  if (n == 0) throw ConfigError("constant schedule needs n >= 1");
  return {Kind::kConstant, n, 0.0};
}

SamplingSchedule SamplingSchedule::quadratic(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw ConfigError("quadratic schedule needs A > 0");
  }
  return {Kind::kQuadratic, 0, a};
}

SamplingSchedule SamplingSchedule::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("schedule must be const:<n> or quad:<A>, got '" + text +
                      "'");
  }
  const std::string kind = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  try {
    std::size_t used = 0;
    if (kind == "const") {
      const long long n = std::stoll(arg, &used);
      if (used == arg.size() && n >= 1) {
        return constant(static_cast<std::size_t>(n));
      }
    } else if (kind == "quad") {
      const double a = std::stod(arg, &used);
      if (used == arg.size()) return quadratic(a);
    }
  } catch (const std::logic_error&) {
    // fall through to the error below
  }
  throw ConfigError("invalid schedule '" + text + "'");
}

std::size_t SamplingSchedule::count(std::size_t k,
                                    std::size_t num_agents) const {
  if (kind_ == Kind::kConstant) return count_;
  const double kk = static_cast<double>(k);
  const double raw =
      std::ceil(factor_ * kk * kk / static_cast<double>(num_agents));
  return raw < 1.0 ? 1 : static_cast<std::size_t>(raw);
}

std::string SamplingSchedule::to_string() const {
  std::ostringstream os;
  if (kind_ == Kind::kConstant) {
    os << "const:" << count_;
  } else {
    os << "quad:" << factor_;
  }
  return os.str();
}

}  // namespace aggfw
