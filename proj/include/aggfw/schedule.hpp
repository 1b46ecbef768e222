#pragma once

#include <cstddef>
#include <string>

namespace aggfw {

// Number of SFW candidates n_k drawn at iteration k.
//   Constant(n):   n_k = n
//   Quadratic(A):  n_k = max(ceil(A k^2 / N), 1)
class SamplingSchedule {
 public:
  enum class Kind { kConstant, kQuadratic };

  static SamplingSchedule constant(std::size_t n);
  static SamplingSchedule quadratic(double a);
  // "const:<n>" or "quad:<A>". Throws ConfigError otherwise.
  static SamplingSchedule parse(const std::string& text);

  Kind kind() const { return kind_; }
  std::size_t constant_count() const { return count_; }
  double quadratic_factor() const { return factor_; }

  std::size_t count(std::size_t k, std::size_t num_agents) const;
  std::string to_string() const;

 private:
  SamplingSchedule(Kind kind, std::size_t count, double factor)
      : kind_(kind), count_(count), factor_(factor) {}

  Kind kind_;
  std::size_t count_;
  double factor_;
};

}  // namespace aggfw
