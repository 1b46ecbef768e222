#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "aggfw/problem.hpp"

namespace aggfw::testkit {

inline constexpr std::uint64_t kMaxEnumeration = std::uint64_t{1} << 20;

struct BruteForceResult {
  double value = 0.0;                     // J*
  std::vector<DecisionProfile> optimizers;  // in enumeration order
  std::uint64_t count = 0;                // profiles evaluated
};

// Exhaustive min of J over the product of the agents' finite universes.
// Profiles are enumerated in mixed-radix order with agent 0 fastest; a
// profile is listed as an optimizer when its value is within tie_tol of the
// minimum. Throws ConfigError when a universe is infinite or the product
// exceeds kMaxEnumeration.
BruteForceResult brute_force_optimum(const ProblemInstance& p,
                                     double tie_tol = 1e-12);

// Checks the recursion
//   gamma_{k+1} <= (1 - w_k) gamma_k + C w_k^2 + u_k,   w_k = 2/(k+2),
// and then the closed-form consequence, for every k >= 1,
//   gamma_k <= 4C/k + sum_{k'<k} (k'+1)(k'+2)/(k(k+1)) u_{k'}.
struct RecursionReport {
  std::optional<std::size_t> hypothesis_violation;  // first bad index k+1
  std::optional<std::size_t> bound_violation;       // first bad k
  double worst_slack = 0.0;  // min over k of (bound - gamma_k)

  bool hypothesis_ok() const { return !hypothesis_violation; }
  bool passed() const { return !hypothesis_violation && !bound_violation; }
};

// u needs at least gamma.size() - 1 entries. Comparisons allow a relative
// rounding slack of tol. Throws ConfigError on C < 0, non-finite entries or
// a short u.
RecursionReport check_recursion_bound(double c, std::span<const double> u,
                                      std::span<const double> gamma,
                                      double tol = 1e-9);

// Monte Carlo check of the Bernoulli increment bound. B ~ Bern(omega) is
// independent of (A, C) and U = E[F | A, B] - E[F | A], which for A = a is
// (b - omega)(m1(a) - m0(a)) with m_b(a) = E_C[F(a, b, C)].
struct BernoulliMcOptions {
  std::size_t outer = 200;    // samples of A
  std::size_t inner = 500;    // samples of C per A
  std::size_t b_draws = 50;   // samples of B per A
  std::uint64_t seed = 0;
};

struct BernoulliIncrementReport {
  double mean_u = 0.0;
  double stderr_u = 0.0;
  double max_u = 0.0;
  double mean_u2 = 0.0;
  double stderr_u2 = 0.0;
  double u2_bound = 0.0;       // omega (1 - omega) delta^2
  bool precondition_ok = true;  // |F(a,1,c) - F(a,0,c)| <= delta on samples
  bool mean_ok = false;
  bool max_ok = false;
  bool second_moment_ok = false;

  bool passed() const {
    return precondition_ok && mean_ok && max_ok && second_moment_ok;
  }
};

using IncrementFunction = std::function<double(double a, int b, double c)>;
// Maps a uniform draw in [0, 1) to a sample of A or C.
using Sampler = std::function<double(double u)>;

BernoulliIncrementReport mc_check_bernoulli_increment(
    double omega, double delta, const IncrementFunction& f,
    const Sampler& sample_a, const Sampler& sample_c,
    const BernoulliMcOptions& options = {});

}  // namespace aggfw::testkit
