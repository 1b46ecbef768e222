#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aggfw/bounds.hpp"
#include "aggfw/frank_wolfe.hpp"
#include "aggfw/problem.hpp"
#include "aggfw/random.hpp"
#include "aggfw/schedule.hpp"

namespace aggfw {

// One SFW iteration as seen from outside. `value` is J(x^k); beta is NaN
// when the full set of best responses was not needed to take the step.
struct SfwRecord {
  std::size_t k = 0;
  double value = 0.0;
  double beta = 0.0;
  double omega = 0.0;
  std::size_t n_k = 0;           // candidates drawn
  std::size_t active_count = 0;  // |I_k|
  bool accepted = false;         // x^{k+1} != x^k
  bool draws_exhausted = false;  // stopping-time variant hit max_draws
  double wall_ms = 0.0;
};

struct SfwStepOptions {
  // Keep x^k when no candidate improves on it.
  bool keep_if_worse = true;
  // Solve the agent problems of the active set I_k only.
  bool active_set = true;
  unsigned threads = 1;
};

struct SfwStepResult {
  DecisionProfile next;
  SfwRecord record;
};

// One SFW step from x with step omega and n_k candidates. The mixing
// variable of agent i in candidate j is rng.bernoulli(omega, k, j, i), so
// candidates only depend on (seed, k, j, i).
// Throws ConfigError for omega outside [0, 1] or n_k == 0.
SfwStepResult sfw_step(const ProblemInstance& p, const DecisionProfile& x,
                       std::size_t k, double omega, std::size_t n_k,
                       const CounterRng& rng,
                       const SfwStepOptions& options = {});

struct StoppingStepResult {
  DecisionProfile next;
  std::size_t draws = 0;
  bool exhausted = false;
  double value = 0.0;      // J(next)
  double threshold = 0.0;  // acceptance level
  std::size_t active_count = 0;
};

// Stopping-time variant: candidates are drawn one at a time until
//   J(candidate) <= f((1 - omega) y^k + omega ybar^k) + (C1/2 + C0) omega^2.
// After max_draws without success the best candidate seen is returned and
// the result is flagged.
StoppingStepResult stopping_time_step(const ProblemInstance& p,
                                      const DecisionProfile& x, std::size_t k,
                                      double omega, const CounterRng& rng,
                                      std::size_t max_draws,
                                      const ProblemConstants& constants,
                                      unsigned threads = 1);

// Default draw cap of the stopping-time variant at iteration k:
// 10 ceil(E[n_k] bound), capped at 100000.
std::size_t default_max_draws(std::size_t k, std::size_t num_agents);

struct SfwConfig {
  std::size_t iterations = 100;  // K
  StepRule rule = StepRule::kCanonical;  // kCanonical or kLineSearchSfw
  SamplingSchedule schedule = SamplingSchedule::constant(1);
  std::uint64_t seed = 0;
  bool keep_if_worse = true;
  bool stopping_time = false;
  std::optional<std::size_t> max_draws;  // stopping-time cap override
  bool active_set = true;
  unsigned threads = 1;
  std::optional<DecisionProfile> start;
};

struct SfwResult {
  DecisionProfile decisions;      // x^K
  std::vector<SfwRecord> records;  // k = 0..K; the last one has no step
  std::vector<std::string> warnings;
};

// Throws ConfigError for inconsistent settings (a line-search rule other
// than ls-sfw, or the stopping-time variant with a non-canonical rule).
// K > 2N runs but adds a warning.
SfwResult sfw_run(const ProblemInstance& p, const SfwConfig& config);

}  // namespace aggfw
