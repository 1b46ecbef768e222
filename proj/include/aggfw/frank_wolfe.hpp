#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aggfw/measures.hpp"
#include "aggfw/problem.hpp"

namespace aggfw {

// Step-size rules.
//   kCanonical      omega_k = 2 / (k + 2)
//   kLineSearchFw   omega_k = min(beta_k / C_k, 1),
//                   C_k = sum_j L~_j ||ybar_j - y_j||^2
//   kLineSearchSfw  omega_k = clamp((beta_k - C1/(2N)) / (C1 (1 - 1/N)), 0, 1)
enum class StepRule { kCanonical, kLineSearchFw, kLineSearchSfw };

// "canonical", "ls-fw" or "ls-sfw"; throws ConfigError otherwise.
StepRule parse_step_rule(const std::string& text);
std::string to_string(StepRule rule);

struct StepInputs {
  std::size_t k = 0;
  double beta = 0.0;
  double curvature = 0.0;  // C_k, used by kLineSearchFw
  double c1 = 0.0;         // used by kLineSearchSfw
  std::size_t num_agents = 1;
};

// Always in [0, 1]. A zero curvature in kLineSearchFw means ybar = y and
// yields 0; with N = 1 kLineSearchSfw has no curvature term and takes a full
// step whenever beta exceeds C1/2.
double step_size(StepRule rule, const StepInputs& in);

// beta = <grad f(y), y - ybar>. Throws NumericalError below -1e-9, which only
// happens when ybar is not a best response at y.
double dual_gap_beta(const ProblemInstance& p, const Aggregate& y,
                     const Aggregate& ybar);

// C_k = sum_j L~_j ||ybar_j - y_j||^2.
double curvature_constant(const ProblemInstance& p, const Aggregate& y,
                          const Aggregate& ybar);

// Dirac-at-best-response-to-zero-gradient starting profile.
DecisionProfile default_start(const ProblemInstance& p);

struct FwConfig {
  std::size_t iterations = 100;  // K >= 1
  StepRule rule = StepRule::kCanonical;
  std::uint64_t seed = 0;        // used by the selection step only
  std::optional<DecisionProfile> start;
  unsigned threads = 1;
  double prune_threshold = kPruneThreshold;
};

// Iteration k: the relaxed value of mu^k, beta_k and the step omega_k taken
// to reach mu^{k+1}. The last record (k = K) has no step; omega is NaN.
struct FwRecord {
  std::size_t k = 0;
  double objective = 0.0;
  double beta = 0.0;
  double omega = 0.0;
  std::vector<std::size_t> support_sizes;
  double wall_ms = 0.0;
};

struct FwResult {
  MeasureProfile measures;
  std::vector<FwRecord> records;  // K + 1 entries
};

using FwObserver = std::function<void(const FwRecord&)>;

// Frank-Wolfe on the relaxed problem. Throws ConfigError for K = 0 or an
// invalid start, NumericalError on non-finite values or a broken oracle.
FwResult fw_run(const ProblemInstance& p, const FwConfig& config,
                const FwObserver& observer = {});

struct FwSelectionResult {
  DecisionProfile decisions;
  double value = 0.0;
  FwResult run;
  // Draw count that guarantees J < J* + 3 C1 / K with probability
  // 1 - zeta, when K <= N.
  std::optional<std::size_t> recommended_draws;
};

// fw_run followed by the selection method with n draws on the final profile.
FwSelectionResult fw_with_selection(const ProblemInstance& p,
                                    const FwConfig& config, std::size_t draws,
                                    double zeta = 0.1);

}  // namespace aggfw
