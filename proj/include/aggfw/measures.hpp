#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aggfw/problem.hpp"
#include "aggfw/random.hpp"

namespace aggfw {

// Atoms lighter than this are dropped after construction and mixing, and the
// remaining weights renormalized.
inline constexpr double kPruneThreshold = 1e-12;

struct Atom {
  double weight = 0.0;
  Decision decision;
};

// Finitely supported probability distribution over one agent's decisions.
// Invariants: weights are nonnegative, sum to one, are at least the prune
// threshold, and no decision appears twice.
class DiscreteMeasure {
 public:
  // Merges duplicate decisions (keeping first-occurrence order), prunes and
  // renormalizes. Throws ConfigError on negative or non-finite weights, or
  // when nothing survives pruning.
  DiscreteMeasure(std::size_t agent, std::vector<Atom> atoms,
                  double prune_threshold = kPruneThreshold);

  static DiscreteMeasure dirac(std::size_t agent, Decision d);

  std::size_t agent() const { return agent_; }
  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t support_size() const { return atoms_.size(); }
  // Weight of d, zero when d is not in the support.
  double weight_of(Decision d) const;

 private:
  std::size_t agent_;
  std::vector<Atom> atoms_;
};

// mu = (mu_1, ..., mu_N), measure i owned by agent i.
class MeasureProfile {
 public:
  explicit MeasureProfile(std::vector<DiscreteMeasure> measures);
  static MeasureProfile dirac(const DecisionProfile& x);

  std::size_t size() const { return measures_.size(); }
  const DiscreteMeasure& operator[](std::size_t i) const {
    return measures_[i];
  }
  std::span<const DiscreteMeasure> measures() const { return measures_; }
  std::vector<std::size_t> support_sizes() const;

 private:
  std::vector<DiscreteMeasure> measures_;
};

// Throws ConfigError when mu does not fit p (size, ownership, decisions).
void validate_measures(const ProblemInstance& p, const MeasureProfile& mu);

// E_{mu_i}[g_i].
Aggregate expected_contribution(const ProblemInstance& p,
                                const DiscreteMeasure& mu_i);

// y = (1/N) sum_i E_{mu_i}[g_i].
Aggregate mean_aggregate(const ProblemInstance& p, const MeasureProfile& mu);

// The relaxed criterion f((1/N) sum_i E_{mu_i}[g_i]).
double relaxed_objective(const ProblemInstance& p, const MeasureProfile& mu);

// (1 - omega) mu1 + omega mu2, agent by agent. Atoms of mu1 keep their
// order; new atoms of mu2 are appended. Throws ConfigError when omega is
// outside [0, 1] or the profiles differ in size.
MeasureProfile mix(const MeasureProfile& mu1, const MeasureProfile& mu2,
                   double omega, double prune_threshold = kPruneThreshold);

// sigma^2_{mu_i}[g_ij] = sum_atoms w ||g_ij(x) - E[g_ij]||^2.
double contribution_variance(const ProblemInstance& p,
                             const DiscreteMeasure& mu_i, std::size_t j);
// sum over blocks of contribution_variance.
double total_contribution_variance(const ProblemInstance& p,
                                   const DiscreteMeasure& mu_i);

// One independent draw per agent by inverse CDF over the stored atom order.
// The draw of agent i uses the key (epoch, draw, i) of `rng`.
DecisionProfile sample_profile(const MeasureProfile& mu, const CounterRng& rng,
                               std::uint32_t epoch = 0,
                               std::uint32_t draw = 0);

struct SelectionResult {
  DecisionProfile decisions;
  double value = 0.0;
  std::size_t draw_index = 0;  // first draw attaining the minimum
};

// The selection method: n independent profiles from mu, keep the one with
// the smallest J (first occurrence on ties). Throws ConfigError for n == 0.
SelectionResult select_best(const ProblemInstance& p, const MeasureProfile& mu,
                            std::size_t n, const CounterRng& rng,
                            std::uint32_t epoch = 0);

}  // namespace aggfw
