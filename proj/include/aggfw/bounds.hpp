#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aggfw/measures.hpp"
#include "aggfw/problem.hpp"

namespace aggfw {

class SamplingSchedule;

// Closed-form constants of an instance.
//   C0  = sum_j L_j max_i d_ij
//   C1  = (1/N) sum_j L~_j sum_i d_ij^2
//   D_i = sum_j L~_j d_ij^2          (so sum_i D_i = N C1)
struct ProblemConstants {
  std::size_t num_agents = 0;
  std::size_t num_blocks = 0;
  std::size_t q = 0;  // total aggregate dimension
  double c0 = 0.0;
  double c1 = 0.0;
  std::vector<double> agent_d;         // D_i
  std::vector<double> lipschitz;       // L_j
  std::vector<double> grad_lipschitz;  // L~_j
  std::vector<double> diameters;       // d_ij, N x M row-major

  double diameter(std::size_t i, std::size_t j) const {
    return diameters[i * num_blocks + j];
  }
};

// Throws ConfigError when the instance reports a negative constant.
ProblemConstants compute_constants(const ProblemInstance& p);

// D[k]: the sum of the k largest D_i. Throws ConfigError unless 1 <= k <= N.
double d_of_k(const ProblemConstants& c, std::size_t k);

// C1 / (2N).
double gap_bound_basic(const ProblemConstants& c);
// D[min(q, N)] / (2 N^2).
double gap_bound_refined(const ProblemConstants& c);

// P[J(X) >= Jrelaxed(mu) + C1/(2N) + eps] <= exp(-2 N eps^2 / C0^2).
double mcdiarmid_tail(std::size_t n, double eps, double c0);
// Variance form: exp(-N eps^2 / (2 (N sum_v2 + C0 eps / 3))).
double mcdiarmid_variance_tail(std::size_t n, double eps, double sum_v2,
                               double c0);
// sum_i v_i^2 with v_i^2 = (2 / N^2) (sum_j L_j^2) sigma^2_{mu_i}[g_i].
double variance_proxy(const ProblemInstance& p, const ProblemConstants& c,
                      const MeasureProfile& mu);

// Concentration constants of the SFW iterate after K steps:
//   v_K = 2 C0^2 / (K^2 (K+1)^2) sum_{k=1}^{K-1} k (k+1)^2 / n_k
//   m_K = C0 / (K (K+1)) max_{k=1..K-1} (k+1)(k+2) / n_k
struct SfwTailConstants {
  double v = 0.0;
  double m = 0.0;
};
SfwTailConstants sfw_tail_constants(std::size_t big_k, double c0,
                                    const SamplingSchedule& schedule,
                                    std::size_t num_agents);
// P[gamma_K >= 4 C1 / K + eps] <= exp(-eps^2 N / (2 (v_K + eps m_K / 3))).
double sfw_tail(double eps, std::size_t num_agents,
                const SfwTailConstants& tc);
// E[gamma_K] <= 4 C1 / K.
double sfw_expectation_bound(std::size_t big_k, double c1);
// Var[gamma_K] <= 16 C1^2 / K^2 + v_K / N.
double sfw_variance_bound(std::size_t big_k, double c1,
                          const SfwTailConstants& tc, std::size_t num_agents);
// Success probability 1 - exp(-A / 12) of the event gamma_K < (4 C1 + C0)/K
// under the quadratic schedule with constant A.
double quadratic_schedule_confidence(double a);
// Expected draw count bound (1 - exp(-4N / (k+2)^3))^-2 of the stopping-time
// variant at iteration k.
double stopping_time_draw_bound(std::size_t k, std::size_t num_agents);

// FW iterate gap bound 2 C1 / k.
double fw_gap_bound(std::size_t k, double c1);

// Smallest n with n >= (2 C0^2 / C1^2) (k^2 / N) ln(1/zeta), at least 1.
// Throws ConfigError unless 1 <= k <= N and 0 < zeta < 1.
std::size_t sample_size_for_confidence(std::size_t k, std::size_t num_agents,
                                       double zeta, double c0, double c1);

// Grid lower bound of the nonconvexity measure rho(K) of a finite point set
// K in R^q (q <= 3, |K| <= 64). See bounds.cpp for the construction.
// `points` holds |K| rows of length `dim`. Throws ConfigError beyond the
// supported scale.
double nonconvexity_measure(std::span<const double> points, std::size_t dim,
                            std::size_t resolution);

}  // namespace aggfw
