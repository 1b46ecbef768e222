#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "json.hpp"

#include "aggfw/measures.hpp"
#include "aggfw/problem.hpp"

namespace aggfw {

// Mixed-integer least-squares benchmark
//
//   min_{x in {0,1}^N}  J(x) = ||A x - ybar||^2 / N^2
//
// written as an aggregative problem with M scalar blocks:
// g_ij(x_i) = A_ji x_i and f_j(y_j) = (y_j - ybar_j / N)^2.
// Decision{0} is x_i = 0 and Decision{1} is x_i = 1.
class MiqpInstance final : public ProblemInstance {
 public:
  // a is M x N, row-major.
  MiqpInstance(std::size_t m, std::size_t n, std::vector<double> a,
               std::vector<double> ybar, std::uint64_t seed = 0);

  // A_ji ~ U[0, 1] and ybar_j ~ U[0, N/2], i.i.d., from the instance stream
  // of the counter-based generator keyed by `seed`.
  static MiqpInstance generate(std::size_t m, std::size_t n,
                               std::uint64_t seed);

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  double a(std::size_t j, std::size_t i) const { return a_[j * n_ + i]; }
  const std::vector<double>& a_row_major() const { return a_; }
  const std::vector<double>& ybar() const { return ybar_; }

  // ||A x - ybar||^2 / N^2 for a continuous x in [0,1]^N. On binary x this
  // is J; on x = per-agent means of a measure profile it is the relaxed
  // criterion, since g is linear.
  double relaxed_value(std::span<const double> x) const;

  std::size_t num_agents() const override { return n_; }
  const std::shared_ptr<const BlockLayout>& layout() const override {
    return layout_;
  }
  bool is_valid(std::size_t agent, Decision d) const override;
  std::optional<std::size_t> universe_size(std::size_t) const override {
    return 2;
  }
  void add_contribution(std::size_t agent, Decision d, double scale,
                        Aggregate& acc) const override;
  double f_block(std::size_t j, std::span<const double> yj) const override;
  void f_grad_block(std::size_t j, std::span<const double> yj,
                    std::span<double> out) const override;
  Decision best_response(std::size_t agent,
                         const Aggregate& grad) const override;
  double lipschitz(std::size_t j) const override { return lipschitz_[j]; }
  double grad_lipschitz(std::size_t) const override { return 2.0; }
  double diameter(std::size_t agent, std::size_t j) const override;

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<double> a_;
  std::vector<double> ybar_;
  std::uint64_t seed_;
  std::shared_ptr<const BlockLayout> layout_;
  std::vector<double> lipschitz_;
};

// 1 iff sum_j grad_j A_ji < 0; ties go to 0.
Decision miqp_best_response(const MiqpInstance& inst, std::size_t agent,
                            const Aggregate& grad);

// JSON document {M, N, seed, A (row-major), ybar}.
nlohmann::json to_json(const MiqpInstance& inst);
MiqpInstance miqp_from_json(const nlohmann::json& doc);
void save_instance(const MiqpInstance& inst, const std::filesystem::path& path);
MiqpInstance load_instance(const std::filesystem::path& path);

struct RelaxedOptimum {
  std::vector<double> x;  // minimizer over [0,1]^N
  Aggregate y;            // A x / N
  double value = 0.0;     // relaxed optimal value
  double residual = 0.0;  // gradient-mapping norm at x
  std::size_t iterations = 0;
};

// Minimizes ||A x - ybar||^2 / N^2 over the box [0,1]^N by accelerated
// projected gradient (step 1/L, L = 2 ||A||_1 ||A||_inf / N^2 >= the
// Hessian norm, adaptive restart) until the gradient-mapping norm is at most
// tol. Throws NumericalError when max_iterations is reached first.
RelaxedOptimum reference_relaxed_optimum(const MiqpInstance& inst,
                                         double tol = 1e-9,
                                         std::size_t max_iterations = 5000000);

// mu_i = (1 - x_i) delta_0 + x_i delta_1, the measure profile whose mean
// aggregate is A x / N. Entries of x are clamped to [0, 1].
MeasureProfile bernoulli_profile(std::span<const double> x);

}  // namespace aggfw
