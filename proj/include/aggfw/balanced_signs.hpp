#pragma once

#include <cstddef>
#include <memory>

#include "aggfw/problem.hpp"

namespace aggfw {

// J(x) = -(1/N) sum_i x_i^2 + ((1/N) sum_i x_i)^2 over x_i in {-1, +1}.
// Block 0 carries x_i^2, block 1 carries x_i, f(y) = -y_0 + y_1^2.
// Decision{0} is -1 and Decision{1} is +1. Minimizers are the profiles with
// as many +1 as -1 (J = -1 for even N); the relaxed value is -1 for all N.
class BalancedSignsInstance final : public ProblemInstance {
 public:
  explicit BalancedSignsInstance(std::size_t n);

  static double sign_of(Decision d) { return d.index == 0 ? -1.0 : 1.0; }
  // Exact relaxed optimum: y_0 <= 1 and y_1^2 >= 0, both attained by
  // mu_i = (delta_{-1} + delta_{+1}) / 2.
  static constexpr double relaxed_optimum() { return -1.0; }

  std::size_t num_agents() const override { return n_; }
  const std::shared_ptr<const BlockLayout>& layout() const override {
    return layout_;
  }
  bool is_valid(std::size_t agent, Decision d) const override {
    return agent < n_ && d.index <= 1;
  }
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
  double lipschitz(std::size_t j) const override { return j == 0 ? 1.0 : 2.0; }
  double grad_lipschitz(std::size_t j) const override {
    return j == 0 ? 0.0 : 2.0;
  }
  double diameter(std::size_t, std::size_t j) const override {
    return j == 0 ? 0.0 : 2.0;
  }

 private:
  std::size_t n_;
  std::shared_ptr<const BlockLayout> layout_;
};

}  // namespace aggfw
