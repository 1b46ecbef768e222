#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "aggfw/aggregate.hpp"

namespace aggfw {

// Opaque decision token of one agent. Its meaning belongs to the problem
// instance; for finite decision universes it is the index into the agent's
// decision list, and a smaller index wins ties in best responses.
struct Decision {
  std::uint32_t index = 0;
  friend auto operator<=>(const Decision&, const Decision&) = default;
};

// One decision per agent, x = (x_1, ..., x_N).
using DecisionProfile = std::vector<Decision>;

// An aggregative problem  min_x f(G(x)),  G(x) = (1/N) sum_i g_i(x_i),  with
// f(y) = sum_j f_j(y_j) additive over the blocks of the aggregate space.
//
// Implementations are immutable after construction and every member must be
// safe to call concurrently.
class ProblemInstance {
 public:
  virtual ~ProblemInstance() = default;

  virtual std::size_t num_agents() const = 0;
  virtual const std::shared_ptr<const BlockLayout>& layout() const = 0;
  std::size_t num_blocks() const { return layout()->num_blocks(); }

  virtual bool is_valid(std::size_t agent, Decision d) const = 0;
  // Size of agent's decision universe when it is finite; the decisions are
  // then Decision{0} .. Decision{size - 1}.
  virtual std::optional<std::size_t> universe_size(std::size_t agent) const {
    (void)agent;
    return std::nullopt;
  }

  // acc += scale * g_i(d). Contributions carry no 1/N factor.
  virtual void add_contribution(std::size_t agent, Decision d, double scale,
                                Aggregate& acc) const = 0;

  // f_j(y_j) and grad f_j(y_j).
  virtual double f_block(std::size_t j, std::span<const double> yj) const = 0;
  virtual void f_grad_block(std::size_t j, std::span<const double> yj,
                            std::span<double> out) const = 0;

  // A minimizer of <grad, g_i(.)> over agent i's decisions (the map S_i).
  virtual Decision best_response(std::size_t agent,
                                 const Aggregate& grad) const = 0;

  // L_j: Lipschitz modulus of f_j on conv(S_j).
  virtual double lipschitz(std::size_t j) const = 0;
  // L~_j: Lipschitz modulus of grad f_j on conv(S_j).
  virtual double grad_lipschitz(std::size_t j) const = 0;
  // d_ij: diameter of the range of g_ij.
  virtual double diameter(std::size_t agent, std::size_t j) const = 0;

  Aggregate zero_aggregate() const { return Aggregate(layout()); }
};

Aggregate contribution(const ProblemInstance& p, std::size_t agent,
                       Decision d);

// f(y). Throws NumericalError naming the first block with a non-finite value.
double f_value(const ProblemInstance& p, const Aggregate& y);
Aggregate f_grad(const ProblemInstance& p, const Aggregate& y);

// Throws ConfigError naming the first invalid agent.
void validate_profile(const ProblemInstance& p, const DecisionProfile& x);

// G(x) = (1/N) sum_i g_i(x_i).
Aggregate aggregate_of(const ProblemInstance& p, const DecisionProfile& x);

// J(x) = f(G(x)).
double objective(const ProblemInstance& p, const DecisionProfile& x);

struct LinearizedResponse {
  DecisionProfile decisions;  // x-bar
  Aggregate aggregate;        // y-bar = G(x-bar)
};

// Step 1 of both Frank-Wolfe variants: one gradient at y, then the N
// independent agent problems (fanned out over `threads` workers).
LinearizedResponse linearized_best_response(const ProblemInstance& p,
                                            const Aggregate& y,
                                            unsigned threads = 1);

// Best responses of the listed agents only; entries of other agents are
// left as Decision{}.
DecisionProfile best_responses_for(const ProblemInstance& p,
                                   const Aggregate& grad,
                                   std::span<const std::size_t> agents,
                                   unsigned threads = 1);

}  // namespace aggfw
