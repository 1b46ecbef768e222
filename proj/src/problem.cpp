#include "aggfw/problem.hpp"

#include <cmath>
#include <string>

#include "aggfw/errors.hpp"
#include "aggfw/parallel.hpp"

namespace aggfw {

Aggregate contribution(const ProblemInstance& p, std::size_t agent,
                       Decision d) {
  Aggregate out = p.zero_aggregate();
  p.add_contribution(agent, d, 1.0, out);
  return out;
}

double f_value(const ProblemInstance& p, const Aggregate& y) {
  double total = 0.0;
  for (std::size_t j = 0; j < y.num_blocks(); ++j) {
    const double v = p.f_block(j, y.block(j));
    if (!std::isfinite(v)) {
      throw NumericalError("non-finite objective value in block " +
                           std::to_string(j));
    }
    total += v;
  }
  return total;
}

Aggregate f_grad(const ProblemInstance& p, const Aggregate& y) {
  Aggregate grad(y.shared_layout());
  for (std::size_t j = 0; j < y.num_blocks(); ++j) {
    p.f_grad_block(j, y.block(j), grad.block(j));
  }
  if (!grad.all_finite()) throw NumericalError("non-finite gradient");
  return grad;
}

void validate_profile(const ProblemInstance& p, const DecisionProfile& x) {
  if (x.size() != p.num_agents()) {
    throw ConfigError("decision profile has " + std::to_string(x.size()) +
                      " entries, expected " + std::to_string(p.num_agents()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!p.is_valid(i, x[i])) {
      throw ConfigError("invalid decision " + std::to_string(x[i].index) +
                        " for agent " + std::to_string(i));
    }
  }
}

Aggregate aggregate_of(const ProblemInstance& p, const DecisionProfile& x) {
  validate_profile(p, x);
  Aggregate y = p.zero_aggregate();
  const double inv_n = 1.0 / static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    p.add_contribution(i, x[i], inv_n, y);
  }
  return y;
}

double objective(const ProblemInstance& p, const DecisionProfile& x) {
  return f_value(p, aggregate_of(p, x));
}

LinearizedResponse linearized_best_response(const ProblemInstance& p,
                                            const Aggregate& y,
                                            unsigned threads) {
  const Aggregate grad = f_grad(p, y);
  DecisionProfile xbar(p.num_agents());
  parallel_for(xbar.size(), threads,
               [&](std::size_t i) { xbar[i] = p.best_response(i, grad); });
  Aggregate ybar = aggregate_of(p, xbar);
  return {std::move(xbar), std::move(ybar)};
}

DecisionProfile best_responses_for(const ProblemInstance& p,
                                   const Aggregate& grad,
                                   std::span<const std::size_t> agents,
                                   unsigned threads) {
  DecisionProfile out(p.num_agents());
  parallel_for(agents.size(), threads, [&](std::size_t t) {
    out[agents[t]] = p.best_response(agents[t], grad);
  });
  return out;
}

}  // namespace aggfw
