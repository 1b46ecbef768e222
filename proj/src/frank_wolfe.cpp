#include "aggfw/frank_wolfe.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "aggfw/bounds.hpp"
#include "aggfw/errors.hpp"

namespace aggfw {

StepRule parse_step_rule(const std::string& text) {
  if (text == "canonical") return StepRule::kCanonical;
  if (text == "ls-fw") return StepRule::kLineSearchFw;
  if (text == "ls-sfw") return StepRule::kLineSearchSfw;
  throw ConfigError("unknown step rule '" + text +
                    "' (expected canonical, ls-fw or ls-sfw)");
}

std::string to_string(StepRule rule) {
  switch (rule) {
    case StepRule::kCanonical:
      return "canonical";
    case StepRule::kLineSearchFw:
      return "ls-fw";
    case StepRule::kLineSearchSfw:
      return "ls-sfw";
  }
  return "?";
}

double step_size(StepRule rule, const StepInputs& in) {
  switch (rule) {
    case StepRule::kCanonical:
      return 2.0 / (static_cast<double>(in.k) + 2.0);
    case StepRule::kLineSearchFw:
      if (!(in.curvature > 0.0)) return 0.0;
      return std::clamp(in.beta / in.curvature, 0.0, 1.0);
    case StepRule::kLineSearchSfw: {
      const double n = static_cast<double>(in.num_agents);
      const double shifted = in.beta - in.c1 / (2.0 * n);
      const double denom = in.c1 * (1.0 - 1.0 / n);
      if (!(denom > 0.0)) return shifted > 0.0 ? 1.0 : 0.0;
      return std::clamp(shifted / denom, 0.0, 1.0);
    }
  }
  return 0.0;
}

double dual_gap_beta(const ProblemInstance& p, const Aggregate& y,
                     const Aggregate& ybar) {
  const Aggregate grad = f_grad(p, y);
  Aggregate diff = y;
  diff -= ybar;
  const double beta = dot(grad, diff);
  if (!std::isfinite(beta)) throw NumericalError("non-finite dual gap");
  if (beta < -1e-9) {
    throw NumericalError("negative dual gap " + std::to_string(beta) +
                         ": best-response oracle is not optimal");
  }
  return beta;
}

double curvature_constant(const ProblemInstance& p, const Aggregate& y,
                          const Aggregate& ybar) {
  double ck = 0.0;
  for (std::size_t j = 0; j < y.num_blocks(); ++j) {
    ck += p.grad_lipschitz(j) * block_squared_distance(ybar, y, j);
  }
  return ck;
}

DecisionProfile default_start(const ProblemInstance& p) {
  const Aggregate zero = p.zero_aggregate();
  DecisionProfile x(p.num_agents());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = p.best_response(i, zero);
  return x;
}

FwResult fw_run(const ProblemInstance& p, const FwConfig& config,
                const FwObserver& observer) {
  using Clock = std::chrono::steady_clock;
  if (config.iterations == 0) {
    throw ConfigError("Frank-Wolfe needs at least one iteration");
  }
  const DecisionProfile start =
      config.start ? *config.start : default_start(p);
  validate_profile(p, start);

  const double c1 = config.rule == StepRule::kLineSearchSfw
                        ? compute_constants(p).c1
                        : 0.0;
  MeasureProfile mu = MeasureProfile::dirac(start);
  std::vector<FwRecord> records;
  records.reserve(config.iterations + 1);
  const auto t0 = Clock::now();

  for (std::size_t k = 0;; ++k) {
    const Aggregate y = mean_aggregate(p, mu);
    const double value = f_value(p, y);
    const LinearizedResponse br =
        linearized_best_response(p, y, config.threads);
    const double beta = dual_gap_beta(p, y, br.aggregate);

    FwRecord rec;
    rec.k = k;
    rec.objective = value;
    rec.beta = beta;
    rec.support_sizes = mu.support_sizes();
    if (k == config.iterations) {
      rec.omega = std::numeric_limits<double>::quiet_NaN();
    } else {
      StepInputs in;
      in.k = k;
      in.beta = beta;
      in.curvature = curvature_constant(p, y, br.aggregate);
      in.c1 = c1;
      in.num_agents = p.num_agents();
      rec.omega = step_size(config.rule, in);
    }
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    if (observer) observer(rec);
    const double omega = rec.omega;
    records.push_back(std::move(rec));
    if (k == config.iterations) break;

    mu = mix(mu, MeasureProfile::dirac(br.decisions), omega,
             config.prune_threshold);
  }
  return {std::move(mu), std::move(records)};
}

FwSelectionResult fw_with_selection(const ProblemInstance& p,
                                    const FwConfig& config, std::size_t draws,
                                    double zeta) {
  FwResult run = fw_run(p, config);
  const CounterRng rng(config.seed, Stream::kSelection);
  SelectionResult sel = select_best(p, run.measures, draws, rng,
                                    static_cast<std::uint32_t>(
                                        config.iterations));
  FwSelectionResult out{std::move(sel.decisions), sel.value, std::move(run),
                        std::nullopt};
  if (config.iterations <= p.num_agents()) {
    const ProblemConstants c = compute_constants(p);
    if (c.c1 > 0.0) {
      out.recommended_draws = sample_size_for_confidence(
          config.iterations, p.num_agents(), zeta, c.c0, c.c1);
    }
  }
  return out;
}

}  // namespace aggfw
