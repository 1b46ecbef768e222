#include "aggfw/stochastic_fw.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "aggfw/errors.hpp"
#include "aggfw/parallel.hpp"

namespace aggfw {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_omega(double omega) {
  if (!(omega >= 0.0 && omega <= 1.0)) {
    throw ConfigError("step size " + std::to_string(omega) +
                      " outside [0, 1]");
  }
}

std::uint32_t key32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw ConfigError(std::string(what) + " exceeds the 32-bit key range");
  }
  return static_cast<std::uint32_t>(v);
}

// Per-agent aggregate shifts (g_i(xbar_i) - g_i(x_i)) / N for the agents
// whose best response differs from their current decision.
class DeltaTable {
 public:
  DeltaTable(const ProblemInstance& p, const DecisionProfile& x,
             const DecisionProfile& xbar, std::span<const std::size_t> agents)
      : slot_(p.num_agents(), -1) {
    const double inv_n = 1.0 / static_cast<double>(p.num_agents());
    for (std::size_t i : agents) {
      if (xbar[i] == x[i]) continue;
      Aggregate d = p.zero_aggregate();
      p.add_contribution(i, xbar[i], inv_n, d);
      p.add_contribution(i, x[i], -inv_n, d);
      slot_[i] = static_cast<int>(deltas_.size());
      deltas_.push_back(std::move(d));
    }
  }

  const Aggregate* find(std::size_t i) const {
    return slot_[i] < 0 ? nullptr : &deltas_[static_cast<std::size_t>(slot_[i])];
  }

  // f(y + sum of the flipped agents' shifts), or base_value when none of
  // them moves.
  double value(const ProblemInstance& p, const Aggregate& y, double base_value,
               std::span<const std::uint32_t> flipped) const {
    std::optional<Aggregate> cand;
    for (std::uint32_t i : flipped) {
      const Aggregate* d = find(i);
      if (d == nullptr) continue;
      if (!cand) cand.emplace(y);
      *cand += *d;
    }
    return cand ? f_value(p, *cand) : base_value;
  }

 private:
  std::vector<int> slot_;
  std::vector<Aggregate> deltas_;
};

std::vector<std::uint32_t> draw_flips(const CounterRng& rng, double omega,
                                      std::uint32_t k, std::uint32_t j,
                                      std::uint32_t n) {
  std::vector<std::uint32_t> out;
  rng.for_each_bernoulli(omega, k, j, n,
                         [&](std::uint32_t i) { out.push_back(i); });
  return out;
}

DecisionProfile apply_flips(const DecisionProfile& x,
                            const DecisionProfile& xbar,
                            std::span<const std::uint32_t> flipped) {
  DecisionProfile next = x;
  for (std::uint32_t i : flipped) next[i] = xbar[i];
  return next;
}

// Shared by sfw_step and sfw_run: `full` holds every agent's best response
// when the caller already computed them.
SfwStepResult step_impl(const ProblemInstance& p, const DecisionProfile& x,
                        const Aggregate& y, double value, std::size_t k,
                        double omega, std::size_t n_k, const CounterRng& rng,
                        const SfwStepOptions& options,
                        const DecisionProfile* full) {
  check_omega(omega);
  if (n_k == 0) throw ConfigError("SFW needs at least one candidate");
  const std::size_t n = p.num_agents();
  const std::uint32_t kk = key32(k, "iteration index");
  const std::uint32_t nn = key32(n, "agent count");
  key32(n_k, "candidate count");

  std::vector<std::vector<std::uint32_t>> flips(n_k);
  std::vector<char> active(n, 0);
  for (std::size_t j = 0; j < n_k; ++j) {
    flips[j] = draw_flips(rng, omega, kk, static_cast<std::uint32_t>(j), nn);
    for (std::uint32_t i : flips[j]) active[i] = 1;
  }
  std::vector<std::size_t> active_set;
  for (std::size_t i = 0; i < n; ++i) {
    if (active[i]) active_set.push_back(i);
  }

  DecisionProfile xbar;
  if (full != nullptr) {
    xbar = *full;
  } else if (options.active_set) {
    xbar = best_responses_for(p, f_grad(p, y), active_set, options.threads);
  } else {
    xbar = linearized_best_response(p, y, options.threads).decisions;
  }

  const DeltaTable table(p, x, xbar, active_set);
  std::vector<double> values(n_k);
  parallel_for(n_k, options.threads, [&](std::size_t j) {
    values[j] = table.value(p, y, value, flips[j]);
  });
  const std::size_t best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());

  SfwStepResult out;
  out.record.k = k;
  out.record.value = value;
  out.record.beta = kNaN;
  out.record.omega = omega;
  out.record.n_k = n_k;
  out.record.active_count = active_set.size();
  if (options.keep_if_worse && values[best] >= value) {
    out.next = x;
  } else {
    out.next = apply_flips(x, xbar, flips[best]);
  }
  out.record.accepted = out.next != x;
  return out;
}

}  // namespace

SfwStepResult sfw_step(const ProblemInstance& p, const DecisionProfile& x,
                       std::size_t k, double omega, std::size_t n_k,
                       const CounterRng& rng, const SfwStepOptions& options) {
  validate_profile(p, x);
  const Aggregate y = aggregate_of(p, x);
  return step_impl(p, x, y, f_value(p, y), k, omega, n_k, rng, options,
                   nullptr);
}

namespace {

StoppingStepResult stopping_impl(const ProblemInstance& p,
                                 const DecisionProfile& x, const Aggregate& y,
                                 double value, const LinearizedResponse& br,
                                 std::size_t k, double omega,
                                 const CounterRng& rng, std::size_t max_draws,
                                 const ProblemConstants& c) {
  check_omega(omega);
  if (max_draws == 0) throw ConfigError("max_draws must be >= 1");
  const std::size_t n = p.num_agents();
  const std::uint32_t kk = key32(k, "iteration index");
  const std::uint32_t nn = key32(n, "agent count");
  key32(max_draws, "draw cap");

  std::vector<std::size_t> everyone(n);
  for (std::size_t i = 0; i < n; ++i) everyone[i] = i;
  const DeltaTable table(p, x, br.decisions, everyone);

  StoppingStepResult out;
  out.threshold = f_value(p, lerp(y, br.aggregate, omega)) +
                  (c.c1 / 2.0 + c.c0) * omega * omega;
  std::vector<char> active(n, 0);
  std::vector<std::uint32_t> best_flips;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < max_draws; ++j) {
    const auto flips =
        draw_flips(rng, omega, kk, static_cast<std::uint32_t>(j), nn);
    for (std::uint32_t i : flips) {
      if (!active[i]) {
        active[i] = 1;
        ++out.active_count;
      }
    }
    const double v = table.value(p, y, value, flips);
    out.draws = j + 1;
    if (v < best_value) {
      best_value = v;
      best_flips = flips;
    }
    if (v <= out.threshold) {
      out.next = apply_flips(x, br.decisions, flips);
      out.value = v;
      return out;
    }
  }
  out.exhausted = true;
  out.next = apply_flips(x, br.decisions, best_flips);
  out.value = best_value;
  return out;
}

}  // namespace

StoppingStepResult stopping_time_step(const ProblemInstance& p,
                                      const DecisionProfile& x, std::size_t k,
                                      double omega, const CounterRng& rng,
                                      std::size_t max_draws,
                                      const ProblemConstants& constants,
                                      unsigned threads) {
  validate_profile(p, x);
  const Aggregate y = aggregate_of(p, x);
  const LinearizedResponse br = linearized_best_response(p, y, threads);
  return stopping_impl(p, x, y, f_value(p, y), br, k, omega, rng, max_draws,
                       constants);
}

std::size_t default_max_draws(std::size_t k, std::size_t num_agents) {
  const double bound = stopping_time_draw_bound(k, num_agents);
  const double raw = 10.0 * std::ceil(bound);
  if (!std::isfinite(raw) || raw > 100000.0) return 100000;
  return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
}

SfwResult sfw_run(const ProblemInstance& p, const SfwConfig& config) {
  using Clock = std::chrono::steady_clock;
  if (config.rule == StepRule::kLineSearchFw) {
    throw ConfigError("rule ls-fw applies to the relaxed method only; use "
                      "canonical or ls-sfw");
  }
  if (config.stopping_time && config.rule != StepRule::kCanonical) {
    throw ConfigError("the stopping-time variant requires the canonical rule");
  }
  if (config.max_draws && *config.max_draws == 0) {
    throw ConfigError("max_draws must be >= 1");
  }
  const std::size_t n = p.num_agents();
  DecisionProfile x = config.start ? *config.start : default_start(p);
  validate_profile(p, x);

  SfwResult result;
  if (config.iterations > 2 * n) {
    result.warnings.push_back(
        "K = " + std::to_string(config.iterations) + " exceeds 2N = " +
        std::to_string(2 * n) + "; the O(1/K) term no longer dominates");
  }
  const bool need_constants =
      config.rule == StepRule::kLineSearchSfw || config.stopping_time;
  const ProblemConstants constants =
      need_constants ? compute_constants(p) : ProblemConstants{};
  const CounterRng bern(config.seed, Stream::kBernoulli);
  const CounterRng stop(config.seed, Stream::kStoppingTime);
  SfwStepOptions opts;
  opts.keep_if_worse = config.keep_if_worse;
  opts.active_set = config.active_set;
  opts.threads = config.threads;

  result.records.reserve(config.iterations + 1);
  const auto t0 = Clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0)
        .count();
  };

  for (std::size_t k = 0; k < config.iterations; ++k) {
    const Aggregate y = aggregate_of(p, x);
    const double value = f_value(p, y);
    const bool full = config.rule == StepRule::kLineSearchSfw ||
                      config.stopping_time || !config.active_set;
    std::optional<LinearizedResponse> br;
    double beta = kNaN;
    if (full) {
      br = linearized_best_response(p, y, config.threads);
      beta = dual_gap_beta(p, y, br->aggregate);
    }
    double omega = 2.0 / (static_cast<double>(k) + 2.0);
    if (config.rule == StepRule::kLineSearchSfw) {
      StepInputs in;
      in.k = k;
      in.beta = beta;
      in.c1 = constants.c1;
      in.num_agents = n;
      omega = step_size(config.rule, in);
    }

    SfwRecord rec;
    if (config.stopping_time) {
      const std::size_t cap =
          config.max_draws ? *config.max_draws : default_max_draws(k, n);
      StoppingStepResult st =
          stopping_impl(p, x, y, value, *br, k, omega, stop, cap, constants);
      rec.k = k;
      rec.value = value;
      rec.omega = omega;
      rec.n_k = st.draws;
      rec.active_count = st.active_count;
      rec.draws_exhausted = st.exhausted;
      rec.accepted = st.next != x;
      x = std::move(st.next);
    } else {
      const std::size_t n_k = config.schedule.count(k, n);
      SfwStepResult st = step_impl(p, x, y, value, k, omega, n_k, bern, opts,
                                   full ? &br->decisions : nullptr);
      rec = st.record;
      x = std::move(st.next);
    }
    rec.beta = beta;
    rec.wall_ms = elapsed();
    result.records.push_back(rec);
  }

  SfwRecord last;
  last.k = config.iterations;
  last.value = objective(p, x);
  last.beta = kNaN;
  last.omega = kNaN;
  last.wall_ms = elapsed();
  result.records.push_back(last);
  result.decisions = std::move(x);
  return result;
}

}  // namespace aggfw
