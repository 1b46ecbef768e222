#include "aggfw/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aggfw/errors.hpp"

namespace aggfw {

DiscreteMeasure::DiscreteMeasure(std::size_t agent, std::vector<Atom> atoms,
                                 double prune_threshold)
    : agent_(agent) {
  atoms_.reserve(atoms.size());
  for (const Atom& a : atoms) {
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
      throw ConfigError("invalid atom weight for agent " +
                        std::to_string(agent));
    }
    auto it = std::find_if(atoms_.begin(), atoms_.end(), [&](const Atom& b) {
      return b.decision == a.decision;
    });
    if (it != atoms_.end()) {
      it->weight += a.weight;
    } else {
      atoms_.push_back(a);
    }
  }
  std::erase_if(atoms_,
                [&](const Atom& a) { return a.weight < prune_threshold; });
  double total = 0.0;
  for (const Atom& a : atoms_) total += a.weight;
  if (atoms_.empty() || !(total > 0.0)) {
    throw ConfigError("measure of agent " + std::to_string(agent) +
                      " has no mass");
  }
  for (Atom& a : atoms_) a.weight /= total;
}

DiscreteMeasure DiscreteMeasure::dirac(std::size_t agent, Decision d) {
  return DiscreteMeasure(agent, {Atom{1.0, d}});
}

double DiscreteMeasure::weight_of(Decision d) const {
  for (const Atom& a : atoms_) {
    if (a.decision == d) return a.weight;
  }
  return 0.0;
}

MeasureProfile::MeasureProfile(std::vector<DiscreteMeasure> measures)
    : measures_(std::move(measures)) {
  for (std::size_t i = 0; i < measures_.size(); ++i) {
    if (measures_[i].agent() != i) {
      throw ConfigError("measure at slot " + std::to_string(i) +
                        " belongs to agent " +
                        std::to_string(measures_[i].agent()));
    }
  }
}

MeasureProfile MeasureProfile::dirac(const DecisionProfile& x) {
  std::vector<DiscreteMeasure> ms;
  ms.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    ms.push_back(DiscreteMeasure::dirac(i, x[i]));
  }
  return MeasureProfile(std::move(ms));
}

std::vector<std::size_t> MeasureProfile::support_sizes() const {
  std::vector<std::size_t> out;
  out.reserve(measures_.size());
  for (const auto& m : measures_) out.push_back(m.support_size());
  return out;
}

void validate_measures(const ProblemInstance& p, const MeasureProfile& mu) {
  if (mu.size() != p.num_agents()) {
    throw ConfigError("measure profile has " + std::to_string(mu.size()) +
                      " agents, expected " + std::to_string(p.num_agents()));
  }
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (const Atom& a : mu[i].atoms()) {
      if (!p.is_valid(i, a.decision)) {
        throw ConfigError("invalid decision in the measure of agent " +
                          std::to_string(i));
      }
    }
  }
}

Aggregate expected_contribution(const ProblemInstance& p,
                                const DiscreteMeasure& mu_i) {
  Aggregate out = p.zero_aggregate();
  for (const Atom& a : mu_i.atoms()) {
    p.add_contribution(mu_i.agent(), a.decision, a.weight, out);
  }
  return out;
}

Aggregate mean_aggregate(const ProblemInstance& p, const MeasureProfile& mu) {
  validate_measures(p, mu);
  Aggregate y = p.zero_aggregate();
  const double inv_n = 1.0 / static_cast<double>(mu.size());
  for (const auto& m : mu.measures()) {
    for (const Atom& a : m.atoms()) {
      p.add_contribution(m.agent(), a.decision, inv_n * a.weight, y);
    }
  }
  return y;
}

double relaxed_objective(const ProblemInstance& p, const MeasureProfile& mu) {
  return f_value(p, mean_aggregate(p, mu));
}

MeasureProfile mix(const MeasureProfile& mu1, const MeasureProfile& mu2,
                   double omega, double prune_threshold) {
  if (!(omega >= 0.0 && omega <= 1.0)) {
    throw ConfigError("mixing weight must lie in [0, 1]");
  }
  if (mu1.size() != mu2.size()) {
    throw ConfigError("cannot mix measure profiles of different sizes");
  }
  std::vector<DiscreteMeasure> out;
  out.reserve(mu1.size());
  for (std::size_t i = 0; i < mu1.size(); ++i) {
    std::vector<Atom> atoms;
    atoms.reserve(mu1[i].support_size() + mu2[i].support_size());
    for (const Atom& a : mu1[i].atoms()) {
      atoms.push_back({(1.0 - omega) * a.weight, a.decision});
    }
    for (const Atom& a : mu2[i].atoms()) {
      atoms.push_back({omega * a.weight, a.decision});
    }
    out.emplace_back(i, std::move(atoms), prune_threshold);
  }
  return MeasureProfile(std::move(out));
}

double contribution_variance(const ProblemInstance& p,
                             const DiscreteMeasure& mu_i, std::size_t j) {
  const Aggregate mean = expected_contribution(p, mu_i);
  double var = 0.0;
  for (const Atom& a : mu_i.atoms()) {
    const Aggregate g = contribution(p, mu_i.agent(), a.decision);
    var += a.weight * block_squared_distance(g, mean, j);
  }
  return var;
}

double total_contribution_variance(const ProblemInstance& p,
                                   const DiscreteMeasure& mu_i) {
  double total = 0.0;
  for (std::size_t j = 0; j < p.num_blocks(); ++j) {
    total += contribution_variance(p, mu_i, j);
  }
  return total;
}

DecisionProfile sample_profile(const MeasureProfile& mu, const CounterRng& rng,
                               std::uint32_t epoch, std::uint32_t draw) {
  DecisionProfile x(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto atoms = mu[i].atoms();
    const double u = rng.uniform(epoch, draw, static_cast<std::uint32_t>(i));
    double cdf = 0.0;
    x[i] = atoms.back().decision;
    for (const Atom& a : atoms) {
      cdf += a.weight;
      if (u < cdf) {
        x[i] = a.decision;
        break;
      }
    }
  }
  return x;
}

SelectionResult select_best(const ProblemInstance& p, const MeasureProfile& mu,
                            std::size_t n, const CounterRng& rng,
                            std::uint32_t epoch) {
  if (n == 0) throw ConfigError("selection needs at least one draw");
  validate_measures(p, mu);
  SelectionResult best;
  for (std::size_t j = 0; j < n; ++j) {
    DecisionProfile x =
        sample_profile(mu, rng, epoch, static_cast<std::uint32_t>(j));
    const double v = objective(p, x);
    if (j == 0 || v < best.value) {
      best = {std::move(x), v, j};
    }
  }
  return best;
}

}  // namespace aggfw
