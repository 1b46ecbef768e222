#pragma once

// Test-only instances and direct-formula oracles. Nothing here calls into
// the code paths it is used to check.

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <vector>

#include "aggfw/problem.hpp"

namespace testsupport {

using aggfw::Aggregate;
using aggfw::BlockLayout;
using aggfw::Decision;

// Finite decision universes given as explicit contribution tables, with
// f_j(y_j) = c2_j ||y_j - t_j||^2 + <lin_j, y_j>.
class TableInstance final : public aggfw::ProblemInstance {
 public:
  // table[i][d] is the flat contribution g_i(d) over all blocks.
  TableInstance(std::vector<std::size_t> dims,
                std::vector<std::vector<std::vector<double>>> table,
                std::vector<double> c2, std::vector<double> target,
                std::vector<double> lin)
      : layout_(std::make_shared<const BlockLayout>(dims)),
        table_(std::move(table)),
        c2_(std::move(c2)),
        target_(std::move(target)),
        lin_(std::move(lin)) {}

  std::size_t num_agents() const override { return table_.size(); }
  const std::shared_ptr<const BlockLayout>& layout() const override {
    return layout_;
  }
  bool is_valid(std::size_t i, Decision d) const override {
    return i < table_.size() && d.index < table_[i].size();
  }
  std::optional<std::size_t> universe_size(std::size_t i) const override {
    return table_[i].size();
  }
  void add_contribution(std::size_t i, Decision d, double scale,
                        Aggregate& acc) const override {
    const auto& g = table_[i][d.index];
    for (std::size_t t = 0; t < g.size(); ++t) acc[t] += scale * g[t];
  }
  double f_block(std::size_t j, std::span<const double> y) const override {
    const std::size_t off = layout_->offset(j);
    double v = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
      const double d = y[t] - target_[off + t];
      v += c2_[j] * d * d + lin_[off + t] * y[t];
    }
    return v;
  }
  void f_grad_block(std::size_t j, std::span<const double> y,
                    std::span<double> out) const override {
    const std::size_t off = layout_->offset(j);
    for (std::size_t t = 0; t < y.size(); ++t) {
      out[t] = 2.0 * c2_[j] * (y[t] - target_[off + t]) + lin_[off + t];
    }
  }
  Decision best_response(std::size_t i, const Aggregate& grad) const override {
    std::uint32_t best = 0;
    double best_v = std::numeric_limits<double>::infinity();
    for (std::uint32_t d = 0; d < table_[i].size(); ++d) {
      double v = 0.0;
      for (std::size_t t = 0; t < table_[i][d].size(); ++t) {
        v += grad[t] * table_[i][d][t];
      }
      if (v < best_v) {
        best_v = v;
        best = d;
      }
    }
    return Decision{best};
  }
  // Upper bound of ||grad f_j|| over the bounding box of conv(S_j).
  double lipschitz(std::size_t j) const override {
    const std::size_t off = layout_->offset(j);
    const std::size_t dim = layout_->block_dim(j);
    const double n = static_cast<double>(table_.size());
    double sq = 0.0;
    for (std::size_t t = 0; t < dim; ++t) {
      double lo = 0.0;
      double hi = 0.0;
      for (const auto& agent : table_) {
        double amin = std::numeric_limits<double>::infinity();
        double amax = -amin;
        for (const auto& g : agent) {
          amin = std::min(amin, g[off + t]);
          amax = std::max(amax, g[off + t]);
        }
        lo += amin / n;
        hi += amax / n;
      }
      auto gr = [&](double y) {
        return std::abs(2.0 * c2_[j] * (y - target_[off + t]) + lin_[off + t]);
      };
      const double m = std::max(gr(lo), gr(hi));
      sq += m * m;
    }
    return std::sqrt(sq);
  }
  double grad_lipschitz(std::size_t j) const override { return 2.0 * c2_[j]; }
  double diameter(std::size_t i, std::size_t j) const override {
    const std::size_t off = layout_->offset(j);
    const std::size_t dim = layout_->block_dim(j);
    double best = 0.0;
    for (const auto& a : table_[i]) {
      for (const auto& b : table_[i]) {
        double s = 0.0;
        for (std::size_t t = 0; t < dim; ++t) {
          s += (a[off + t] - b[off + t]) * (a[off + t] - b[off + t]);
        }
        best = std::max(best, std::sqrt(s));
      }
    }
    return best;
  }

 private:
  std::shared_ptr<const BlockLayout> layout_;
  std::vector<std::vector<std::vector<double>>> table_;
  std::vector<double> c2_;
  std::vector<double> target_;
  std::vector<double> lin_;
};

// Random table instance: n agents with `choices` decisions each, M blocks of
// dimension `dim`, convex quadratic f.
inline TableInstance random_table(std::size_t n, std::size_t choices,
                                  std::size_t m, std::size_t dim,
                                  std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<std::vector<double>>> table(n);
  for (auto& agent : table) {
    agent.resize(choices);
    for (auto& g : agent) {
      g.resize(m * dim);
      for (double& v : g) v = u(gen);
    }
  }
  std::vector<double> c2(m);
  for (double& v : c2) v = 0.5 + 0.5 * (u(gen) + 1.0);
  std::vector<double> target(m * dim);
  std::vector<double> lin(m * dim);
  for (double& v : target) v = 0.5 * u(gen);
  for (double& v : lin) v = 0.2 * u(gen);
  return TableInstance(std::vector<std::size_t>(m, dim), std::move(table),
                       std::move(c2), std::move(target), std::move(lin));
}

// ||A x - ybar||^2 / N^2 straight from the matrix.
inline double miqp_direct(const std::vector<double>& a_rowmajor,
                          const std::vector<double>& ybar, std::size_t m,
                          std::size_t n, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double r = -ybar[j];
    for (std::size_t i = 0; i < n; ++i) r += a_rowmajor[j * n + i] * x[i];
    s += r * r;
  }
  return s / (static_cast<double>(n) * static_cast<double>(n));
}

// Decisions of an index in mixed radix 2 with agent 0 least significant.
inline std::vector<double> bits_of(std::uint64_t code, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>((code >> i) & 1u);
  return x;
}

inline aggfw::DecisionProfile profile_of(const std::vector<double>& x) {
  aggfw::DecisionProfile p(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    p[i] = Decision{static_cast<std::uint32_t>(x[i] > 0.5 ? 1 : 0)};
  }
  return p;
}

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

inline double stderr_of_mean(const std::vector<double>& v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) /
                   static_cast<double>(v.size()));
}

}  // namespace testsupport
