#include "aggfw/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "aggfw/errors.hpp"
#include "aggfw/schedule.hpp"

namespace aggfw {

ProblemConstants compute_constants(const ProblemInstance& p) {
  ProblemConstants c;
  c.num_agents = p.num_agents();
  c.num_blocks = p.num_blocks();
  c.q = p.layout()->total_dim();
  c.lipschitz.resize(c.num_blocks);
  c.grad_lipschitz.resize(c.num_blocks);
  c.diameters.resize(c.num_agents * c.num_blocks);
  c.agent_d.assign(c.num_agents, 0.0);

  for (std::size_t j = 0; j < c.num_blocks; ++j) {
    c.lipschitz[j] = p.lipschitz(j);
    c.grad_lipschitz[j] = p.grad_lipschitz(j);
    if (!(c.lipschitz[j] >= 0.0) || !(c.grad_lipschitz[j] >= 0.0)) {
      throw ConfigError("negative Lipschitz constant for block " +
                        std::to_string(j));
    }
  }
  for (std::size_t i = 0; i < c.num_agents; ++i) {
    for (std::size_t j = 0; j < c.num_blocks; ++j) {
      const double d = p.diameter(i, j);
      if (!(d >= 0.0)) {
        throw ConfigError("negative diameter d_" + std::to_string(i) + "," +
                          std::to_string(j));
      }
      c.diameters[i * c.num_blocks + j] = d;
    }
  }

  double sum_d = 0.0;
  for (std::size_t i = 0; i < c.num_agents; ++i) {
    double di = 0.0;
    for (std::size_t j = 0; j < c.num_blocks; ++j) {
      const double d = c.diameter(i, j);
      di += c.grad_lipschitz[j] * d * d;
    }
    c.agent_d[i] = di;
    sum_d += di;
  }
  c.c1 = sum_d / static_cast<double>(c.num_agents);

  for (std::size_t j = 0; j < c.num_blocks; ++j) {
    double max_d = 0.0;
    for (std::size_t i = 0; i < c.num_agents; ++i) {
      max_d = std::max(max_d, c.diameter(i, j));
    }
    c.c0 += c.lipschitz[j] * max_d;
  }
  return c;
}

double d_of_k(const ProblemConstants& c, std::size_t k) {
  if (k < 1 || k > c.num_agents) {
    throw ConfigError("D[k] needs 1 <= k <= N, got k = " + std::to_string(k));
  }
  std::vector<double> d = c.agent_d;
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k),
                    d.end(), std::greater<>());
  return std::accumulate(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k),
                         0.0);
}

double gap_bound_basic(const ProblemConstants& c) {
  return c.c1 / (2.0 * static_cast<double>(c.num_agents));
}

double gap_bound_refined(const ProblemConstants& c) {
  const double n = static_cast<double>(c.num_agents);
  return d_of_k(c, std::min(c.q, c.num_agents)) / (2.0 * n * n);
}

double mcdiarmid_tail(std::size_t n, double eps, double c0) {
  if (!(eps > 0.0)) return 1.0;
  if (c0 == 0.0) return 0.0;
  return std::exp(-2.0 * static_cast<double>(n) * eps * eps / (c0 * c0));
}

double mcdiarmid_variance_tail(std::size_t n, double eps, double sum_v2,
                               double c0) {
  if (!(eps > 0.0)) return 1.0;
  const double nn = static_cast<double>(n);
  const double denom = 2.0 * (nn * sum_v2 + c0 * eps / 3.0);
  if (denom == 0.0) return 0.0;
  return std::exp(-nn * eps * eps / denom);
}

double variance_proxy(const ProblemInstance& p, const ProblemConstants& c,
                      const MeasureProfile& mu) {
  double sum_l2 = 0.0;
  for (double l : c.lipschitz) sum_l2 += l * l;
  const double n = static_cast<double>(c.num_agents);
  double total = 0.0;
  for (const auto& m : mu.measures()) {
    total += total_contribution_variance(p, m);
  }
  return 2.0 / (n * n) * sum_l2 * total;
}

SfwTailConstants sfw_tail_constants(std::size_t big_k, double c0,
                                    const SamplingSchedule& schedule,
                                    std::size_t num_agents) {
  if (big_k == 0) throw ConfigError("K must be at least 1");
  const double kk = static_cast<double>(big_k);
  double sum = 0.0;
  double max_term = 0.0;
  for (std::size_t k = 1; k < big_k; ++k) {
    const double kd = static_cast<double>(k);
    const double nk = static_cast<double>(schedule.count(k, num_agents));
    sum += kd * (kd + 1.0) * (kd + 1.0) / nk;
    max_term = std::max(max_term, (kd + 1.0) * (kd + 2.0) / nk);
  }
  SfwTailConstants tc;
  tc.v = 2.0 * c0 * c0 / (kk * kk * (kk + 1.0) * (kk + 1.0)) * sum;
  tc.m = c0 / (kk * (kk + 1.0)) * max_term;
  return tc;
}

double sfw_tail(double eps, std::size_t num_agents,
                const SfwTailConstants& tc) {
  if (!(eps > 0.0)) return 1.0;
  const double denom = 2.0 * (tc.v + eps * tc.m / 3.0);
  if (denom == 0.0) return 0.0;
  return std::exp(-eps * eps * static_cast<double>(num_agents) / denom);
}

double sfw_expectation_bound(std::size_t big_k, double c1) {
  return 4.0 * c1 / static_cast<double>(big_k);
}

double sfw_variance_bound(std::size_t big_k, double c1,
                          const SfwTailConstants& tc, std::size_t num_agents) {
  const double kk = static_cast<double>(big_k);
  return 16.0 * c1 * c1 / (kk * kk) + tc.v / static_cast<double>(num_agents);
}

double quadratic_schedule_confidence(double a) {
  return 1.0 - std::exp(-a / 12.0);
}

double stopping_time_draw_bound(std::size_t k, std::size_t num_agents) {
  const double k2 = static_cast<double>(k) + 2.0;
  const double p =
      std::exp(-4.0 * static_cast<double>(num_agents) / (k2 * k2 * k2));
  const double q = 1.0 - p;
  return 1.0 / (q * q);
}

double fw_gap_bound(std::size_t k, double c1) {
  return 2.0 * c1 / static_cast<double>(k);
}

std::size_t sample_size_for_confidence(std::size_t k, std::size_t num_agents,
                                       double zeta, double c0, double c1) {
  if (k < 1 || k > num_agents) {
    throw ConfigError("sample size rule needs 1 <= k <= N");
  }
  if (!(zeta > 0.0 && zeta < 1.0)) {
    throw ConfigError("confidence level zeta must lie in (0, 1)");
  }
  if (!(c1 > 0.0)) throw ConfigError("sample size rule needs C1 > 0");
  const double kd = static_cast<double>(k);
  const double raw = 2.0 * c0 * c0 / (c1 * c1) * kd * kd /
                     static_cast<double>(num_agents) * std::log(1.0 / zeta);
  // Guard against 2.0000000000000004 style round-up of exact integers.
  const double n = std::ceil(raw * (1.0 - 1e-12));
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

// ---------------------------------------------------------------------------
// Nonconvexity measure.
//
// For y in conv(K), the smallest variance of a measure on K with mean y is
// env(y) - |y|^2, where env is the lower convex envelope of the lifted
// points (p, |p|^2): the inner minimization is a linear program over the
// simplex whose basic solutions are supports of at most dim(aff K) + 1
// points. An optimal basis has an affine function through its lifted points
// lying below every lifted point, so only those "lower" simplices are
// enumerated, and on each of them env is that affine function. The sup over
// conv(K) is then approximated from below by the max over a barycentric
// lattice of step 1/resolution on every lower simplex.
// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kMaxPoints = 64;
constexpr std::size_t kMaxDim = 3;

// Solves the (n x n) system a x = b in place by Gaussian elimination with
// partial pivoting. Returns false when a pivot falls below tol.
bool solve_small(std::array<std::array<double, kMaxDim + 1>, kMaxDim + 1>& a,
                 std::array<double, kMaxDim + 1>& b, std::size_t n,
                 double tol) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) <= tol) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= a[r][c] * b[c];
    b[r] = s / a[r][r];
  }
  return true;
}

// Calls fn(indices) for each combination of `size` indices out of n.
template <class Fn>
void for_each_combination(std::size_t n, std::size_t size, Fn&& fn) {
  std::vector<std::size_t> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  if (size > n) return;
  while (true) {
    fn(std::span<const std::size_t>(idx));
    std::size_t t = size;
    while (t > 0 && idx[t - 1] == n - size + t - 1) --t;
    if (t == 0) return;
    ++idx[t - 1];
    for (std::size_t u = t; u < size; ++u) idx[u] = idx[u - 1] + 1;
  }
}

// Calls fn(counts) for every composition of `total` into `parts` parts.
template <class Fn>
void for_each_composition(std::size_t total, std::size_t parts, Fn&& fn) {
  std::vector<std::size_t> c(parts, 0);
  c[0] = total;
  while (true) {
    fn(std::span<const std::size_t>(c));
    if (parts == 1 || c[parts - 1] == total) return;
    // Move one unit from the first nonzero entry before the tail.
    std::size_t t = parts - 1;
    while (c[t - 1] == 0) --t;
    const std::size_t tail = c[parts - 1];
    c[parts - 1] = 0;
    --c[t - 1];
    c[t] = tail + 1;
  }
}

}  // namespace

double nonconvexity_measure(std::span<const double> points, std::size_t dim,
                            std::size_t resolution) {
  if (dim == 0 || dim > kMaxDim) {
    throw ConfigError("nonconvexity diagnostic supports dimensions 1..3");
  }
  if (points.empty() || points.size() % dim != 0) {
    throw ConfigError("point buffer is not a whole number of points");
  }
  const std::size_t count = points.size() / dim;
  if (count > kMaxPoints) {
    throw ConfigError("nonconvexity diagnostic supports at most 64 points");
  }
  if (resolution == 0) throw ConfigError("grid resolution must be >= 1");

  // Center, and find an orthonormal basis of the affine hull.
  std::vector<double> center(dim, 0.0);
  for (std::size_t s = 0; s < count; ++s) {
    for (std::size_t d = 0; d < dim; ++d) center[d] += points[s * dim + d];
  }
  for (double& v : center) v /= static_cast<double>(count);
  double scale = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    double r2 = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double v = points[s * dim + d] - center[d];
      r2 += v * v;
    }
    scale = std::max(scale, std::sqrt(r2));
  }
  if (scale == 0.0) return 0.0;
  const double tol = 1e-10 * scale;

  std::vector<std::array<double, kMaxDim>> basis;
  for (std::size_t s = 0; s < count && basis.size() < dim; ++s) {
    std::array<double, kMaxDim> v{};
    for (std::size_t d = 0; d < dim; ++d) {
      v[d] = points[s * dim + d] - center[d];
    }
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        double proj = 0.0;
        for (std::size_t d = 0; d < dim; ++d) proj += v[d] * b[d];
        for (std::size_t d = 0; d < dim; ++d) v[d] -= proj * b[d];
      }
    }
    double norm = 0.0;
    for (std::size_t d = 0; d < dim; ++d) norm += v[d] * v[d];
    norm = std::sqrt(norm);
    if (norm > tol * 1e3) {
      for (std::size_t d = 0; d < dim; ++d) v[d] /= norm;
      basis.push_back(v);
    }
  }
  const std::size_t rank = basis.size();

  // Local coordinates (scaled by 1/scale for conditioning) and lifts.
  std::vector<std::array<double, kMaxDim>> z(count);
  std::vector<double> lift(count);
  for (std::size_t s = 0; s < count; ++s) {
    double h = 0.0;
    for (std::size_t b = 0; b < rank; ++b) {
      double c = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        c += (points[s * dim + d] - center[d]) * basis[b][d];
      }
      z[s][b] = c / scale;
      h += z[s][b] * z[s][b];
    }
    lift[s] = h;
  }

  const std::size_t parts = rank + 1;
  double best = 0.0;
  std::vector<std::array<double, kMaxDim>> vertices(parts);
  for_each_combination(count, parts, [&](std::span<const std::size_t> sub) {
    // Affine function a.z + c through the lifted vertices.
    std::array<std::array<double, kMaxDim + 1>, kMaxDim + 1> sys{};
    std::array<double, kMaxDim + 1> rhs{};
    for (std::size_t r = 0; r < parts; ++r) {
      for (std::size_t b = 0; b < rank; ++b) sys[r][b] = z[sub[r]][b];
      sys[r][rank] = 1.0;
      rhs[r] = lift[sub[r]];
    }
    if (!solve_small(sys, rhs, parts, 1e-9)) return;
    for (std::size_t s = 0; s < count; ++s) {
      double h = rhs[rank];
      for (std::size_t b = 0; b < rank; ++b) h += rhs[b] * z[s][b];
      if (h > lift[s] + 1e-9) return;
    }
    for (std::size_t r = 0; r < parts; ++r) vertices[r] = z[sub[r]];
    const double inv_res = 1.0 / static_cast<double>(resolution);
    for_each_composition(
        resolution, parts, [&](std::span<const std::size_t> weights) {
          std::array<double, kMaxDim> y{};
          for (std::size_t r = 0; r < parts; ++r) {
            const double w = static_cast<double>(weights[r]) * inv_res;
            for (std::size_t b = 0; b < rank; ++b) y[b] += w * vertices[r][b];
          }
          double env = rhs[rank];
          double norm2 = 0.0;
          for (std::size_t b = 0; b < rank; ++b) {
            env += rhs[b] * y[b];
            norm2 += y[b] * y[b];
          }
          best = std::max(best, env - norm2);
        });
  });
  return scale * std::sqrt(std::max(0.0, best));
}

}  // namespace aggfw
