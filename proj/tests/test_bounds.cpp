#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "aggfw/bounds.hpp"
#include "aggfw/errors.hpp"
#include "aggfw/miqp.hpp"
#include "aggfw/schedule.hpp"
#include "support.hpp"

using namespace aggfw;
using testsupport::TableInstance;

namespace {

// M = 1 scalar block, f = c2 y^2, agent i choosing between 0 and s_i, so
// d_i1 = s_i and D_i = 2 c2 s_i^2.
TableInstance scalar_agents(const std::vector<double>& s, double c2 = 0.5) {
  std::vector<std::vector<std::vector<double>>> table;
  for (double v : s) table.push_back({{0.0}, {v}});
  return TableInstance({1}, std::move(table), {c2}, {0.0}, {0.0});
}

double rho(const std::vector<double>& pts, std::size_t dim,
           std::size_t res = 120) {
  return nonconvexity_measure(pts, dim, res);
}

std::vector<double> random_points(std::mt19937_64& gen, std::size_t count,
                                  std::size_t dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> p(count * dim);
  for (double& v : p) v = u(gen);
  return p;
}

double diameter_of(const std::vector<double>& pts, std::size_t dim) {
  const std::size_t n = pts.size() / dim;
  double best = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      double s = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = pts[a * dim + d] - pts[b * dim + d];
        s += diff * diff;
      }
      best = std::max(best, std::sqrt(s));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("single agent single block constants") {
  const TableInstance p = scalar_agents({1.0}, 1.0);  // L~ = 2, d = 1
  const ProblemConstants c = compute_constants(p);
  CHECK(c.c1 == doctest::Approx(2.0));
  CHECK(c.q == 1);
}

TEST_CASE("constants follow their definitions") {
  const TableInstance p = testsupport::random_table(6, 3, 3, 2, 5);
  const ProblemConstants c = compute_constants(p);
  double c0 = 0.0;
  double c1 = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    double dmax = 0.0;
    double d2 = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
      dmax = std::max(dmax, p.diameter(i, j));
      d2 += p.diameter(i, j) * p.diameter(i, j);
    }
    c0 += p.lipschitz(j) * dmax;
    c1 += p.grad_lipschitz(j) * d2;
  }
  CHECK(c.c0 == doctest::Approx(c0).epsilon(1e-12));
  CHECK(c.c1 == doctest::Approx(c1 / 6.0).epsilon(1e-12));
  CHECK(c.q == 6);
}

TEST_CASE("D[N] equals N C1") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const MiqpInstance inst = MiqpInstance::generate(4, 9, seed);
    const ProblemConstants c = compute_constants(inst);
    CHECK(d_of_k(c, 9) == doctest::Approx(9.0 * c.c1).epsilon(1e-9));
    double top = 0.0;
    for (double d : c.agent_d) top = std::max(top, d);
    CHECK(d_of_k(c, 1) == top);
  }
}

TEST_CASE("D[k] is the top-k sum") {
  // D = (3, 1, 2) with L~ = 1.
  const TableInstance p =
      scalar_agents({std::sqrt(3.0), 1.0, std::sqrt(2.0)}, 0.5);
  const ProblemConstants c = compute_constants(p);
  CHECK(d_of_k(c, 2) == doctest::Approx(5.0));
  CHECK_THROWS_AS(d_of_k(c, 0), ConfigError);
  CHECK_THROWS_AS(d_of_k(c, 4), ConfigError);
}

TEST_CASE("gap bounds") {
  const MiqpInstance wide = MiqpInstance::generate(12, 10, 3);  // q >= N
  const ProblemConstants cw = compute_constants(wide);
  CHECK(gap_bound_refined(cw) == doctest::Approx(gap_bound_basic(cw)));
  CHECK(gap_bound_basic(cw) == doctest::Approx(cw.c1 / 20.0));

  const TableInstance equal = scalar_agents({1.0, 1.0, 1.0, 1.0, 1.0});
  const ProblemConstants ce = compute_constants(equal);
  CHECK(gap_bound_refined(ce) == doctest::Approx(gap_bound_basic(ce) / 5.0));

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MiqpInstance inst = MiqpInstance::generate(3, 10, seed);
    const ProblemConstants c = compute_constants(inst);
    CHECK(gap_bound_refined(c) <= gap_bound_basic(c));
  }
}

TEST_CASE("mcdiarmid tails") {
  CHECK(mcdiarmid_tail(10, 0.0, 2.0) == 1.0);
  CHECK(mcdiarmid_tail(10, 100.0, 2.0) < 1e-300);
  CHECK(mcdiarmid_tail(50, 0.3, 2.0) == doctest::Approx(std::exp(-2 * 50 * 0.09 / 4)));
  double prev = 1.0;
  for (double eps = 0.01; eps < 3.0; eps += 0.05) {
    const double t = mcdiarmid_tail(20, eps, 1.5);
    const double tv = mcdiarmid_variance_tail(20, eps, 0.01, 1.5);
    CHECK(t <= prev);
    CHECK(t >= 0.0);
    CHECK(tv >= 0.0);
    CHECK(tv <= 1.0);
    prev = t;
  }
  CHECK(mcdiarmid_variance_tail(20, 0.5, 0.02, 1.5) ==
        doctest::Approx(std::exp(-20 * 0.25 / (2 * (20 * 0.02 + 1.5 * 0.5 / 3)))));
}

TEST_CASE("variance proxy") {
  const MiqpInstance inst = MiqpInstance::generate(2, 3, 1);
  const ProblemConstants c = compute_constants(inst);
  const std::vector<double> x{0.5, 0.25, 1.0};
  const MeasureProfile mu = bernoulli_profile(x);
  double sigma = 0.0;  // sum_i sum_j A_ji^2 x_i (1 - x_i)
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      sigma += inst.a(j, i) * inst.a(j, i) * x[i] * (1 - x[i]);
    }
  }
  const double l2 = c.lipschitz[0] * c.lipschitz[0] +
                    c.lipschitz[1] * c.lipschitz[1];
  CHECK(variance_proxy(inst, c, mu) == doctest::Approx(2.0 / 9.0 * l2 * sigma));
}

TEST_CASE("sfw tail constants") {
  const double c0 = 1.7;
  const SfwTailConstants two =
      sfw_tail_constants(2, c0, SamplingSchedule::constant(1), 10);
  CHECK(two.v == doctest::Approx(2 * c0 * c0 / 9));
  CHECK(two.m == doctest::Approx(c0));

  const SfwTailConstants big =
      sfw_tail_constants(50, c0, SamplingSchedule::constant(100000000), 10);
  CHECK(big.v < 1e-6);
  CHECK(big.m < 1e-6);
  CHECK(sfw_tail(0.1, 10, big) < 1e-100);
  CHECK(sfw_tail(0.0, 10, big) == 1.0);

  const double a = 24.0;
  const std::size_t n = 30;
  for (std::size_t k = 2; k <= 200; ++k) {
    const SfwTailConstants tc =
        sfw_tail_constants(k, c0, SamplingSchedule::quadratic(a), n);
    CHECK(tc.v <= 4.0 * n * c0 * c0 / (a * k * k) * (1 + 1e-12));
  }
  CHECK_THROWS_AS(sfw_tail_constants(0, c0, SamplingSchedule::constant(1), 5),
                  ConfigError);
}

TEST_CASE("sfw certificates") {
  const SfwTailConstants tc{0.5, 0.1};
  CHECK(sfw_expectation_bound(100, 3.0) == doctest::Approx(0.12));
  CHECK(sfw_variance_bound(10, 3.0, tc, 20) ==
        doctest::Approx(16 * 9.0 / 100 + 0.5 / 20));
  CHECK(quadratic_schedule_confidence(24.0) == doctest::Approx(1 - std::exp(-2.0)));
  CHECK(stopping_time_draw_bound(3, 100) ==
        doctest::Approx(std::pow(1 - std::exp(-400.0 / 125.0), -2.0)));
  CHECK(fw_gap_bound(4, 3.0) == doctest::Approx(1.5));
}

TEST_CASE("sample size for confidence") {
  CHECK(sample_size_for_confidence(3, 9, std::exp(-1.0), 2.0, 2.0) == 2);
  CHECK(sample_size_for_confidence(3, 9, 1.0 - 1e-15, 2.0, 2.0) == 1);
  CHECK_THROWS_AS(sample_size_for_confidence(10, 9, 0.1, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(sample_size_for_confidence(0, 9, 0.1, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(sample_size_for_confidence(3, 9, 1.0, 1.0, 1.0), ConfigError);

  const MiqpInstance inst = MiqpInstance::generate(100, 100, 1);
  const ProblemConstants c = compute_constants(inst);
  const double raw = 2 * c.c0 * c.c0 / (c.c1 * c.c1) * 100.0 * std::log(10.0);
  CHECK(sample_size_for_confidence(100, 100, 0.1, c.c0, c.c1) ==
        static_cast<std::size_t>(std::ceil(raw)));
}

TEST_CASE("nonconvexity of two points and of a chain") {
  CHECK(rho({0.0, 1.0}, 1, 2) == 0.5);
  CHECK(rho({0.0, 1.0}, 1, 100) == 0.5);
  CHECK(rho({0.0, 0.5, 1.0}, 1, 100) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(rho({0.3}, 1) == 0.0);
  // Collinear points in the plane reduce to the chain.
  CHECK(rho({0.0, 0.0, 0.5, 0.5, 1.0, 1.0}, 2, 100) ==
        doctest::Approx(0.25 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("nonconvexity of the unit square corners") {
  // The centre needs two opposite corners: variance 1/2 there.
  const double r = rho({0, 0, 1, 0, 0, 1, 1, 1}, 2, 60);
  CHECK(r == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
}

TEST_CASE("nonconvexity is at most the diameter") {
  std::mt19937_64 gen(4);
  for (int t = 0; t < 20; ++t) {
    const std::size_t dim = 1 + t % 3;
    const auto pts = random_points(gen, 3 + t % 6, dim);
    CHECK(rho(pts, dim, 30) <= diameter_of(pts, dim) + 1e-12);
  }
}

TEST_CASE("nonconvexity scale limits") {
  CHECK_THROWS_AS(rho(std::vector<double>(65, 0.0), 1), ConfigError);
  CHECK_THROWS_AS(rho(std::vector<double>(8, 0.0), 4), ConfigError);
  CHECK_THROWS_AS(rho({1.0, 2.0, 3.0}, 2), ConfigError);
  CHECK_THROWS_AS(nonconvexity_measure(std::vector<double>{0.0, 1.0}, 1, 0),
                  ConfigError);
}
