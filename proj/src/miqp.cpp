#include "aggfw/miqp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "aggfw/errors.hpp"
#include "aggfw/random.hpp"

namespace aggfw {

namespace {

std::shared_ptr<const BlockLayout> scalar_layout(std::size_t m) {
  return std::make_shared<const BlockLayout>(std::vector<std::size_t>(m, 1));
}

// A x (length M) for continuous x.
std::vector<double> times_a(const MiqpInstance& inst, std::span<const double> x) {
  std::vector<double> out(inst.rows(), 0.0);
  const auto& a = inst.a_row_major();
  const std::size_t n = inst.cols();
  for (std::size_t j = 0; j < inst.rows(); ++j) {
    const double* row = a.data() + j * n;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += row[i] * x[i];
    out[j] = s;
  }
  return out;
}

// A^T r (length N).
std::vector<double> apply_transpose(const MiqpInstance& inst,
                                    std::span<const double> r) {
  std::vector<double> out(inst.cols(), 0.0);
  const auto& a = inst.a_row_major();
  const std::size_t n = inst.cols();
  for (std::size_t j = 0; j < inst.rows(); ++j) {
    const double* row = a.data() + j * n;
    for (std::size_t i = 0; i < n; ++i) out[i] += row[i] * r[j];
  }
  return out;
}

}  // namespace

MiqpInstance::MiqpInstance(std::size_t m, std::size_t n, std::vector<double> a,
                           std::vector<double> ybar, std::uint64_t seed)
    : m_(m),
      n_(n),
      a_(std::move(a)),
      ybar_(std::move(ybar)),
      seed_(seed),
      layout_(scalar_layout(m)),
      lipschitz_(m, 0.0) {
  if (m_ == 0 || n_ == 0) throw ConfigError("MIQP needs M, N >= 1");
  if (a_.size() != m_ * n_) {
    throw ConfigError("A has " + std::to_string(a_.size()) +
                      " entries, expected M*N = " + std::to_string(m_ * n_));
  }
  if (ybar_.size() != m_) {
    throw ConfigError("ybar has " + std::to_string(ybar_.size()) +
                      " entries, expected M = " + std::to_string(m_));
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(a_.begin(), a_.end(), finite) ||
      !std::all_of(ybar_.begin(), ybar_.end(), finite)) {
    throw ConfigError("MIQP data must be finite");
  }
  // Exact modulus of f_j on conv(S_j) = [sum_i min(0, A_ji), sum_i
  // max(0, A_ji)] / N: twice the largest distance to the target.
  const double inv_n = 1.0 / static_cast<double>(n_);
  for (std::size_t j = 0; j < m_; ++j) {
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      lo += std::min(0.0, this->a(j, i));
      hi += std::max(0.0, this->a(j, i));
    }
    const double target = ybar_[j] * inv_n;
    lipschitz_[j] = 2.0 * std::max(std::abs(lo * inv_n - target),
                                   std::abs(hi * inv_n - target));
  }
}

MiqpInstance MiqpInstance::generate(std::size_t m, std::size_t n,
                                    std::uint64_t seed) {
  if (m == 0 || n == 0) throw ConfigError("MIQP needs M, N >= 1");
  const CounterRng rng(seed, Stream::kInstance);
  std::vector<double> a(m * n);
  std::vector<double> ybar(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      a[j * n + i] = rng.uniform(0, static_cast<std::uint32_t>(j),
                                 static_cast<std::uint32_t>(i));
    }
    ybar[j] = 0.5 * static_cast<double>(n) *
              rng.uniform(1, static_cast<std::uint32_t>(j), 0);
  }
  return MiqpInstance(m, n, std::move(a), std::move(ybar), seed);
}

double MiqpInstance::relaxed_value(std::span<const double> x) const {
  const std::vector<double> ax = times_a(*this, x);
  double s = 0.0;
  for (std::size_t j = 0; j < m_; ++j) {
    const double r = ax[j] - ybar_[j];
    s += r * r;
  }
  const double nn = static_cast<double>(n_);
  return s / (nn * nn);
}

bool MiqpInstance::is_valid(std::size_t agent, Decision d) const {
  return agent < n_ && d.index <= 1;
}

void MiqpInstance::add_contribution(std::size_t agent, Decision d,
                                    double scale, Aggregate& acc) const {
  if (d.index == 0) return;
  auto v = acc.values();
  for (std::size_t j = 0; j < m_; ++j) v[j] += scale * a_[j * n_ + agent];
}

double MiqpInstance::f_block(std::size_t j, std::span<const double> yj) const {
  const double r = yj[0] - ybar_[j] / static_cast<double>(n_);
  return r * r;
}

void MiqpInstance::f_grad_block(std::size_t j, std::span<const double> yj,
                                std::span<double> out) const {
  out[0] = 2.0 * (yj[0] - ybar_[j] / static_cast<double>(n_));
}

Decision MiqpInstance::best_response(std::size_t agent,
                                     const Aggregate& grad) const {
  double s = 0.0;
  const auto g = grad.values();
  for (std::size_t j = 0; j < m_; ++j) s += g[j] * a_[j * n_ + agent];
  return Decision{s < 0.0 ? 1u : 0u};
}

double MiqpInstance::diameter(std::size_t agent, std::size_t j) const {
  return std::abs(a(j, agent));
}

Decision miqp_best_response(const MiqpInstance& inst, std::size_t agent,
                            const Aggregate& grad) {
  return inst.best_response(agent, grad);
}

nlohmann::json to_json(const MiqpInstance& inst) {
  return nlohmann::json{{"M", inst.rows()},
                        {"N", inst.cols()},
                        {"seed", inst.seed()},
                        {"A", inst.a_row_major()},
                        {"ybar", inst.ybar()}};
}

MiqpInstance miqp_from_json(const nlohmann::json& doc) {
  try {
    return MiqpInstance(doc.at("M").get<std::size_t>(),
                        doc.at("N").get<std::size_t>(),
                        doc.at("A").get<std::vector<double>>(),
                        doc.at("ybar").get<std::vector<double>>(),
                        doc.value("seed", std::uint64_t{0}));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed instance document: ") + e.what());
  }
}

void save_instance(const MiqpInstance& inst,
                   const std::filesystem::path& path) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    // 17 significant digits so the document reloads to the same doubles.
    out << to_json(inst).dump(1) << '\n';
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

MiqpInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open instance file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  return miqp_from_json(doc);
}

RelaxedOptimum reference_relaxed_optimum(const MiqpInstance& inst, double tol,
                                         std::size_t max_iterations) {
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  const std::size_t m = inst.rows();
  const std::size_t n = inst.cols();
  const double nn = static_cast<double>(n);

  // ||A||_2^2 <= ||A||_1 ||A||_inf.
  double norm1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += std::abs(inst.a(j, i));
    norm1 = std::max(norm1, s);
  }
  double norm_inf = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::abs(inst.a(j, i));
    norm_inf = std::max(norm_inf, s);
  }
  const double lip = std::max(2.0 * norm1 * norm_inf / (nn * nn), 1e-300);

  auto gradient = [&](std::span<const double> x) {
    std::vector<double> r = times_a(inst, x);
    for (std::size_t j = 0; j < m; ++j) r[j] -= inst.ybar()[j];
    std::vector<double> g = apply_transpose(inst, r);
    for (double& v : g) v *= 2.0 / (nn * nn);
    return g;
  };
  auto project_step = [&](std::span<const double> x,
                          std::span<const double> g) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = std::clamp(x[i] - g[i] / lip, 0.0, 1.0);
    }
    return out;
  };
  auto mapping_norm = [&](std::span<const double> x) {
    const std::vector<double> g = gradient(x);
    const std::vector<double> p = project_step(x, g);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = lip * (x[i] - p[i]);
      s += d * d;
    }
    return std::sqrt(s);
  };

  std::vector<double> x(n, 0.0);
  std::vector<double> x_prev = x;
  std::vector<double> z = x;  // extrapolated point
  double t = 1.0;
  constexpr std::size_t kCheckEvery = 16;
  double residual = mapping_norm(x);
  std::size_t it = 0;
  while (residual > tol) {
    if (it >= max_iterations) {
      throw NumericalError(
          "reference solver hit the iteration cap with residual " +
          std::to_string(residual));
    }
    const std::vector<double> g = gradient(z);
    std::vector<double> x_next = project_step(z, g);
    // Gradient-based adaptive restart.
    double restart = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      restart += (z[i] - x_next[i]) * (x_next[i] - x[i]);
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = restart > 0.0 ? 0.0 : (t - 1.0) / t_next;
    t = restart > 0.0 ? 1.0 : t_next;
    x_prev = std::move(x);
    x = std::move(x_next);
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = x[i] + beta * (x[i] - x_prev[i]);
    }
    ++it;
    if (it % kCheckEvery == 0) residual = mapping_norm(x);
  }

  Aggregate y(inst.layout());
  const std::vector<double> ax = times_a(inst, x);
  for (std::size_t j = 0; j < m; ++j) y[j] = ax[j] / nn;
  const double value = inst.relaxed_value(x);
  return {std::move(x), std::move(y), value, residual, it};
}

MeasureProfile bernoulli_profile(std::span<const double> x) {
  std::vector<DiscreteMeasure> ms;
  ms.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = std::clamp(x[i], 0.0, 1.0);
    ms.emplace_back(i, std::vector<Atom>{{1.0 - p, Decision{0}},
                                         {p, Decision{1}}});
  }
  return MeasureProfile(std::move(ms));
}

}  // namespace aggfw
