#include "aggfw/balanced_signs.hpp"

#include "aggfw/errors.hpp"

namespace aggfw {

BalancedSignsInstance::BalancedSignsInstance(std::size_t n)
    : n_(n),
      layout_(std::make_shared<const BlockLayout>(
          std::vector<std::size_t>{1, 1})) {
  if (n_ == 0) throw ConfigError("balanced-signs instance needs N >= 1");
}

void BalancedSignsInstance::add_contribution(std::size_t, Decision d,
                                             double scale,
                                             Aggregate& acc) const {
  const double s = sign_of(d);
  acc[0] += scale * s * s;
  acc[1] += scale * s;
}

double BalancedSignsInstance::f_block(std::size_t j,
                                      std::span<const double> yj) const {
  return j == 0 ? -yj[0] : yj[0] * yj[0];
}

void BalancedSignsInstance::f_grad_block(std::size_t j,
                                         std::span<const double> yj,
                                         std::span<double> out) const {
  out[0] = j == 0 ? -1.0 : 2.0 * yj[0];
}

Decision BalancedSignsInstance::best_response(std::size_t,
                                              const Aggregate& grad) const {
  // <grad, g(s)> = grad_0 s^2 + grad_1 s = grad_0 + grad_1 s.
  return Decision{grad[1] < 0.0 ? 1u : 0u};
}

}  // namespace aggfw
