#include "aggfw/aggregate.hpp"

#include <cassert>
#include <cmath>
#include <numeric>

namespace aggfw {

BlockLayout::BlockLayout(std::vector<std::size_t> block_dims) {
  offsets_.reserve(block_dims.size() + 1);
  offsets_.push_back(0);
  std::partial_sum(block_dims.begin(), block_dims.end(),
                   std::back_inserter(offsets_));
}

Aggregate::Aggregate(std::shared_ptr<const BlockLayout> layout)
    : layout_(std::move(layout)), values_(layout_->total_dim(), 0.0) {}

void Aggregate::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

void Aggregate::axpy(double scale, const Aggregate& other) {
  assert(other.size() == size());
  for (std::size_t t = 0; t < values_.size(); ++t) {
    values_[t] += scale * other.values_[t];
  }
}

Aggregate& Aggregate::operator+=(const Aggregate& other) {
  axpy(1.0, other);
  return *this;
}

Aggregate& Aggregate::operator-=(const Aggregate& other) {
  axpy(-1.0, other);
  return *this;
}

Aggregate& Aggregate::operator*=(double scale) {
  for (double& v : values_) v *= scale;
  return *this;
}

bool Aggregate::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

double dot(const Aggregate& a, const Aggregate& b) {
  assert(a.size() == b.size());
  const auto av = a.values();
  const auto bv = b.values();
  return std::inner_product(av.begin(), av.end(), bv.begin(), 0.0);
}

double block_squared_distance(const Aggregate& a, const Aggregate& b,
                              std::size_t j) {
  const auto aj = a.block(j);
  const auto bj = b.block(j);
  double sum = 0.0;
  for (std::size_t t = 0; t < aj.size(); ++t) {
    const double d = aj[t] - bj[t];
    sum += d * d;
  }
  return sum;
}

Aggregate lerp(const Aggregate& a, const Aggregate& b, double omega) {
  Aggregate out = a;
  const auto bv = b.values();
  auto ov = out.values();
  for (std::size_t t = 0; t < ov.size(); ++t) {
    ov[t] = (1.0 - omega) * ov[t] + omega * bv[t];
  }
  return out;
}

}  // namespace aggfw
