#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace aggfw {

// Block structure of the aggregate space E = E_1 x ... x E_M.
class BlockLayout {
 public:
  explicit BlockLayout(std::vector<std::size_t> block_dims);

  std::size_t num_blocks() const { return offsets_.size() - 1; }
  std::size_t block_dim(std::size_t j) const {
    return offsets_[j + 1] - offsets_[j];
  }
  std::size_t offset(std::size_t j) const { return offsets_[j]; }
  std::size_t total_dim() const { return offsets_.back(); }

  friend bool operator==(const BlockLayout&, const BlockLayout&) = default;

 private:
  std::vector<std::size_t> offsets_;
};

// A point of the aggregate space, stored flat; block j is the slice
// [offset(j), offset(j) + block_dim(j)).
class Aggregate {
 public:
  explicit Aggregate(std::shared_ptr<const BlockLayout> layout);

  const BlockLayout& layout() const { return *layout_; }
  const std::shared_ptr<const BlockLayout>& shared_layout() const {
    return layout_;
  }
  std::size_t num_blocks() const { return layout_->num_blocks(); }
  std::size_t size() const { return values_.size(); }

  std::span<double> block(std::size_t j) {
    return {values_.data() + layout_->offset(j), layout_->block_dim(j)};
  }
  std::span<const double> block(std::size_t j) const {
    return {values_.data() + layout_->offset(j), layout_->block_dim(j)};
  }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t idx) { return values_[idx]; }
  double operator[](std::size_t idx) const { return values_[idx]; }

  void set_zero();
  // this += scale * other
  void axpy(double scale, const Aggregate& other);
  Aggregate& operator+=(const Aggregate& other);
  Aggregate& operator-=(const Aggregate& other);
  Aggregate& operator*=(double scale);

  bool all_finite() const;

 private:
  std::shared_ptr<const BlockLayout> layout_;
  std::vector<double> values_;
};

double dot(const Aggregate& a, const Aggregate& b);
double block_squared_distance(const Aggregate& a, const Aggregate& b,
                              std::size_t j);
// (1 - omega) a + omega b
Aggregate lerp(const Aggregate& a, const Aggregate& b, double omega);

}  // namespace aggfw
