#pragma once

#include "byzsim/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace byzsim {

/// Norm cap for transmitted vectors. +infinity disables clipping.
struct ClipLevel {
  double lambda = kInfinity;

  ClipLevel() = default;
  explicit ClipLevel(double value) : lambda(value) {
    if (std::isnan(lambda) || lambda < 0.0)
      throw std::invalid_argument("ClipLevel: lambda must be nonnegative");
  }

  static ClipLevel none() { return ClipLevel(); }
  bool enabled() const { return std::isfinite(lambda); }
};

/// clip_lambda(x) = min{1, lambda/||x||} x, with clip_lambda(0) = 0.
/// The zero vector is handled before any division.
template <typename Derived>
Vector clip(const Eigen::MatrixBase<Derived>& x, ClipLevel level) {
  const double norm = x.norm();
  if (!level.enabled() || norm <= level.lambda || norm == 0.0) return x;
  return x * (level.lambda / norm);
}

/// Mean of ||v_i - v_l||^2 over all ordered pairs i != l,
/// i.e. (1/(m(m-1))) sum_{i != l} ||v_i - v_l||^2. Requires at least 2 vectors.
double squared_distance_mean(const std::vector<Vector>& vs);

/// Neumaier compensated accumulator for long scalar reductions.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Throws std::domain_error if any entry of v is NaN or infinite.
void ensure_finite(const Vector& v, const std::string& what);

}  // namespace byzsim
