#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>

namespace byzsim {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace byzsim
