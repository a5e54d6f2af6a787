#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace hypertrust {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

using DeviceId = int;
using HyperedgeId = int;

} // namespace hypertrust
