#pragma once

#include <Eigen/Dense>

namespace pslra {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

} // namespace pslra
