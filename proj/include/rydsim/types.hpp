#pragma once

#include <complex>
#include <Eigen/Dense>

namespace rydsim {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;

inline constexpr cplx iu{0.0, 1.0};

} // namespace rydsim
