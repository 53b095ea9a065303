#pragma once

#include <complex>
#include <Eigen/Dense>

namespace loopint {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

/// Hermiticity defect ||M - M^H||_inf, used by model invariant checks.
inline double hermiticity_defect(const CMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double anticommutator_defect(const CMatrix& a, const CMatrix& b) {
    return (a * b + b * a).cwiseAbs().maxCoeff();
}

}  // namespace loopint
