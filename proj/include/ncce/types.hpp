#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace ncce {

using cplx = std::complex<double>;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;
using MatC = Eigen::MatrixXcd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Input violates an operation precondition (e.g. zero channel vector).
struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A sensing matrix turned out numerically rank deficient; callers should
/// regenerate the ensemble with a fresh seed.
struct DegenerateMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two estimated frequencies collided (near-duplicate atoms); the caller is
/// expected to merge them and retry.
struct CollisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid experiment / CLI configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ncce
