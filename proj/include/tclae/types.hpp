// types.hpp: shared matrix aliases and the library error type

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tclae {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

enum class ErrorKind {
    NonDiagonalizable,
    InsufficientSamples,
    DimensionMismatch,
    NonHermitianH,
    NoGap,
    AmbiguousMatching,
    SingularA,
    SingularN,
    DegenerateDenominator,
    NonzeroSurvivingEigenvalue,
    SingularFastBlock,
    InvalidParams,
    Config,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace tclae
