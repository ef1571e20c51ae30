#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace wzw {

using Real = double;
using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;
using RealMat = Eigen::MatrixXd;

// Thrown when a quadrature or finite-difference refinement fails to reach
// its target tolerance.  Never swallowed silently.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationError : std::invalid_argument {
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Positivity failure of a fibered form; carries the offending node.
struct PositivityError : std::runtime_error {
    double u;
    std::vector<double> x;
    PositivityError(const std::string& what, double u_, std::vector<double> x_)
        : std::runtime_error(what), u(u_), x(std::move(x_)) {}
};

}  // namespace wzw
