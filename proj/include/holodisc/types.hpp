#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace holo {

using cxd = std::complex<double>;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;
using VecR = Eigen::VectorXd;
using MatR = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;

// Hermitian inner product, linear in the first argument.
inline cxd inner(const VecC& x, const VecC& y) { return y.dot(x); }

struct error : std::runtime_error {
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad arguments or data that violates a precondition (wrong sizes, points off
// the manifold, scenario inconsistencies).
struct domain_error : error {
  explicit domain_error(const std::string& msg) : error(msg) {}
};

// A computation that cannot be completed reliably (ill-posed projection,
// indeterminate rank, unwrap density failure, non-transverse corner).
struct numeric_error : error {
  explicit numeric_error(const std::string& msg) : error(msg) {}
};

// Scenario file / CSV parse problems.
struct parse_error : error {
  explicit parse_error(const std::string& msg) : error(msg) {}
};

constexpr double kPi = 3.14159265358979323846;

}  // namespace holo
