#ifndef CKPZ_TYPES_HPP
#define CKPZ_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ckpz {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr const char* artifact_version = "ckpz 0.1.0";

// Thrown on numerical failures: singular matrices, Cholesky breakdown,
// lattice-sum truncation that never converges. CLI maps these to exit 3.
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on config-file schema violations. CLI maps these to exit 2.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ckpz

#endif  // CKPZ_TYPES_HPP
