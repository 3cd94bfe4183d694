#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mgcnn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Number of turning movements per intersection (4 bounds x 3 turns).
inline constexpr int kMovements = 12;
inline constexpr int kMinutesPerDay = 1440;

/// Input data or arguments failed validation. Maps to CLI exit code 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal invariant was breached. Maps to CLI exit code 70.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Non-fatal diagnostics collected by operations that may degrade gracefully.
/// When no sink is passed, warnings go to stderr.
using Warnings = std::vector<std::string>;

void warn(Warnings* sink, std::string message);

/// Throws InvariantError unless the matrix holds only finite values.
void require_finite(const Matrix& m, const char* what);

}  // namespace mgcnn
