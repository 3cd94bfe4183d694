#pragma once

#include "mgcnn/common.hpp"

#include <Eigen/Sparse>

#include <optional>
#include <span>
#include <vector>

namespace mgcnn {

/// L = I - D^{-1/2} W_sym D^{-1/2}. Symmetric with spectrum in [0, 2].
struct NormalizedLaplacian {
  Matrix matrix;
  long source_timestep = 0;
};

/// L~ = 2 L / lambda_max - I. Spectrum in [-1, 1].
struct ScaledLaplacian {
  Matrix matrix;
  Eigen::SparseMatrix<double, Eigen::RowMajor> sparse;
  double lambda_max = 2.0;
  long source_timestep = 0;

  int size() const { return static_cast<int>(matrix.rows()); }

  /// Wraps an explicit matrix assumed to already have spectrum in [-1, 1].
  static ScaledLaplacian from_matrix(Matrix m, double lambda_max = 2.0);
};

enum class WeightTransform { Identity, Inverse };

struct SpectralOptions {
  WeightTransform weight_transform = WeightTransform::Identity;
  /// When set, lambda_max is fixed to this value instead of power iteration.
  std::optional<double> fixed_lambda_max;
  double tolerance = 1e-8;
  int max_iterations = 5000;
};

/// Row sums of the symmetrized weights (W + W^T) / 2.
Vector degree_vector(const Matrix& weights);

NormalizedLaplacian normalized_laplacian(const Matrix& weights, long timestep = 0);

/// Largest eigenvalue of L via power iteration on L + 2I. Falls back to the
/// analytic bound 2.0 (with a warning) when it does not converge.
double largest_eigenvalue(const NormalizedLaplacian& laplacian, double tolerance = 1e-8,
                          int max_iterations = 5000, Warnings* warnings = nullptr);

ScaledLaplacian scale_laplacian(const NormalizedLaplacian& laplacian, double lambda_max);

/// End to end: weights -> normalized -> lambda_max -> scaled.
ScaledLaplacian scaled_laplacian_from_weights(const Matrix& weights, long timestep,
                                              const SpectralOptions& options = {},
                                              Warnings* warnings = nullptr);

/// [T_0(L~)X, ..., T_{K-1}(L~)X] by the three-term recurrence.
std::vector<Matrix> chebyshev_basis(const ScaledLaplacian& scaled, const Matrix& x, int order);

/// sum_k T_k(L~) C_k via Clenshaw's recurrence. Because every T_k(L~) is
/// symmetric this is also the adjoint of chebyshev_basis.
Matrix chebyshev_combine(const ScaledLaplacian& scaled, std::span<const Matrix> coefficients);

}  // namespace mgcnn
