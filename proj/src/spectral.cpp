#include "mgcnn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mgcnn {

namespace {

void check_weights(const Matrix& w) {
  if (w.rows() != w.cols()) throw DataError("weight matrix must be square");
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      const double v = w(i, j);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw DataError("weight matrix entry (" + std::to_string(i) + ", " + std::to_string(j) +
                        ") is negative or not finite");
      }
    }
    if (w(i, i) != 0.0) throw DataError("weight matrix must have a zero diagonal");
  }
}

}  // namespace

Vector degree_vector(const Matrix& weights) {
  check_weights(weights);
  const Matrix sym = 0.5 * (weights + weights.transpose());
  return sym.rowwise().sum();
}

NormalizedLaplacian normalized_laplacian(const Matrix& weights, long timestep) {
  const Vector degree = degree_vector(weights);
  const Eigen::Index n = weights.rows();
  Vector inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    inv_sqrt(i) = degree(i) > 0.0 ? 1.0 / std::sqrt(degree(i)) : 0.0;
  }
  NormalizedLaplacian out;
  out.source_timestep = timestep;
  out.matrix = Matrix::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w = 0.5 * (weights(i, j) + weights(j, i));
      if (w != 0.0) out.matrix(i, j) = -inv_sqrt(i) * w * inv_sqrt(j);
    }
  }
  return out;
}

double largest_eigenvalue(const NormalizedLaplacian& laplacian, double tolerance,
                          int max_iterations, Warnings* warnings) {
  if (!(tolerance > 0.0)) throw DataError("eigenvalue tolerance must be positive");
  const Matrix& l = laplacian.matrix;
  const Eigen::Index n = l.rows();
  if (n == 0) throw DataError("empty Laplacian");

  // Deterministic start vector with no special structure.
  Vector v(n);
  std::uint64_t state = 0x9E3779B97F4A7C15ull;
  for (Eigen::Index i = 0; i < n; ++i) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    v(i) = 0.5 + static_cast<double>(state >> 11) * 0x1.0p-53;
  }
  v.normalize();

  const Matrix shifted = l + 2.0 * Matrix::Identity(n, n);
  double mu = v.dot(shifted * v);
  double prev_delta = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    Vector next = shifted * v;
    const double norm = next.norm();
    if (norm == 0.0) break;
    v = next / norm;
    const Vector av = shifted * v;
    const double next_mu = v.dot(av);
    const double residual = (av - next_mu * v).norm();
    const double delta = std::abs(next_mu - mu);
    mu = next_mu;
    if (residual <= tolerance) return std::clamp(mu - 2.0, 1e-12, 2.0);
    // Rayleigh quotient error decays geometrically; estimate the remaining
    // error from the observed contraction ratio of successive changes.
    if (it > 2 && prev_delta > 0.0) {
      const double ratio = delta / prev_delta;
      if (ratio < 1.0 && delta * ratio / (1.0 - ratio) < 0.01 * tolerance) {
        return std::clamp(mu - 2.0, 1e-12, 2.0);
      }
    }
    prev_delta = delta;
  }
  warn(warnings, "power iteration did not converge for timestep " +
                     std::to_string(laplacian.source_timestep) + "; using lambda_max = 2");
  return 2.0;
}

ScaledLaplacian ScaledLaplacian::from_matrix(Matrix m, double lambda_max) {
  if (m.rows() != m.cols()) throw DataError("scaled Laplacian must be square");
  ScaledLaplacian out;
  out.lambda_max = lambda_max;
  out.matrix = std::move(m);
  out.sparse = out.matrix.sparseView();
  out.sparse.makeCompressed();
  return out;
}

ScaledLaplacian scale_laplacian(const NormalizedLaplacian& laplacian, double lambda_max) {
  if (!(lambda_max > 0.0)) throw DataError("lambda_max must be positive");
  const Eigen::Index n = laplacian.matrix.rows();
  ScaledLaplacian out;
  out.lambda_max = lambda_max;
  out.source_timestep = laplacian.source_timestep;
  out.matrix = (2.0 / lambda_max) * laplacian.matrix - Matrix::Identity(n, n);
  out.sparse = out.matrix.sparseView();
  out.sparse.makeCompressed();
  return out;
}

ScaledLaplacian scaled_laplacian_from_weights(const Matrix& weights, long timestep,
                                              const SpectralOptions& options, Warnings* warnings) {
  Matrix w = weights;
  if (options.weight_transform == WeightTransform::Inverse) {
    w = weights.unaryExpr([](double x) { return x > 0.0 ? 1.0 / x : 0.0; });
  }
  const NormalizedLaplacian l = normalized_laplacian(w, timestep);
  const double lambda = options.fixed_lambda_max
                            ? *options.fixed_lambda_max
                            : largest_eigenvalue(l, options.tolerance, options.max_iterations, warnings);
  return scale_laplacian(l, lambda);
}

std::vector<Matrix> chebyshev_basis(const ScaledLaplacian& scaled, const Matrix& x, int order) {
  if (order < 1) throw DataError("Chebyshev order K must be >= 1");
  if (x.rows() != scaled.size()) throw DataError("signal rows do not match Laplacian size");
  std::vector<Matrix> out;
  out.reserve(order);
  out.push_back(x);
  if (order > 1) out.push_back(scaled.sparse * x);
  for (int k = 2; k < order; ++k) {
    out.push_back(2.0 * (scaled.sparse * out[k - 1]) - out[k - 2]);
  }
  return out;
}

Matrix chebyshev_combine(const ScaledLaplacian& scaled, std::span<const Matrix> coefficients) {
  const int order = static_cast<int>(coefficients.size());
  if (order < 1) throw DataError("Chebyshev order K must be >= 1");
  if (order == 1) return coefficients[0];
  // b_k = C_k + 2 L~ b_{k+1} - b_{k+2}, then S = C_0 + L~ b_1 - b_2.
  Matrix next = Matrix::Zero(coefficients[0].rows(), coefficients[0].cols());  // b_{k+2}
  Matrix cur = coefficients[order - 1];                                          // b_{k+1}
  for (int k = order - 2; k >= 1; --k) {
    Matrix b = coefficients[k] + 2.0 * (scaled.sparse * cur) - next;
    next = std::move(cur);
    cur = std::move(b);
  }
  return coefficients[0] + scaled.sparse * cur - next;
}

}  // namespace mgcnn
