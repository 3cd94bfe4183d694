#pragma once

#include "mgcnn/common.hpp"
#include "mgcnn/spectral.hpp"
#include "mgcnn/topology.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace mgcnn {

/// Chebyshev filter coefficients theta[k][i][o], stored as a
/// (K * c_in) x c_out matrix whose row k * c_in + i holds theta[k][i][:].
struct LayerParams {
  int order = 3;  // K
  int in_channels = 0;
  int out_channels = 0;
  Matrix theta;

  LayerParams() = default;
  LayerParams(int order, int in_channels, int out_channels);

  double& at(int k, int i, int o) { return theta(k * in_channels + i, o); }
  double at(int k, int i, int o) const { return theta(k * in_channels + i, o); }
};

struct ModelConfig {
  int nodes = 10;
  int features = 0;
  int lookback = 10;  // m, number of snapshots per window
  int order = 3;      // K for both graph convolution layers
  int hidden1 = 32;
  int hidden2 = 32;
  int outputs = kMovements;
  double dropout_rate = 0.35;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct ModelParams {
  ModelConfig config;
  LayerParams layer1;
  LayerParams layer2;
  Matrix temporal_weights;  // hidden2 x lookback; row ch is the kernel of channel ch
  Matrix dense_w;           // hidden2 x outputs
  Vector dense_b;           // outputs

  ModelParams() = default;
  /// Zero-initialized parameters with the shapes implied by `config`.
  explicit ModelParams(const ModelConfig& config);

  /// Glorot-uniform filters and dense weights, uniform temporal mean, zero bias.
  static ModelParams initialize(const ModelConfig& config, std::uint64_t seed);

  /// Visits every parameter tensor as a flat span, in a fixed order.
  template <typename Fn>
  void for_each_tensor(Fn&& fn) {
    fn(std::span<double>(layer1.theta.data(), layer1.theta.size()));
    fn(std::span<double>(layer2.theta.data(), layer2.theta.size()));
    fn(std::span<double>(temporal_weights.data(), temporal_weights.size()));
    fn(std::span<double>(dense_w.data(), dense_w.size()));
    fn(std::span<double>(dense_b.data(), dense_b.size()));
  }
  template <typename Fn>
  void for_each_tensor(Fn&& fn) const {
    fn(std::span<const double>(layer1.theta.data(), layer1.theta.size()));
    fn(std::span<const double>(layer2.theta.data(), layer2.theta.size()));
    fn(std::span<const double>(temporal_weights.data(), temporal_weights.size()));
    fn(std::span<const double>(dense_w.data(), dense_w.size()));
    fn(std::span<const double>(dense_b.data(), dense_b.size()));
  }

  std::size_t parameter_count() const;
  void set_zero();
  /// this += scale * other, tensor by tensor.
  void add_scaled(const ModelParams& other, double scale);
};

/// Gradients share the parameter layout.
using ModelGrads = ModelParams;

enum class Mode { Train, Eval };

/// Layer-1 convolution before activation, for every timestep at once.
Matrix cheb_conv_linear(const ScaledLaplacian& scaled, const Matrix& x, const LayerParams& params);

/// ReLU(sum_k T_k(L~) X theta_k).
Matrix cheb_conv(const ScaledLaplacian& scaled, const Matrix& x, const LayerParams& params);

/// out[v][ch] = sum_tau weights(ch, tau) * stack[tau](v, ch).
Matrix temporal_fuse(std::span<const Matrix> stack, const Matrix& weights);

struct DropoutResult {
  Matrix output;
  Matrix mask;  // 0 or 1 / (1 - rate); all ones in eval mode
};

/// Inverted dropout. Identity with an all-ones mask when not training.
DropoutResult dropout(const Matrix& x, double rate, std::uint64_t seed, bool training);

/// Node-wise shared dense map: X W + 1 b^T.
Matrix dense(const Matrix& x, const Matrix& w, const Vector& b);

/// Cached activations from a training-mode forward pass.
struct ForwardTrace {
  std::uint64_t seed = 0;
  int timesteps = 0;
  int nodes = 0;
  Matrix basis1;  // (m*n) x (K*F): stacked [T_k(L~_tau) X_tau]_k per timestep
  Matrix pre1;    // (m*n) x hidden1
  Matrix basis2;  // (m*n) x (K*hidden1)
  Matrix pre2;    // (m*n) x hidden2
  Matrix fused;   // n x hidden2
  Matrix mask;    // n x hidden2
  Matrix dropped; // n x hidden2
};

struct ForwardResult {
  Matrix predictions;  // n x outputs
  std::optional<ForwardTrace> trace;
};

/// Runs the network on one window. `laplacians` must align with
/// `window.snapshots`.
ForwardResult forward(const MultiGraphWindow& window, std::span<const ScaledLaplacian> laplacians,
                      const ModelParams& params, Mode mode, std::uint64_t seed = 0);

/// Convenience overload that derives each snapshot's scaled Laplacian.
ForwardResult forward(const MultiGraphWindow& window, const ModelParams& params, Mode mode,
                      std::uint64_t seed = 0, const SpectralOptions& spectral = {});

/// Gradient of mean((pred - target)^2) over all n * outputs elements,
/// accumulated into `grads` after scaling by `scale`. Returns the loss.
double accumulate_gradients(const MultiGraphWindow& window,
                            std::span<const ScaledLaplacian> laplacians, const ModelParams& params,
                            const Matrix& target, const ForwardResult& forward_result,
                            ModelGrads& grads, double scale = 1.0);

/// Fresh gradients for a single window.
ModelGrads gradients(const MultiGraphWindow& window, std::span<const ScaledLaplacian> laplacians,
                     const ModelParams& params, const Matrix& target,
                     const ForwardResult& forward_result);

}  // namespace mgcnn
