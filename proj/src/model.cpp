#include "mgcnn/model.hpp"

#include <cmath>
#include <random>
#include <string>

namespace mgcnn {

namespace {

Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }

Matrix relu_mask(const Matrix& x) {
  return x.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
}

// Writes [T_0(L~)X, ..., T_{K-1}(L~)X] into `rows` column block by block.
template <typename Block>
void write_basis(const ScaledLaplacian& scaled, const Matrix& x, int order, Block rows) {
  const auto c = x.cols();
  const auto basis = chebyshev_basis(scaled, x, order);
  for (int k = 0; k < order; ++k) rows.middleCols(k * c, c) = basis[k];
}

void check_window(const MultiGraphWindow& window, std::span<const ScaledLaplacian> laplacians,
                  const ModelParams& params) {
  const auto& cfg = params.config;
  if (window.snapshots.empty()) throw DataError("window has no snapshots");
  if (laplacians.size() != window.snapshots.size()) {
    throw DataError("laplacian count does not match window length");
  }
  if (static_cast<int>(window.snapshots.size()) != params.temporal_weights.cols()) {
    throw DataError("window has " + std::to_string(window.snapshots.size()) +
                    " snapshots but the model expects " +
                    std::to_string(params.temporal_weights.cols()));
  }
  const auto n = window.snapshots.front().node_features.rows();
  for (std::size_t t = 0; t < window.snapshots.size(); ++t) {
    const auto& x = window.snapshots[t].node_features;
    if (x.rows() != n || x.cols() != cfg.features) {
      throw DataError("snapshot feature shape (" + std::to_string(x.rows()) + ", " +
                      std::to_string(x.cols()) + ") does not match model (n, " +
                      std::to_string(cfg.features) + ")");
    }
    if (laplacians[t].size() != n) throw DataError("laplacian size does not match node count");
  }
}

}  // namespace

LayerParams::LayerParams(int order, int in_channels, int out_channels)
    : order(order),
      in_channels(in_channels),
      out_channels(out_channels),
      theta(Matrix::Zero(static_cast<Eigen::Index>(order) * in_channels, out_channels)) {
  if (order < 1) throw DataError("Chebyshev order K must be >= 1");
}

void ModelConfig::validate() const {
  if (features < 1) throw DataError("model needs at least one input feature");
  if (lookback < 1) throw DataError("lookback must be >= 1");
  if (order < 1) throw DataError("Chebyshev order K must be >= 1");
  if (hidden1 < 1 || hidden2 < 1 || outputs < 1) throw DataError("layer widths must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw DataError("dropout rate must be in [0, 1)");
}

ModelParams::ModelParams(const ModelConfig& cfg)
    : config(cfg),
      layer1(cfg.order, cfg.features, cfg.hidden1),
      layer2(cfg.order, cfg.hidden1, cfg.hidden2),
      temporal_weights(Matrix::Zero(cfg.hidden2, cfg.lookback)),
      dense_w(Matrix::Zero(cfg.hidden2, cfg.outputs)),
      dense_b(Vector::Zero(cfg.outputs)) {
  cfg.validate();
}

ModelParams ModelParams::initialize(const ModelConfig& cfg, std::uint64_t seed) {
  ModelParams p(cfg);
  std::mt19937_64 rng(seed);
  auto glorot = [&rng](Matrix& m, double fan_in, double fan_out) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = limit * dist(rng);
  };
  glorot(p.layer1.theta, cfg.order * cfg.features, cfg.hidden1);
  glorot(p.layer2.theta, cfg.order * cfg.hidden1, cfg.hidden2);
  p.temporal_weights.setConstant(1.0 / cfg.lookback);
  glorot(p.dense_w, cfg.hidden2, cfg.outputs);
  return p;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t total = 0;
  for_each_tensor([&](std::span<const double> t) { total += t.size(); });
  return total;
}

void ModelParams::set_zero() {
  for_each_tensor([](std::span<double> t) { std::fill(t.begin(), t.end(), 0.0); });
}

void ModelParams::add_scaled(const ModelParams& other, double scale) {
  layer1.theta += scale * other.layer1.theta;
  layer2.theta += scale * other.layer2.theta;
  temporal_weights += scale * other.temporal_weights;
  dense_w += scale * other.dense_w;
  dense_b += scale * other.dense_b;
}

Matrix cheb_conv_linear(const ScaledLaplacian& scaled, const Matrix& x, const LayerParams& params) {
  if (x.cols() != params.in_channels) {
    throw DataError("cheb_conv input has " + std::to_string(x.cols()) + " channels, filter expects " +
                    std::to_string(params.in_channels));
  }
  Matrix basis(x.rows(), static_cast<Eigen::Index>(params.order) * params.in_channels);
  write_basis(scaled, x, params.order, basis.leftCols(basis.cols()));
  return basis * params.theta;
}

Matrix cheb_conv(const ScaledLaplacian& scaled, const Matrix& x, const LayerParams& params) {
  return relu(cheb_conv_linear(scaled, x, params));
}

Matrix temporal_fuse(std::span<const Matrix> stack, const Matrix& weights) {
  if (stack.empty()) throw DataError("temporal_fuse needs a nonempty stack");
  const auto m = static_cast<Eigen::Index>(stack.size());
  if (weights.cols() != m) {
    throw DataError("temporal weight length " + std::to_string(weights.cols()) +
                    " does not match stack depth " + std::to_string(m));
  }
  const auto channels = stack.front().cols();
  if (weights.rows() != channels) throw DataError("temporal weights need one kernel per channel");
  Matrix out = Matrix::Zero(stack.front().rows(), channels);
  for (Eigen::Index t = 0; t < m; ++t) {
    out += stack[t] * weights.col(t).asDiagonal();
  }
  return out;
}

DropoutResult dropout(const Matrix& x, double rate, std::uint64_t seed, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) throw DataError("dropout rate must be in [0, 1)");
  DropoutResult r;
  r.mask = Matrix::Ones(x.rows(), x.cols());
  if (training && rate > 0.0) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution keep(1.0 - rate);
    const double scale = 1.0 / (1.0 - rate);
    for (Eigen::Index i = 0; i < r.mask.size(); ++i) r.mask.data()[i] = keep(rng) ? scale : 0.0;
  }
  r.output = x.cwiseProduct(r.mask);
  return r;
}

Matrix dense(const Matrix& x, const Matrix& w, const Vector& b) {
  if (x.cols() != w.rows() || w.cols() != b.size()) throw DataError("dense layer shape mismatch");
  Matrix out = x * w;
  out.rowwise() += b.transpose();
  return out;
}

ForwardResult forward(const MultiGraphWindow& window, std::span<const ScaledLaplacian> laplacians,
                      const ModelParams& params, Mode mode, std::uint64_t seed) {
  check_window(window, laplacians, params);
  const auto& cfg = params.config;
  const int m = static_cast<int>(window.snapshots.size());
  const auto n = window.snapshots.front().node_features.rows();
  const int k = cfg.order;

  ForwardTrace tr;
  tr.seed = seed;
  tr.timesteps = m;
  tr.nodes = static_cast<int>(n);

  tr.basis1.resize(m * n, static_cast<Eigen::Index>(k) * cfg.features);
  for (int t = 0; t < m; ++t) {
    write_basis(laplacians[t], window.snapshots[t].node_features, k, tr.basis1.middleRows(t * n, n));
  }
  tr.pre1.noalias() = tr.basis1 * params.layer1.theta;
  const Matrix hidden1 = relu(tr.pre1);

  tr.basis2.resize(m * n, static_cast<Eigen::Index>(k) * cfg.hidden1);
  for (int t = 0; t < m; ++t) {
    write_basis(laplacians[t], Matrix(hidden1.middleRows(t * n, n)), k, tr.basis2.middleRows(t * n, n));
  }
  tr.pre2.noalias() = tr.basis2 * params.layer2.theta;

  tr.fused = Matrix::Zero(n, cfg.hidden2);
  for (int t = 0; t < m; ++t) {
    tr.fused += relu(tr.pre2.middleRows(t * n, n)) * params.temporal_weights.col(t).asDiagonal();
  }

  auto drop = dropout(tr.fused, cfg.dropout_rate, seed, mode == Mode::Train);
  tr.mask = std::move(drop.mask);
  tr.dropped = std::move(drop.output);

  ForwardResult result;
  result.predictions = dense(tr.dropped, params.dense_w, params.dense_b);
  if (mode == Mode::Train) result.trace = std::move(tr);
  return result;
}

ForwardResult forward(const MultiGraphWindow& window, const ModelParams& params, Mode mode,
                      std::uint64_t seed, const SpectralOptions& spectral) {
  std::vector<ScaledLaplacian> laplacians;
  laplacians.reserve(window.snapshots.size());
  for (const auto& s : window.snapshots) {
    laplacians.push_back(scaled_laplacian_from_weights(s.weights, s.timestep, spectral));
  }
  return forward(window, laplacians, params, mode, seed);
}

double accumulate_gradients(const MultiGraphWindow& window,
                            std::span<const ScaledLaplacian> laplacians, const ModelParams& params,
                            const Matrix& target, const ForwardResult& forward_result,
                            ModelGrads& grads, double scale) {
  if (!forward_result.trace) throw InvariantError("gradients need a training-mode forward trace");
  const ForwardTrace& tr = *forward_result.trace;
  const auto& cfg = params.config;
  const int m = tr.timesteps;
  const Eigen::Index n = tr.nodes;
  if (m != static_cast<int>(window.snapshots.size()) || n != target.rows() ||
      tr.pre1.cols() != cfg.hidden1 || tr.pre2.cols() != cfg.hidden2 ||
      tr.basis1.rows() != m * n) {
    throw InvariantError("forward trace is stale: shapes do not match window and parameters");
  }
  const Matrix& pred = forward_result.predictions;
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw DataError("target shape does not match predictions");
  }

  const Matrix diff = pred - target;
  const double elements = static_cast<double>(diff.size());
  const double loss = diff.squaredNorm() / elements;

  const Matrix d_out = (2.0 * scale / elements) * diff;
  grads.dense_w.noalias() += tr.dropped.transpose() * d_out;
  grads.dense_b += d_out.colwise().sum().transpose();

  const Matrix d_fused = (d_out * params.dense_w.transpose()).cwiseProduct(tr.mask);

  Matrix d_pre2(m * n, cfg.hidden2);
  for (int t = 0; t < m; ++t) {
    const auto pre = tr.pre2.middleRows(t * n, n);
    const Matrix h = relu(pre);
    grads.temporal_weights.col(t) += d_fused.cwiseProduct(h).colwise().sum().transpose();
    d_pre2.middleRows(t * n, n) =
        (d_fused * params.temporal_weights.col(t).asDiagonal()).cwiseProduct(relu_mask(pre));
  }
  grads.layer2.theta.noalias() += tr.basis2.transpose() * d_pre2;

  const Matrix d_basis2 = d_pre2 * params.layer2.theta.transpose();
  Matrix d_pre1(m * n, cfg.hidden1);
  std::vector<Matrix> blocks(cfg.order);
  for (int t = 0; t < m; ++t) {
    for (int k = 0; k < cfg.order; ++k) {
      blocks[k] = d_basis2.block(t * n, static_cast<Eigen::Index>(k) * cfg.hidden1, n, cfg.hidden1);
    }
    const Matrix d_hidden1 = chebyshev_combine(laplacians[t], blocks);
    d_pre1.middleRows(t * n, n) = d_hidden1.cwiseProduct(relu_mask(tr.pre1.middleRows(t * n, n)));
  }
  grads.layer1.theta.noalias() += tr.basis1.transpose() * d_pre1;
  return loss;
}

ModelGrads gradients(const MultiGraphWindow& window, std::span<const ScaledLaplacian> laplacians,
                     const ModelParams& params, const Matrix& target,
                     const ForwardResult& forward_result) {
  ModelGrads g(params.config);
  accumulate_gradients(window, laplacians, params, target, forward_result, g, 1.0);
  return g;
}

}  // namespace mgcnn
