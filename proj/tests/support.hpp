#pragma once

#include "mgcnn/common.hpp"
#include "mgcnn/dataset.hpp"
#include "mgcnn/model.hpp"
#include "mgcnn/topology.hpp"

#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace mgcnn::test {

/// Nonnegative weights with a zero diagonal and a random sparsity pattern
/// (symmetric pattern, asymmetric values).
inline Matrix random_weights(int n, std::mt19937_64& rng, double density = 0.6) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> w(0.5, 500.0);
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (u(rng) < density) {
        m(i, j) = w(rng);
        m(j, i) = w(rng);
      }
    }
  }
  return m;
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
  return m;
}

/// Owns m random snapshots and one window over them.
struct ToyWindow {
  std::vector<GraphSnapshot> snapshots;
  MultiGraphWindow window;

  ToyWindow(int n, int features, int m, std::mt19937_64& rng) {
    for (int t = 0; t < m; ++t) {
      GraphSnapshot s;
      s.timestep = t;
      s.weights = random_weights(n, rng, 0.8);
      s.node_features = random_matrix(n, features, rng);
      snapshots.push_back(std::move(s));
    }
    window.snapshots = snapshots;
    window.lookback = m;
    window.horizon = 1;
    window.target = random_matrix(n, kMovements, rng);
  }
  ToyWindow(const ToyWindow&) = delete;
};

/// A hand-built window dataset over a chain corridor with random weights and
/// features. `target(t)` gives the n x 12 target at minute t.
inline WindowDataset toy_dataset(int n, int features, long minutes, int lookback, int horizon,
                                 std::mt19937_64& rng, const std::function<Matrix(long)>& target) {
  WindowDataset d;
  d.first_minute = 0;
  d.total_minutes = minutes;
  d.lookback = lookback;
  d.horizon = horizon;
  d.features = features;
  std::uniform_real_distribution<double> w(5.0, 40.0);
  for (long t = 0; t < minutes; ++t) {
    GraphSnapshot s;
    s.timestep = t;
    s.weights = Matrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
      s.weights(i, i + 1) = w(rng);
      s.weights(i + 1, i) = w(rng);
    }
    s.node_features = random_matrix(n, features, rng);
    d.laplacians.push_back(scaled_laplacian_from_weights(s.weights, t));
    d.snapshots.push_back(std::move(s));
    d.targets.push_back(target(t));
    d.raw_counts.push_back(d.targets.back());
    d.day_class.push_back(1);
  }
  d.windows = stack_window(d.snapshots, lookback, horizon, d.targets);
  return d;
}

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("mgcnn-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace mgcnn::test
