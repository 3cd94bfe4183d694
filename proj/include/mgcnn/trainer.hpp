#pragma once

#include "mgcnn/dataset.hpp"
#include "mgcnn/model.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mgcnn {

struct TrainConfig {
  double learning_rate = 0.0007;
  double lr_decay_factor = 0.1;
  int lr_decay_every = 10;  // epochs
  int batch_size = 16;
  int epochs = 50;
  int early_stop_patience = 10;  // epochs without improvement; 0 disables
  double dropout_rate = 0.35;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 7;
  int threads = 1;

  void validate() const;
};

struct AdamState {
  ModelParams first_moment;
  ModelParams second_moment;
  long step = 0;

  AdamState() = default;
  explicit AdamState(const ModelConfig& config) : first_moment(config), second_moment(config) {}
};

struct TrainHistory {
  std::vector<double> loss;
  std::vector<double> learning_rate;
  std::vector<double> seconds;

  std::size_t epochs() const { return loss.size(); }
  /// Records `epoch,loss,lr,seconds`, one per line, with a header. Without
  /// seconds the text is identical across reruns of the same seed.
  std::string to_records(bool with_seconds = true) const;
};

/// Mean of squared elementwise differences.
double mse_loss(const Matrix& prediction, const Matrix& target);

/// One bias-corrected Adam update. Throws DataError on non-finite gradients.
void adam_step(ModelParams& params, const ModelGrads& grads, AdamState& state, double lr,
               const TrainConfig& config = {});

/// lr * factor^floor(epoch / every).
double lr_schedule(int epoch, const TrainConfig& config = {});

struct TrainTestSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Partitions windows by the day of their target minute: days [0, train_days)
/// train, day train_days .. total_days - 1 test.
TrainTestSplit split_train_test(const WindowDataset& dataset, int train_days = 19, int total_days = 20);

using EpochCallback = std::function<void(int epoch, double loss, double lr)>;

struct TrainResult {
  ModelParams params;
  TrainHistory history;
};

/// Adam over shuffled minibatches. Per-sample gradients are summed in index
/// order, so results do not depend on `threads`.
TrainResult train(const WindowDataset& dataset, std::span<const std::size_t> train_indices,
                  const ModelConfig& model_config, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

/// Eval-mode predictions (normalized space) for the given windows.
std::vector<Matrix> predict(const WindowDataset& dataset, std::span<const std::size_t> indices,
                            const ModelParams& params, int threads = 1);

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace mgcnn
