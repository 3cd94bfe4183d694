#include "mgcnn/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace mgcnn {

namespace {

std::uint64_t sample_seed(std::uint64_t seed, int epoch, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  std::uint64_t out[1];
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  out[0] = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  return out[0];
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw DataError("learning rate must be positive");
  if (!(lr_decay_factor > 0.0)) throw DataError("learning rate decay factor must be positive");
  if (lr_decay_every < 1) throw DataError("learning rate decay interval must be >= 1 epoch");
  if (batch_size < 1) throw DataError("batch size must be >= 1");
  if (epochs < 0) throw DataError("epoch count must be >= 0");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw DataError("dropout rate must be in [0, 1)");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0 && adam_beta2 > 0.0 && adam_beta2 < 1.0)) {
    throw DataError("Adam betas must be in (0, 1)");
  }
  if (!(adam_eps > 0.0)) throw DataError("Adam epsilon must be positive");
  if (threads < 1) throw DataError("thread count must be >= 1");
}

std::string TrainHistory::to_records(bool with_seconds) const {
  std::ostringstream out;
  out << (with_seconds ? "epoch,loss,lr,seconds\n" : "epoch,loss,lr\n");
  for (std::size_t e = 0; e < loss.size(); ++e) {
    out << e + 1 << ',' << format_double(loss[e]) << ',' << format_double(learning_rate[e]);
    if (with_seconds) out << ',' << format_double(seconds[e]);
    out << '\n';
  }
  return out.str();
}

double mse_loss(const Matrix& prediction, const Matrix& target) {
  if (prediction.rows() != target.rows() || prediction.cols() != target.cols()) {
    throw DataError("mse_loss: shape mismatch");
  }
  if (prediction.size() == 0) throw DataError("mse_loss: empty input");
  return (prediction - target).squaredNorm() / static_cast<double>(prediction.size());
}

void adam_step(ModelParams& params, const ModelGrads& grads, AdamState& state, double lr,
               const TrainConfig& config) {
  if (!(lr > 0.0)) throw DataError("learning rate must be positive");
  if (state.first_moment.parameter_count() != params.parameter_count()) {
    state = AdamState(params.config);
  }
  bool finite = true;
  grads.for_each_tensor([&](std::span<const double> g) {
    for (double v : g) finite = finite && std::isfinite(v);
  });
  if (!finite) throw DataError("non-finite gradient at Adam step " + std::to_string(state.step + 1));

  ++state.step;
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));

  std::vector<std::span<double>> p, m, v;
  std::vector<std::span<const double>> g;
  params.for_each_tensor([&](std::span<double> t) { p.push_back(t); });
  state.first_moment.for_each_tensor([&](std::span<double> t) { m.push_back(t); });
  state.second_moment.for_each_tensor([&](std::span<double> t) { v.push_back(t); });
  grads.for_each_tensor([&](std::span<const double> t) { g.push_back(t); });
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (g[t].size() != p[t].size()) throw DataError("gradient shape does not match parameters");
    for (std::size_t i = 0; i < p[t].size(); ++i) {
      m[t][i] = b1 * m[t][i] + (1.0 - b1) * g[t][i];
      v[t][i] = b2 * v[t][i] + (1.0 - b2) * g[t][i] * g[t][i];
      const double m_hat = m[t][i] / c1;
      const double v_hat = v[t][i] / c2;
      p[t][i] -= lr * m_hat / (std::sqrt(v_hat) + config.adam_eps);
    }
  }
}

double lr_schedule(int epoch, const TrainConfig& config) {
  if (epoch < 0) throw DataError("epoch must be >= 0");
  return config.learning_rate * std::pow(config.lr_decay_factor, epoch / config.lr_decay_every);
}

TrainTestSplit split_train_test(const WindowDataset& dataset, int train_days, int total_days) {
  if (train_days < 1 || total_days <= train_days) throw DataError("need 1 <= train_days < total_days");
  const long available_days = dataset.total_minutes / kMinutesPerDay;
  if (available_days < total_days) {
    throw DataError("dataset covers " + std::to_string(available_days) + " full days, fewer than the " +
                    std::to_string(total_days) + " requested");
  }
  const long boundary = dataset.first_minute + static_cast<long>(train_days) * kMinutesPerDay;
  const long end = dataset.first_minute + static_cast<long>(total_days) * kMinutesPerDay;
  TrainTestSplit split;
  for (std::size_t i = 0; i < dataset.windows.size(); ++i) {
    const long t = dataset.windows[i].target_minute();
    if (t < boundary) {
      split.train.push_back(i);
    } else if (t < end) {
      split.test.push_back(i);
    }
  }
  if (split.train.empty()) throw DataError("train partition empty");
  if (split.test.empty()) throw DataError("test partition empty");
  return split;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

TrainResult train(const WindowDataset& dataset, std::span<const std::size_t> train_indices,
                  const ModelConfig& model_config, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  ModelConfig mc = model_config;
  mc.dropout_rate = config.dropout_rate;
  mc.validate();

  TrainResult result;
  result.params = ModelParams::initialize(mc, config.seed);
  if (config.epochs == 0) return result;
  if (train_indices.empty()) throw DataError("train set is empty");

  ModelParams& params = result.params;
  AdamState adam(mc);
  std::vector<std::size_t> order(train_indices.begin(), train_indices.end());
  std::mt19937_64 shuffle_rng(config.seed ^ 0x5DEECE66Dull);

  const std::size_t batch_cap = static_cast<std::size_t>(config.batch_size);
  std::vector<ModelGrads> sample_grads(batch_cap, ModelGrads(mc));
  std::vector<double> sample_loss(batch_cap, 0.0);
  ModelGrads batch_grads(mc);

  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    const double lr = lr_schedule(epoch, config);
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double loss_sum = 0.0;
    std::size_t batch_no = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch_cap, ++batch_no) {
      const std::size_t size = std::min(batch_cap, order.size() - begin);
      const double scale = 1.0 / static_cast<double>(size);
      parallel_for(size, config.threads, [&](std::size_t j) {
        const std::size_t idx = order[begin + j];
        const auto& w = dataset.windows[idx];
        const auto laps = dataset.laplacians_for(w);
        ModelGrads& g = sample_grads[j];
        g.set_zero();
        const auto fwd = forward(w, laps, params, Mode::Train, sample_seed(config.seed, epoch, idx));
        sample_loss[j] = accumulate_gradients(w, laps, params, w.target, fwd, g, scale);
      });
      batch_grads.set_zero();
      for (std::size_t j = 0; j < size; ++j) {
        batch_grads.add_scaled(sample_grads[j], 1.0);
        loss_sum += sample_loss[j];
      }
      if (!std::isfinite(loss_sum)) {
        throw DataError("training diverged (non-finite loss) at epoch " + std::to_string(epoch + 1) +
                        ", batch " + std::to_string(batch_no + 1));
      }
      adam_step(params, batch_grads, adam, lr, config);
    }
    const double epoch_loss = loss_sum / static_cast<double>(order.size());
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.history.loss.push_back(epoch_loss);
    result.history.learning_rate.push_back(lr);
    result.history.seconds.push_back(secs);
    if (on_epoch) on_epoch(epoch + 1, epoch_loss, lr);

    if (epoch_loss < best * (1.0 - 1e-3)) {
      best = epoch_loss;
      since_best = 0;
    } else if (config.early_stop_patience > 0 && ++since_best >= config.early_stop_patience) {
      break;
    }
  }
  return result;
}

std::vector<Matrix> predict(const WindowDataset& dataset, std::span<const std::size_t> indices,
                            const ModelParams& params, int threads) {
  std::vector<Matrix> out(indices.size());
  parallel_for(indices.size(), threads, [&](std::size_t j) {
    const auto& w = dataset.windows[indices[j]];
    out[j] = forward(w, dataset.laplacians_for(w), params, Mode::Eval).predictions;
  });
  return out;
}

}  // namespace mgcnn
