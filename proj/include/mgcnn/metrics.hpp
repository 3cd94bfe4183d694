#pragma once

#include "mgcnn/dataset.hpp"
#include "mgcnn/model.hpp"
#include "mgcnn/trainer.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mgcnn {

enum class UnitSpace { Normalized, Raw };

const char* to_string(UnitSpace s);

struct MetricsReport {
  int horizon = 0;
  int lookback = 0;
  double mse = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  double mape = 0.0;  // percent; meaningful only when mape_defined
  bool mape_defined = false;
  UnitSpace unit_space = UnitSpace::Raw;
  std::size_t sample_count = 0;
  std::size_t excluded_zero_count = 0;
};

/// MSE, RMSE, MAE, and MAPE pooled over all elements. MAPE skips elements
/// whose true value is 0 and counts them.
MetricsReport compute_metrics(std::span<const double> predicted, std::span<const double> truth,
                              UnitSpace space = UnitSpace::Raw);

/// Predicts the target at t + N as the counts observed at t (normalized
/// space: the first 12 features of the last snapshot).
Matrix persistence_baseline(const MultiGraphWindow& window);

/// Mean training count per (minute of day, day class, node, movement) cell.
class HistoricalAverageBaseline {
 public:
  HistoricalAverageBaseline(const WindowDataset& dataset, std::span<const std::size_t> train_indices);

  /// Raw-count prediction; `fallback` is set when the cell had no data and the
  /// class-wide mean was used.
  Matrix predict(int minute_of_day, int day_class, bool* fallback = nullptr) const;

 private:
  int nodes_ = 0;
  std::vector<Matrix> sum_;  // [class * 1440 + minute]
  std::vector<int> count_;
  Matrix class_sum_[2];
  int class_count_[2] = {0, 0};
};

struct ModelEvaluation {
  MetricsReport model_raw, model_normalized;
  MetricsReport persistence_raw, persistence_normalized;
  MetricsReport historical_raw, historical_normalized;
  std::size_t historical_fallbacks = 0;
  // Pooled raw-space series, ordered by (window, node, movement).
  std::vector<double> truth_raw, model_raw_values;
  std::vector<long> minutes;
};

ModelEvaluation evaluate_model(const WindowDataset& dataset, const TrainTestSplit& split,
                               const ModelParams& params, int threads = 1);

struct SweepRow {
  int lookback = 0;
  int horizon = 0;
  MetricsReport raw;
  MetricsReport normalized;
  TrainHistory history;
};

struct SweepOptions {
  ModelConfig model;
  TrainConfig train;
};

std::vector<SweepRow> sweep_lookback(const PreparedCorridor& corridor, std::span<const int> lookbacks,
                                     int horizon, const SweepOptions& options,
                                     Warnings* warnings = nullptr);
std::vector<SweepRow> sweep_horizon(const PreparedCorridor& corridor, int lookback,
                                    std::span<const int> horizons, const SweepOptions& options,
                                    Warnings* warnings = nullptr);

/// Aligned text table with columns M, N, MSE, RMSE, MAE, MAPE.
std::string format_table(std::span<const SweepRow> rows, UnitSpace space);
/// One comma-separated record per row and unit space, with a header line.
std::string format_records(std::span<const SweepRow> rows);
std::string format_report_record(const MetricsReport& r, const std::string& label);

/// Writes `minute,truth,prediction` lines sorted by minute.
void export_series(std::span<const long> minutes, std::span<const double> truth,
                   std::span<const double> predicted, const std::filesystem::path& path);

struct SeriesRow {
  long minute;
  double truth;
  double predicted;
};
std::vector<SeriesRow> read_series(const std::filesystem::path& path);

}  // namespace mgcnn
