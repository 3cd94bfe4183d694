#include "mgcnn/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace mgcnn {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void append(std::vector<double>& out, const Matrix& m) {
  out.insert(out.end(), m.data(), m.data() + m.size());
}

}  // namespace

const char* to_string(UnitSpace s) { return s == UnitSpace::Raw ? "raw" : "normalized"; }

MetricsReport compute_metrics(std::span<const double> predicted, std::span<const double> truth,
                              UnitSpace space) {
  if (predicted.size() != truth.size()) {
    throw DataError("compute_metrics: " + std::to_string(predicted.size()) + " predictions vs " +
                    std::to_string(truth.size()) + " true values");
  }
  if (truth.empty()) throw DataError("compute_metrics: empty input");
  MetricsReport r;
  r.unit_space = space;
  r.sample_count = truth.size();
  double sq = 0.0;
  double abs = 0.0;
  double pct = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double e = truth[i] - predicted[i];
    sq += e * e;
    abs += std::abs(e);
    if (truth[i] == 0.0) {
      ++r.excluded_zero_count;
    } else {
      pct += std::abs(e / truth[i]);
    }
  }
  const double n = static_cast<double>(truth.size());
  r.mse = sq / n;
  r.rmse = std::sqrt(r.mse);
  r.mae = abs / n;
  const std::size_t kept = r.sample_count - r.excluded_zero_count;
  r.mape_defined = kept > 0;
  r.mape = r.mape_defined ? 100.0 * pct / static_cast<double>(kept) : std::nan("");
  return r;
}

Matrix persistence_baseline(const MultiGraphWindow& window) {
  if (window.snapshots.empty()) throw DataError("persistence baseline needs a nonempty window");
  const Matrix& last = window.snapshots.back().node_features;
  if (last.cols() < kMovements) throw DataError("snapshot features do not include the 12 counts");
  return last.leftCols(kMovements);
}

HistoricalAverageBaseline::HistoricalAverageBaseline(const WindowDataset& dataset,
                                                     std::span<const std::size_t> train_indices)
    : nodes_(dataset.node_count()),
      sum_(2 * kMinutesPerDay, Matrix::Zero(dataset.node_count(), kMovements)),
      count_(2 * kMinutesPerDay, 0) {
  for (int c = 0; c < 2; ++c) class_sum_[c] = Matrix::Zero(nodes_, kMovements);
  for (std::size_t idx : train_indices) {
    const auto& w = dataset.windows[idx];
    const std::size_t pos = dataset.target_position(w);
    const int cls = dataset.day_class[pos];
    const long minute_of_day = ((w.target_minute() % kMinutesPerDay) + kMinutesPerDay) % kMinutesPerDay;
    const std::size_t cell = static_cast<std::size_t>(cls * kMinutesPerDay + minute_of_day);
    sum_[cell] += dataset.raw_counts[pos];
    ++count_[cell];
    class_sum_[cls] += dataset.raw_counts[pos];
    ++class_count_[cls];
  }
}

Matrix HistoricalAverageBaseline::predict(int minute_of_day, int day_class, bool* fallback) const {
  if (minute_of_day < 0 || minute_of_day >= kMinutesPerDay || (day_class != 0 && day_class != 1)) {
    throw DataError("historical average: cell out of range");
  }
  const std::size_t cell = static_cast<std::size_t>(day_class * kMinutesPerDay + minute_of_day);
  if (count_[cell] > 0) {
    if (fallback) *fallback = false;
    return sum_[cell] / static_cast<double>(count_[cell]);
  }
  if (fallback) *fallback = true;
  if (class_count_[day_class] > 0) return class_sum_[day_class] / static_cast<double>(class_count_[day_class]);
  const int other = 1 - day_class;
  if (class_count_[other] > 0) return class_sum_[other] / static_cast<double>(class_count_[other]);
  return Matrix::Zero(nodes_, kMovements);
}

ModelEvaluation evaluate_model(const WindowDataset& dataset, const TrainTestSplit& split,
                               const ModelParams& params, int threads) {
  const auto predictions = predict(dataset, split.test, params, threads);
  const HistoricalAverageBaseline ha(dataset, split.train);

  std::vector<double> truth_n, truth_r, model_n, model_r, pers_n, pers_r, ha_n, ha_r;
  ModelEvaluation ev;
  for (std::size_t j = 0; j < split.test.size(); ++j) {
    const auto& w = dataset.windows[split.test[j]];
    const std::size_t pos = dataset.target_position(w);
    const std::size_t last = pos - static_cast<std::size_t>(w.horizon);
    append(truth_n, w.target);
    append(truth_r, dataset.raw_counts[pos]);
    append(model_n, predictions[j]);
    append(model_r, dataset.denormalize_counts(predictions[j]));
    append(pers_n, persistence_baseline(w));
    append(pers_r, dataset.raw_counts[last]);

    bool fb = false;
    const long minute_of_day = ((w.target_minute() % kMinutesPerDay) + kMinutesPerDay) % kMinutesPerDay;
    const Matrix ha_raw = ha.predict(static_cast<int>(minute_of_day), dataset.day_class[pos], &fb);
    if (fb) ++ev.historical_fallbacks;
    Matrix ha_norm = ha_raw;
    for (Eigen::Index v = 0; v < ha_norm.rows(); ++v) {
      const auto& s = dataset.target_stats[v];
      for (int m = 0; m < kMovements; ++m) {
        ha_norm(v, m) = (ha_norm(v, m) - s.mean[m]) / (s.passthrough[m] ? 1.0 : s.stddev[m]);
      }
    }
    append(ha_r, ha_raw);
    append(ha_n, ha_norm);
    for (Eigen::Index i = 0; i < w.target.size(); ++i) ev.minutes.push_back(w.target_minute());
  }
  auto tag = [&](MetricsReport r) {
    r.lookback = dataset.lookback;
    r.horizon = dataset.horizon;
    return r;
  };
  ev.model_raw = tag(compute_metrics(model_r, truth_r, UnitSpace::Raw));
  ev.model_normalized = tag(compute_metrics(model_n, truth_n, UnitSpace::Normalized));
  ev.persistence_raw = tag(compute_metrics(pers_r, truth_r, UnitSpace::Raw));
  ev.persistence_normalized = tag(compute_metrics(pers_n, truth_n, UnitSpace::Normalized));
  ev.historical_raw = tag(compute_metrics(ha_r, truth_r, UnitSpace::Raw));
  ev.historical_normalized = tag(compute_metrics(ha_n, truth_n, UnitSpace::Normalized));
  ev.truth_raw = std::move(truth_r);
  ev.model_raw_values = std::move(model_r);
  return ev;
}

namespace {

SweepRow run_one(const PreparedCorridor& corridor, int lookback, int horizon, const SweepOptions& options,
                 Warnings* warnings) {
  WindowDataset ds = assemble(corridor, lookback, horizon, warnings);
  const auto split = split_train_test(ds, corridor.config.train_days, corridor.config.total_days);
  ModelConfig mc = options.model;
  mc.nodes = ds.node_count();
  mc.features = ds.features;
  mc.lookback = lookback;
  auto trained = train(ds, split.train, mc, options.train);
  const auto ev = evaluate_model(ds, split, trained.params, options.train.threads);
  SweepRow row;
  row.lookback = lookback;
  row.horizon = horizon;
  row.raw = ev.model_raw;
  row.normalized = ev.model_normalized;
  row.history = std::move(trained.history);
  return row;
}

}  // namespace

namespace {

// Configurations train in parallel with one thread each. Training does not
// depend on the thread count, so rows match a sequential sweep exactly.
std::vector<SweepRow> run_sweep(const PreparedCorridor& corridor, const std::vector<std::pair<int, int>>& grid,
                                const SweepOptions& options, Warnings* warnings) {
  std::vector<SweepRow> rows(grid.size());
  std::vector<Warnings> local(grid.size());
  SweepOptions per = options;
  const int workers = std::min<int>(options.train.threads, static_cast<int>(grid.size()));
  if (workers > 1) per.train.threads = std::max(1, options.train.threads / workers);
  parallel_for(grid.size(), std::max(workers, 1), [&](std::size_t i) {
    rows[i] = run_one(corridor, grid[i].first, grid[i].second, per, &local[i]);
  });
  for (auto& w : local) {
    for (auto& msg : w) warn(warnings, std::move(msg));
  }
  return rows;
}

}  // namespace

std::vector<SweepRow> sweep_lookback(const PreparedCorridor& corridor, std::span<const int> lookbacks,
                                     int horizon, const SweepOptions& options, Warnings* warnings) {
  std::vector<std::pair<int, int>> grid;
  for (int m : lookbacks) grid.emplace_back(m, horizon);
  return run_sweep(corridor, grid, options, warnings);
}

std::vector<SweepRow> sweep_horizon(const PreparedCorridor& corridor, int lookback,
                                    std::span<const int> horizons, const SweepOptions& options,
                                    Warnings* warnings) {
  std::vector<std::pair<int, int>> grid;
  for (int n : horizons) grid.emplace_back(lookback, n);
  return run_sweep(corridor, grid, options, warnings);
}

std::string format_table(std::span<const SweepRow> rows, UnitSpace space) {
  std::ostringstream out;
  out << "unit space: " << to_string(space) << '\n';
  out << std::left << std::setw(6) << "M" << std::setw(6) << "N" << std::right << std::setw(12) << "MSE"
      << std::setw(12) << "RMSE" << std::setw(12) << "MAE" << std::setw(12) << "MAPE(%)" << '\n';
  out << std::fixed;
  for (const auto& row : rows) {
    const MetricsReport& r = space == UnitSpace::Raw ? row.raw : row.normalized;
    out << std::left << std::setw(6) << row.lookback << std::setw(6) << row.horizon << std::right
        << std::setprecision(4) << std::setw(12) << r.mse << std::setw(12) << r.rmse << std::setw(12) << r.mae;
    if (r.mape_defined) {
      out << std::setw(12) << std::setprecision(3) << r.mape;
    } else {
      out << std::setw(12) << "undefined";
    }
    out << '\n';
  }
  return out.str();
}

std::string format_report_record(const MetricsReport& r, const std::string& label) {
  std::ostringstream out;
  out << label << ',' << to_string(r.unit_space) << ',' << r.lookback << ',' << r.horizon << ',' << fmt(r.mse)
      << ',' << fmt(r.rmse) << ',' << fmt(r.mae) << ',' << (r.mape_defined ? fmt(r.mape) : "nan") << ','
      << r.sample_count << ',' << r.excluded_zero_count;
  return out.str();
}

std::string format_records(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "label,unit_space,lookback,horizon,mse,rmse,mae,mape,samples,excluded_zero\n";
  for (const auto& row : rows) {
    out << format_report_record(row.raw, "mgcnn") << '\n';
    out << format_report_record(row.normalized, "mgcnn") << '\n';
  }
  return out.str();
}

void export_series(std::span<const long> minutes, std::span<const double> truth,
                   std::span<const double> predicted, const std::filesystem::path& path) {
  if (minutes.size() != truth.size() || truth.size() != predicted.size()) {
    throw DataError("export_series: minute, truth, and prediction lengths differ");
  }
  std::vector<std::size_t> order(minutes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return minutes[a] < minutes[b]; });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "minute,truth,prediction\n";
  for (std::size_t i : order) out << minutes[i] << ',' << fmt(truth[i]) << ',' << fmt(predicted[i]) << '\n';
  if (!out) throw DataError("write failed for " + path.string());
}

std::vector<SeriesRow> read_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "minute,truth,prediction") throw DataError(path.string() + ": unexpected header");
  std::vector<SeriesRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    SeriesRow r{};
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) throw DataError(path.string() + ": malformed row");
    auto ok = [](std::string_view s, auto& v) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      return ec == std::errc{} && p == s.data() + s.size();
    };
    const std::string_view sv(line);
    if (!ok(sv.substr(0, c1), r.minute) || !ok(sv.substr(c1 + 1, c2 - c1 - 1), r.truth) ||
        !ok(sv.substr(c2 + 1), r.predicted)) {
      throw DataError(path.string() + ": malformed row '" + line + "'");
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace mgcnn
