#include "mgcnn/dataset.hpp"

#include <map>

namespace mgcnn {

Matrix WindowDataset::denormalize_counts(const Matrix& normalized) const {
  if (normalized.rows() != static_cast<Eigen::Index>(target_stats.size())) {
    throw DataError("prediction rows do not match node count");
  }
  Matrix out = normalized;
  for (Eigen::Index v = 0; v < out.rows(); ++v) {
    const auto& s = target_stats[v];
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      out(v, j) = out(v, j) * (s.passthrough[j] ? 1.0 : s.stddev[j]) + s.mean[j];
    }
  }
  return out;
}

WindowDataset assemble(const PreparedCorridor& corridor, int lookback, int horizon, Warnings* warnings) {
  const auto& topo = corridor.topology;
  const int n = topo.node_count();
  if (static_cast<int>(corridor.series.size()) != n) throw DataError("corridor series do not match topology");
  const auto& kept = corridor.kept_attribute_ids;
  for (int j = 0; j < kMovements; ++j) {
    if (j >= static_cast<int>(kept.size()) || kept[j] != j) {
      throw DataError("kept attribute set must start with the 12 count attributes");
    }
  }
  for (const auto& s : corridor.series) {
    if (s.kept_attribute_ids != kept) throw DataError("inconsistent kept attribute sets across intersections");
    if (s.first_minute != corridor.first_minute || s.attributes.cols() != corridor.minutes) {
      throw DataError("intersection " + s.intersection_id + " has a misaligned minute range");
    }
  }

  WindowDataset ds;
  ds.first_minute = corridor.first_minute;
  ds.total_minutes = corridor.minutes;
  ds.lookback = lookback;
  ds.horizon = horizon;
  ds.features = static_cast<int>(kept.size());
  const long train_end = corridor.train_end_minute();

  std::vector<Matrix> normalized;
  normalized.reserve(n);
  for (const auto& s : corridor.series) {
    normalized.push_back(normalize(s.attributes, s.stats, train_end));
    NormalizationStats ts;
    ts.fit_begin = s.stats.fit_begin;
    ts.fit_end = s.stats.fit_end;
    ts.mean.assign(s.stats.mean.begin(), s.stats.mean.begin() + kMovements);
    ts.stddev.assign(s.stats.stddev.begin(), s.stats.stddev.begin() + kMovements);
    ts.passthrough.assign(s.stats.passthrough.begin(), s.stats.passthrough.begin() + kMovements);
    ds.target_stats.push_back(std::move(ts));
  }

  const int eb_thru = schema::reduced_index(schema::Speed, schema::movement(schema::EB, schema::Thru));
  const int wb_thru = schema::reduced_index(schema::Speed, schema::movement(schema::WB, schema::Thru));

  const long total = corridor.minutes;
  ds.snapshots.reserve(total);
  ds.laplacians.reserve(total);
  ds.targets.reserve(total);
  ds.raw_counts.reserve(total);
  ds.day_class.reserve(total);
  std::map<Edge, double> speeds;
  for (long t = 0; t < total; ++t) {
    Matrix features(n, ds.features);
    Matrix target(n, kMovements);
    Matrix counts(n, kMovements);
    for (int v = 0; v < n; ++v) {
      features.row(v) = normalized[v].col(t).transpose();
      target.row(v) = normalized[v].col(t).head(kMovements).transpose();
      counts.row(v) = corridor.series[v].reduced.col(t).head(kMovements).transpose();
    }
    for (const Edge& e : topo.edges()) {
      const int row = topo.direction(e) == Direction::Forward ? eb_thru : wb_thru;
      speeds[e] = corridor.series[e.to].reduced(row, t);
    }
    const long minute = corridor.first_minute + t;
    ds.snapshots.push_back(
        build_snapshot(topo, minute, speeds, std::move(features), corridor.config.speed_floor_mph));
    ds.laplacians.push_back(
        scaled_laplacian_from_weights(ds.snapshots.back().weights, minute, corridor.config.spectral, warnings));
    ds.targets.push_back(std::move(target));
    ds.raw_counts.push_back(std::move(counts));
    ds.day_class.push_back(corridor.series[0].reduced(schema::kReducedClass, t) > 0.5 ? 1 : 0);
  }
  ds.windows = stack_window(ds.snapshots, lookback, horizon, ds.targets, warnings);
  return ds;
}

}  // namespace mgcnn
