#pragma once

#include "mgcnn/common.hpp"
#include "mgcnn/schema.hpp"
#include "mgcnn/spectral.hpp"
#include "mgcnn/topology.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mgcnn {

/// One intersection's minute-by-minute telemetry in the 133-column layout.
/// `attributes` is attribute-major: row c is column c of the CSV.
struct RawIntersectionSeries {
  std::string intersection_id;
  long first_minute = 0;
  Matrix attributes;  // 133 x T

  long minutes() const { return static_cast<long>(attributes.cols()); }
};

/// The same series after dropping the occupancy measures (A1..A85).
struct AttributeSeries {
  std::string intersection_id;
  long first_minute = 0;
  Matrix attributes;  // 85 x T

  long minutes() const { return static_cast<long>(attributes.cols()); }
};

/// Per-attribute z-score parameters, fitted on minutes [fit_begin, fit_end).
struct NormalizationStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<bool> passthrough;  // zero variance: centered but not scaled
  long fit_begin = 0;
  long fit_end = 0;
};

struct CleanFeatureSeries {
  std::string intersection_id;
  long first_minute = 0;
  Matrix attributes;                    // F x T, cleaned, original units
  std::vector<int> kept_attribute_ids;  // indices into A1..A85 (0-based)
  NormalizationStats stats;             // aligned with kept_attribute_ids
  Matrix reduced;                       // 85 x T cleaned; source of speeds, counts, class
};

struct PipelineConfig {
  double collinearity_threshold = 0.8;
  long gap_limit = 60;
  int train_days = 19;
  int total_days = 20;
  double speed_floor_mph = 1.0;
  bool replace_outliers = true;
  SpectralOptions spectral;

  long train_end_minute(long first_minute) const {
    return first_minute + static_cast<long>(train_days) * kMinutesPerDay;
  }
};

/// Reads per-intersection CSVs (header `minute,intersection_id,<133 names>`).
/// Short gaps are filled: counts and arrivals with 0, other measures carried
/// forward. Gaps longer than `gap_limit` minutes are rejected.
std::vector<RawIntersectionSeries> ingest_csv(std::span<const std::filesystem::path> paths,
                                              long gap_limit = 60, Warnings* warnings = nullptr);

AttributeSeries drop_occupancy(const RawIntersectionSeries& series);

/// Pearson correlation between rows. Zero-variance rows correlate 0 with
/// everything (including themselves) and are reported in `zero_variance`.
Matrix correlation_matrix(const Matrix& attributes, std::vector<int>* zero_variance = nullptr);

/// Greedy collinearity pruning on a correlation matrix. Rows [0, target_count)
/// are protected. Returns kept indices in ascending order.
std::vector<int> select_collinear(const Matrix& correlation, double threshold, int target_count);

/// Prunes a series on the columns [0, fit_columns) (all when negative).
CleanFeatureSeries prune_collinear(const AttributeSeries& series, double threshold,
                                   long fit_columns = -1);

/// Type-7 (linear interpolation) quantile of unsorted data.
double quantile(std::span<const double> values, double q);

/// Replaces values outside [Q1 - 1.5 IQR, Q3 + 1.5 IQR] with the median.
/// Quartiles and median come from the first `fit_count` values (all when
/// negative); the fences are then applied to the whole series.
std::vector<double> iqr_outlier_replace(std::span<const double> series, int* replaced = nullptr,
                                        long fit_count = -1);

NormalizationStats fit_normalization(const Matrix& attributes, long first_minute, long fit_end_minute);

/// Z-scores each row. Rejects stats fitted beyond `train_end_minute`.
Matrix normalize(const Matrix& attributes, const NormalizationStats& stats, long train_end_minute);
Matrix denormalize(const Matrix& normalized, const NormalizationStats& stats);

/// A corridor ready for window assembly: one clean series per topology node,
/// in topology order, sharing a single kept-attribute set.
struct PreparedCorridor {
  CorridorTopology topology;
  std::vector<CleanFeatureSeries> series;
  std::vector<int> kept_attribute_ids;
  PipelineConfig config;
  long first_minute = 0;
  long minutes = 0;
  int outliers_replaced = 0;

  long train_end_minute() const { return config.train_end_minute(first_minute); }
};

/// Occupancy drop, outlier replacement, per-intersection pruning, majority
/// vote on the kept set, and normalization stats from training minutes.
PreparedCorridor prepare_corridor(const CorridorTopology& topology,
                                  std::span<const RawIntersectionSeries> raw,
                                  const PipelineConfig& config, Warnings* warnings = nullptr);

/// Replays a recorded kept set and stats instead of fitting them.
PreparedCorridor prepare_corridor_replay(const CorridorTopology& topology,
                                         std::span<const RawIntersectionSeries> raw,
                                         const PipelineConfig& config,
                                         const std::vector<int>& kept_attribute_ids,
                                         const std::vector<NormalizationStats>& stats);

/// Self-describing text record of a pipeline run.
std::string pipeline_manifest(const PreparedCorridor& corridor);

struct PipelineManifest {
  PipelineConfig config;
  std::vector<int> kept_attribute_ids;
  std::vector<std::string> intersection_ids;
  std::vector<NormalizationStats> stats;
};
PipelineManifest parse_pipeline_manifest(std::string_view text);

/// Loads `<dir>/topology.txt` and every `<dir>/*.csv`.
struct CorridorFiles {
  std::filesystem::path topology;
  std::vector<std::filesystem::path> csvs;
};
CorridorFiles find_corridor_files(const std::filesystem::path& data_dir);

}  // namespace mgcnn
