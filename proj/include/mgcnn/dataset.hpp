#pragma once

#include "mgcnn/common.hpp"
#include "mgcnn/pipeline.hpp"
#include "mgcnn/spectral.hpp"
#include "mgcnn/topology.hpp"

#include <span>
#include <vector>

namespace mgcnn {

/// Snapshots, their scaled Laplacians, and the windows over them. Windows
/// view into `snapshots`, so the dataset is move-only.
class WindowDataset {
 public:
  WindowDataset() = default;
  WindowDataset(WindowDataset&&) noexcept = default;
  WindowDataset& operator=(WindowDataset&&) noexcept = default;
  WindowDataset(const WindowDataset&) = delete;
  WindowDataset& operator=(const WindowDataset&) = delete;

  std::vector<GraphSnapshot> snapshots;      // one per minute position
  std::vector<ScaledLaplacian> laplacians;   // aligned with snapshots
  std::vector<Matrix> targets;               // normalized counts (n x 12) per minute position
  std::vector<Matrix> raw_counts;            // cleaned counts (n x 12) per minute position
  std::vector<int> day_class;                // 1 weekday, 0 weekend, per minute position
  std::vector<MultiGraphWindow> windows;
  std::vector<NormalizationStats> target_stats;  // per node, over A1..A12

  long first_minute = 0;
  long total_minutes = 0;
  int lookback = 0;
  int horizon = 0;
  int features = 0;

  int node_count() const { return snapshots.empty() ? 0 : static_cast<int>(snapshots[0].weights.rows()); }

  /// Position of a window's first snapshot in `snapshots`.
  std::size_t start_position(const MultiGraphWindow& w) const {
    return static_cast<std::size_t>(w.snapshots.data() - snapshots.data());
  }
  std::span<const ScaledLaplacian> laplacians_for(const MultiGraphWindow& w) const {
    return std::span<const ScaledLaplacian>(laplacians).subspan(start_position(w), w.snapshots.size());
  }
  std::size_t target_position(const MultiGraphWindow& w) const {
    return start_position(w) + w.snapshots.size() - 1 + static_cast<std::size_t>(w.horizon);
  }

  /// n x 12 predictions from normalized to raw-count space.
  Matrix denormalize_counts(const Matrix& normalized) const;
};

/// Builds per-minute snapshots (normalized kept attributes as node features,
/// travel-time weights from approach speeds) and stride-1 windows.
/// The speed of directed edge i -> j is the thru speed of the approach at j
/// that matches the direction of travel (EB for increasing node index).
WindowDataset assemble(const PreparedCorridor& corridor, int lookback, int horizon,
                       Warnings* warnings = nullptr);

}  // namespace mgcnn
