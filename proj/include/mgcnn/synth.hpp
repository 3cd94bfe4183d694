#pragma once

#include "mgcnn/pipeline.hpp"
#include "mgcnn/topology.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace mgcnn {

struct PeakWindow {
  int begin = 0;  // minute of day, inclusive
  int end = 0;    // minute of day, exclusive
  double multiplier = 1.0;
};

/// Synthetic corridor with diurnal double peaks, weekday/weekend classes, and
/// upstream-to-downstream coupling of thru traffic.
struct SynthConfig {
  int n_intersections = 10;
  int days = 20;
  std::uint64_t seed = 7;
  int start_weekday = 4;  // 0 = Monday; day 0 of the default corridor is a Friday

  /// Mean vehicles per minute, bound-major NB{L,T,R} SB EB WB.
  std::array<double, 12> base_volumes = {1, 2, 1, 1, 2, 1, 2, 8, 2, 2, 10, 2};
  PeakWindow morning{600, 840, 1.8};
  PeakWindow evening{1020, 1260, 2.0};
  double weekend_factor = 0.7;

  double count_dispersion = 0.1;     // sigma of the lognormal rate factor ahead of the Poisson draw
  double latent_sd = 0.5;            // stationary sigma of the per-intersection demand level
  double latent_corr_minutes = 90;   // e-folding time of the demand level
  double coupling = 0.5;             // share of upstream thru deviation passed downstream
  std::array<double, 3> free_flow_mph = {25, 35, 20};  // L, T, R
  double congestion = 0.5;
  double speed_noise_mph = 1.0;
  double outlier_rate = 0.0;         // fraction of count entries replaced by spikes
  double min_link_miles = 0.09;
  double max_link_miles = 0.18;

  void validate() const;
  /// No noise, no latent demand, no outliers: counts equal the profile.
  static SynthConfig noiseless(int n_intersections, int days, std::uint64_t seed);
};

struct SynthDataset {
  CorridorTopology topology;
  std::vector<RawIntersectionSeries> series;  // topology order
  int outliers_injected = 0;
};

/// Weekday (1) or weekend (0) for a 0-based day index.
int day_class(const SynthConfig& config, int day);

/// Noiseless mean count for a movement, rounded to whole vehicles.
double ground_truth_profile(const SynthConfig& config, int minute_of_day, int movement, int day_class = 1);

SynthDataset generate(const SynthConfig& config);

/// Writes `topology.txt` and one `<id>.csv` per intersection.
void write_dataset(const SynthDataset& data, const std::filesystem::path& out_dir);

/// The CSV text of a single intersection series.
std::string series_csv(const RawIntersectionSeries& series);

}  // namespace mgcnn
