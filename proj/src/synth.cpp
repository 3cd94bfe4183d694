#include "mgcnn/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>

namespace mgcnn {

namespace {

using namespace schema;

std::string node_name(int i) {
  std::string s = std::to_string(i + 1);
  return "I" + std::string(s.size() < 2 ? 2 - s.size() : 0, '0') + s;
}

double peak_multiplier(const SynthConfig& c, int minute_of_day) {
  if (minute_of_day >= c.morning.begin && minute_of_day < c.morning.end) return c.morning.multiplier;
  if (minute_of_day >= c.evening.begin && minute_of_day < c.evening.end) return c.evening.multiplier;
  return 1.0;
}

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t a, std::uint32_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), a, b};
  return std::mt19937_64(seq);
}

void append_number(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

void SynthConfig::validate() const {
  if (n_intersections < 2) throw DataError("synthetic corridor needs at least 2 intersections");
  if (days < 1) throw DataError("synthetic corridor needs at least 1 day");
  if (start_weekday < 0 || start_weekday > 6) throw DataError("start_weekday must be in [0, 6]");
  for (const PeakWindow* p : {&morning, &evening}) {
    if (p->begin < 0 || p->end > kMinutesPerDay || p->begin >= p->end) {
      throw DataError("peak windows must lie within [0, 1440)");
    }
    if (!(p->multiplier >= 1.0)) throw DataError("peak multipliers must be >= 1");
  }
  for (double b : base_volumes) {
    if (!(b >= 0.0)) throw DataError("base volumes must be nonnegative");
  }
  if (!(weekend_factor > 0.0)) throw DataError("weekend factor must be positive");
  if (count_dispersion < 0 || latent_sd < 0 || !(latent_corr_minutes > 0) || coupling < 0 || coupling > 1) {
    throw DataError("invalid noise or coupling parameters");
  }
  if (!(outlier_rate >= 0.0 && outlier_rate < 0.05)) throw DataError("outlier rate must be in [0, 0.05)");
  for (double f : free_flow_mph) {
    if (!(f > 1.0)) throw DataError("free-flow speeds must exceed 1 mph");
  }
  if (!(congestion >= 0.0 && congestion < 1.0)) throw DataError("congestion must be in [0, 1)");
  if (!(min_link_miles > 0.0 && max_link_miles >= min_link_miles)) throw DataError("invalid link length range");
}

SynthConfig SynthConfig::noiseless(int n_intersections, int days, std::uint64_t seed) {
  SynthConfig c;
  c.n_intersections = n_intersections;
  c.days = days;
  c.seed = seed;
  c.count_dispersion = 0.0;
  c.latent_sd = 0.0;
  c.outlier_rate = 0.0;
  c.speed_noise_mph = 0.0;
  return c;
}

int day_class(const SynthConfig& config, int day) {
  const int weekday = (config.start_weekday + day) % 7;
  return weekday >= 5 ? 0 : 1;
}

double ground_truth_profile(const SynthConfig& config, int minute_of_day, int movement, int cls) {
  if (minute_of_day < 0 || minute_of_day >= kMinutesPerDay) throw DataError("minute of day out of range");
  if (movement < 0 || movement >= kMovementCount) throw DataError("movement out of range");
  const double factor = cls == 1 ? 1.0 : config.weekend_factor;
  return std::round(config.base_volumes[movement] * peak_multiplier(config, minute_of_day) * factor);
}

SynthDataset generate(const SynthConfig& config) {
  config.validate();
  const int n = config.n_intersections;
  const long total = static_cast<long>(config.days) * kMinutesPerDay;

  SynthDataset out;
  {
    auto rng = stream(config.seed, 0xFFFFu, 0);
    std::uniform_real_distribution<double> len(config.min_link_miles, config.max_link_miles);
    std::vector<std::string> ids;
    std::vector<double> lengths;
    for (int i = 0; i < n; ++i) ids.push_back(node_name(i));
    for (int i = 0; i + 1 < n; ++i) lengths.push_back(std::round(len(rng) * 100.0) / 100.0);
    out.topology = CorridorTopology::chain(ids, lengths);
  }

  // Lag in minutes for thru traffic to reach the next intersection.
  std::vector<int> lag(std::max(n - 1, 1), 1);
  for (int i = 0; i + 1 < n; ++i) {
    const double secs = edge_weight(out.topology.link_length({i, i + 1}), config.free_flow_mph[Thru]);
    lag[i] = std::max(1, static_cast<int>(std::lround(secs / 60.0)));
  }

  std::vector<std::mt19937_64> rngs;
  for (int i = 0; i < n; ++i) rngs.push_back(stream(config.seed, static_cast<std::uint32_t>(i), 1));

  out.series.resize(n);
  for (int i = 0; i < n; ++i) {
    out.series[i].intersection_id = out.topology.node_ids()[i];
    out.series[i].first_minute = 0;
    out.series[i].attributes = Matrix::Zero(kRawWidth, total);
  }

  const double phi = std::exp(-1.0 / config.latent_corr_minutes);
  const double innovation = config.latent_sd * std::sqrt(1.0 - phi * phi);
  std::vector<double> latent(n, 0.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  {
    // Start each level from its stationary distribution.
    for (int i = 0; i < n; ++i) latent[i] = config.latent_sd * normal(rngs[i]);
  }

  double peak_cap[kMovementCount];
  for (int m = 0; m < kMovementCount; ++m) {
    const double top = std::max({config.morning.multiplier, config.evening.multiplier, 1.0});
    peak_cap[m] = std::max(1.0, 2.5 * config.base_volumes[m] * top);
  }

  const int eb_t = movement(EB, Thru);
  const int wb_t = movement(WB, Thru);
  for (long t = 0; t < total; ++t) {
    const int day = static_cast<int>(t / kMinutesPerDay);
    const int minute_of_day = static_cast<int>(t % kMinutesPerDay);
    const int cls = day_class(config, day);
    for (int i = 0; i < n; ++i) {
      auto& rng = rngs[i];
      Matrix& a = out.series[i].attributes;
      latent[i] = phi * latent[i] + innovation * normal(rng);
      const double level = std::exp(latent[i] - 0.5 * config.latent_sd * config.latent_sd);

      // Signal timing for the minute: main street (EB/WB) vs cross street.
      const double main_green =
          std::clamp(std::round(32.0 + 2.0 * normal(rng) * (config.count_dispersion > 0 ? 1.0 : 0.0)), 20.0, 44.0);
      const double cross_green = 52.0 - main_green;

      for (int m = 0; m < kMovementCount; ++m) {
        const double profile = ground_truth_profile(config, minute_of_day, m, cls);
        double value = profile * level;
        const int upstream = m == eb_t ? i - 1 : (m == wb_t ? i + 1 : -1);
        if (upstream >= 0 && upstream < n) {
          const int l = lag[std::min(i, upstream)];
          if (t >= l) {
            const long tu = t - l;
            const double up_profile = ground_truth_profile(
                config, static_cast<int>(tu % kMinutesPerDay), m,
                day_class(config, static_cast<int>(tu / kMinutesPerDay)));
            value += config.coupling * (out.series[upstream].attributes(raw_index(Count, m), tu) - up_profile);
          }
        }
        double count = std::max(0.0, value);
        if (config.count_dispersion > 0.0) {
          // Poisson-lognormal: variance exceeds the mean at every volume, so
          // low-volume movements keep a nondegenerate interquartile range.
          const double s = config.count_dispersion;
          std::poisson_distribution<int> arrivals(count * std::exp(s * normal(rng) - 0.5 * s * s));
          count = count > 0.0 ? arrivals(rng) : 0.0;
        } else {
          count = std::round(count);
        }
        a(raw_index(Count, m), t) = count;

        const int turn = m % 3;
        const double ff = config.free_flow_mph[turn];
        double speed = ff * (1.0 - config.congestion * std::min(1.0, count / peak_cap[m]));
        if (config.speed_noise_mph > 0.0) speed += config.speed_noise_mph * normal(rng);
        speed = std::clamp(std::round(speed * 10.0) / 10.0, 1.0, ff);
        a(raw_index(Speed, m), t) = speed;

        std::binomial_distribution<int> green_split(static_cast<int>(count), 0.55);
        const int green = config.count_dispersion > 0.0 ? green_split(rng)
                                                         : static_cast<int>(std::round(count * 0.55));
        const int remaining = static_cast<int>(count) - green;
        std::binomial_distribution<int> red_split(remaining, 0.4 / 0.45);
        const int red = config.count_dispersion > 0.0 ? red_split(rng)
                                                       : static_cast<int>(std::round(remaining * 0.4 / 0.45));
        a(raw_index(ArrGreen, m), t) = green;
        a(raw_index(ArrRed, m), t) = red;
        a(raw_index(ArrYellow, m), t) = remaining - red;

        const int bound = m / 3;
        const double phase_green = (bound == EB || bound == WB) ? main_green : cross_green;
        const double g = turn == Left ? std::round(0.3 * phase_green) : phase_green;
        a(raw_index(GreenTime, m), t) = g;
        a(raw_index(RedTime, m), t) = 56.0 - g;

        a(raw_index(Occupancy, m), t) = std::round(1.5 * count);
        a(raw_index(OccGreen, m), t) = 0.0;
        a(raw_index(OccRed, m), t) = 2.0 * red;
        a(raw_index(OccYellow, m), t) = 0.0;
      }
      a(kRawClass, t) = cls;
    }
  }

  if (config.outlier_rate > 0.0) {
    for (int i = 0; i < n; ++i) {
      auto rng = stream(config.seed, static_cast<std::uint32_t>(i), 2);
      std::bernoulli_distribution spike(config.outlier_rate);
      Matrix& a = out.series[i].attributes;
      for (int m = 0; m < kMovementCount; ++m) {
        auto row = a.row(raw_index(Count, m));
        // Any spike above 2.5x the clean maximum clears Q3 + 1.5 IQR, since
        // the spikes are too few to move Q3 above the clean maximum.
        const double value = 3.0 * row.maxCoeff() + 10.0;
        for (long t = 0; t < total; ++t) {
          if (spike(rng)) {
            row(t) = value;
            ++out.outliers_injected;
          }
        }
      }
    }
  }
  return out;
}

std::string series_csv(const RawIntersectionSeries& s) {
  std::string out;
  out.reserve(static_cast<std::size_t>(s.minutes()) * 420);
  out += "minute,intersection_id";
  for (int c = 0; c < kRawWidth; ++c) {
    out += ',';
    out += raw_name(c);
  }
  out += '\n';
  for (long t = 0; t < s.minutes(); ++t) {
    append_number(out, static_cast<double>(s.first_minute + t));
    out += ',';
    out += s.intersection_id;
    for (int c = 0; c < kRawWidth; ++c) {
      out += ',';
      append_number(out, s.attributes(c, t));
    }
    out += '\n';
  }
  return out;
}

void write_dataset(const SynthDataset& data, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw DataError("cannot write " + p.string());
    f << text;
    if (!f) throw DataError("write failed for " + p.string());
  };
  write(out_dir / "topology.txt", data.topology.to_text());
  for (const auto& s : data.series) write(out_dir / (s.intersection_id + ".csv"), series_csv(s));
}

}  // namespace mgcnn
