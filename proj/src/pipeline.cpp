#include "mgcnn/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace mgcnn {

namespace {

using schema::kRawWidth;
using schema::kReducedWidth;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct PendingSeries {
  std::vector<long> minutes;
  std::vector<double> values;  // row-major, kRawWidth per minute
  std::string source;
};

RawIntersectionSeries finish_series(const std::string& id, PendingSeries& p, long gap_limit,
                                    Warnings* warnings) {
  RawIntersectionSeries s;
  s.intersection_id = id;
  s.first_minute = p.minutes.front();
  const long span = p.minutes.back() - p.minutes.front() + 1;
  s.attributes.resize(kRawWidth, span);

  std::vector<long> filled;
  long col = 0;
  for (std::size_t r = 0; r < p.minutes.size(); ++r) {
    if (r > 0) {
      const long gap = p.minutes[r] - p.minutes[r - 1] - 1;
      if (gap > gap_limit) {
        throw DataError(p.source + ": gap of " + std::to_string(gap) + " minutes after minute " +
                        std::to_string(p.minutes[r - 1]) + " for intersection " + id +
                        " exceeds the limit of " + std::to_string(gap_limit));
      }
      for (long g = 0; g < gap; ++g, ++col) {
        filled.push_back(p.minutes[r - 1] + 1 + g);
        for (int c = 0; c < kRawWidth; ++c) {
          const auto m = schema::raw_measure(c);
          s.attributes(c, col) = (m && schema::is_count_like(*m)) ? 0.0 : s.attributes(c, col - 1);
        }
      }
    }
    for (int c = 0; c < kRawWidth; ++c) s.attributes(c, col) = p.values[r * kRawWidth + c];
    ++col;
  }
  if (!filled.empty()) {
    std::string list;
    for (std::size_t i = 0; i < filled.size(); ++i) {
      if (i > 0) list += ' ';
      list += std::to_string(filled[i]);
    }
    warn(warnings, p.source + ": filled " + std::to_string(filled.size()) +
                       " missing minutes for intersection " + id + ": " + list);
  }
  return s;
}

bool zero_variance(double mean, double sd) { return sd <= 1e-12 * std::max(1.0, std::abs(mean)); }

}  // namespace

std::vector<RawIntersectionSeries> ingest_csv(std::span<const std::filesystem::path> paths,
                                              long gap_limit, Warnings* warnings) {
  std::map<std::string, PendingSeries> pending;
  std::vector<std::string> order;

  for (const auto& path : paths) {
    const std::string text = read_file(path);
    std::string_view rest(text);
    long line_no = 0;
    std::vector<int> column_map;  // CSV field index -> raw column (or -1/-2 for minute/id)
    int minute_field = -1;
    int id_field = -1;

    while (!rest.empty()) {
      const auto nl = rest.find('\n');
      std::string_view line = rest.substr(0, nl);
      rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty()) continue;
      const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
      const auto fields = split_fields(line);

      if (column_map.empty()) {
        std::vector<bool> seen(kRawWidth, false);
        column_map.assign(fields.size(), -1);
        for (std::size_t f = 0; f < fields.size(); ++f) {
          if (fields[f] == "minute") {
            minute_field = static_cast<int>(f);
          } else if (fields[f] == "intersection_id") {
            id_field = static_cast<int>(f);
          } else if (auto c = schema::raw_index_of(fields[f])) {
            if (seen[*c]) throw DataError(where + "duplicate column '" + std::string(fields[f]) + "'");
            seen[*c] = true;
            column_map[f] = *c;
          } else {
            throw DataError(where + "unknown column '" + std::string(fields[f]) + "'");
          }
        }
        if (minute_field < 0 || id_field < 0) {
          throw DataError(where + "header must contain 'minute' and 'intersection_id'");
        }
        for (int c = 0; c < kRawWidth; ++c) {
          if (!seen[c]) throw DataError(where + "missing column '" + schema::raw_name(c) + "'");
        }
        continue;
      }

      if (fields.size() != column_map.size()) {
        throw DataError(where + "expected " + std::to_string(column_map.size()) + " fields, got " +
                        std::to_string(fields.size()));
      }
      long minute = 0;
      if (!parse_number(fields[minute_field], minute)) {
        throw DataError(where + "bad minute '" + std::string(fields[minute_field]) + "'");
      }
      const std::string id(fields[id_field]);
      if (id.empty()) throw DataError(where + "empty intersection_id");
      auto [it, inserted] = pending.try_emplace(id);
      PendingSeries& ps = it->second;
      if (inserted) {
        order.push_back(id);
        ps.source = path.string();
      }
      if (!ps.minutes.empty() && minute <= ps.minutes.back()) {
        throw DataError(where + "minute " + std::to_string(minute) + " is not after minute " +
                        std::to_string(ps.minutes.back()));
      }
      ps.minutes.push_back(minute);
      const std::size_t base = ps.values.size();
      ps.values.resize(base + kRawWidth);
      for (std::size_t f = 0; f < fields.size(); ++f) {
        const int c = column_map[f];
        if (c < 0) continue;
        double v = 0.0;
        if (!parse_number(fields[f], v) || !std::isfinite(v)) {
          throw DataError(where + "bad value '" + std::string(fields[f]) + "' in column " +
                          schema::raw_name(c));
        }
        const auto m = schema::raw_measure(c);
        if (m && v < 0.0) {
          throw DataError(where + "negative value in column " + schema::raw_name(c));
        }
        if (!m && v != 0.0 && v != 1.0) throw DataError(where + "class must be 0 or 1");
        ps.values[base + c] = v;
      }
    }
    if (column_map.empty()) throw DataError(path.string() + ": empty file");
  }

  std::vector<RawIntersectionSeries> out;
  for (const auto& id : order) {
    PendingSeries& ps = pending.at(id);
    if (ps.minutes.empty()) continue;
    out.push_back(finish_series(id, ps, gap_limit, warnings));
  }
  return out;
}

AttributeSeries drop_occupancy(const RawIntersectionSeries& series) {
  if (series.attributes.rows() != kRawWidth) {
    throw DataError("drop_occupancy expects " + std::to_string(kRawWidth) + " attributes, got " +
                    std::to_string(series.attributes.rows()));
  }
  AttributeSeries out;
  out.intersection_id = series.intersection_id;
  out.first_minute = series.first_minute;
  const int kept_measures = kReducedWidth - 1;
  out.attributes.resize(kReducedWidth, series.attributes.cols());
  out.attributes.topRows(kept_measures) = series.attributes.topRows(kept_measures);
  out.attributes.row(schema::kReducedClass) = series.attributes.row(schema::kRawClass);
  return out;
}

Matrix correlation_matrix(const Matrix& attributes, std::vector<int>* zero_variance_rows) {
  const auto f = attributes.rows();
  const auto t = attributes.cols();
  if (t < 2) throw DataError("correlation needs at least two observations");
  const Vector mean = attributes.rowwise().mean();
  const Matrix centered = attributes.colwise() - mean;
  const Matrix cov = centered * centered.transpose();
  Vector sd(f);
  std::vector<bool> flat(f, false);
  for (Eigen::Index i = 0; i < f; ++i) {
    sd(i) = std::sqrt(cov(i, i) / static_cast<double>(t));
    flat[i] = zero_variance(mean(i), sd(i));
    if (flat[i] && zero_variance_rows) zero_variance_rows->push_back(static_cast<int>(i));
  }
  Matrix r = Matrix::Zero(f, f);
  for (Eigen::Index i = 0; i < f; ++i) {
    if (flat[i]) continue;
    for (Eigen::Index j = 0; j < f; ++j) {
      if (flat[j]) continue;
      r(i, j) = std::clamp(cov(i, j) / std::sqrt(cov(i, i) * cov(j, j)), -1.0, 1.0);
    }
    r(i, i) = 1.0;
  }
  return r;
}

std::vector<int> select_collinear(const Matrix& correlation, double threshold, int target_count) {
  const int f = static_cast<int>(correlation.rows());
  struct Pair {
    double r;
    int a;
    int b;
  };
  std::vector<Pair> pairs;
  for (int a = target_count; a < f; ++a) {
    for (int b = a + 1; b < f; ++b) {
      const double r = std::abs(correlation(a, b));
      if (r >= threshold) pairs.push_back({r, a, b});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.r > y.r; });

  auto target_affinity = [&](int a) {
    double best = 0.0;
    for (int t = 0; t < std::min(target_count, f); ++t) best = std::max(best, std::abs(correlation(a, t)));
    return best;
  };
  std::vector<bool> kept(f, true);
  for (const Pair& p : pairs) {
    if (!kept[p.a] || !kept[p.b]) continue;
    const double ra = target_affinity(p.a);
    const double rb = target_affinity(p.b);
    // Drop the one less related to the targets; ties drop the higher index.
    const int drop = ra < rb ? p.a : (rb < ra ? p.b : std::max(p.a, p.b));
    kept[drop] = false;
  }
  std::vector<int> out;
  for (int i = 0; i < f; ++i) {
    if (kept[i]) out.push_back(i);
  }
  return out;
}

CleanFeatureSeries prune_collinear(const AttributeSeries& series, double threshold, long fit_columns) {
  const long cols = fit_columns < 0 ? series.minutes() : std::min(fit_columns, series.minutes());
  const Matrix corr = correlation_matrix(series.attributes.leftCols(cols));
  CleanFeatureSeries out;
  out.intersection_id = series.intersection_id;
  out.first_minute = series.first_minute;
  out.kept_attribute_ids = select_collinear(corr, threshold, kMovements);
  out.reduced = series.attributes;
  out.attributes.resize(static_cast<Eigen::Index>(out.kept_attribute_ids.size()), series.minutes());
  for (std::size_t i = 0; i < out.kept_attribute_ids.size(); ++i) {
    out.attributes.row(static_cast<Eigen::Index>(i)) = series.attributes.row(out.kept_attribute_ids[i]);
  }
  return out;
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw DataError("quantile of an empty series");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> iqr_outlier_replace(std::span<const double> series, int* replaced, long fit_count) {
  const auto fit = fit_count < 0 ? series.size() : std::min(series.size(), static_cast<std::size_t>(fit_count));
  if (fit < 4) throw DataError("IQR outlier handling needs at least 4 values");
  std::vector<double> sorted(series.begin(), series.begin() + fit);
  std::sort(sorted.begin(), sorted.end());
  auto q = [&](double p) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  const double q1 = q(0.25);
  const double q3 = q(0.75);
  const double median = q(0.5);
  const double iqr = q3 - q1;
  const double lower = q1 - 1.5 * iqr;
  const double upper = q3 + 1.5 * iqr;
  std::vector<double> out(series.begin(), series.end());
  int count = 0;
  for (double& v : out) {
    if (v < lower || v > upper) {
      v = median;
      ++count;
    }
  }
  if (replaced) *replaced = count;
  return out;
}

NormalizationStats fit_normalization(const Matrix& attributes, long first_minute, long fit_end_minute) {
  const long cols = std::min<long>(attributes.cols(), fit_end_minute - first_minute);
  if (cols < 1) throw DataError("no training minutes to fit normalization on");
  NormalizationStats s;
  s.fit_begin = first_minute;
  s.fit_end = first_minute + cols;
  const auto f = attributes.rows();
  s.mean.resize(f);
  s.stddev.resize(f);
  s.passthrough.resize(f);
  for (Eigen::Index i = 0; i < f; ++i) {
    const auto row = attributes.row(i).head(cols);
    const double mean = row.mean();
    const double var = (row.array() - mean).square().sum() / static_cast<double>(cols);
    s.mean[i] = mean;
    s.stddev[i] = std::sqrt(var);
    s.passthrough[i] = zero_variance(mean, s.stddev[i]);
  }
  return s;
}

Matrix normalize(const Matrix& attributes, const NormalizationStats& stats, long train_end_minute) {
  if (stats.fit_end > train_end_minute) {
    throw DataError("normalization stats were fitted on minutes up to " + std::to_string(stats.fit_end) +
                    ", beyond the training partition end " + std::to_string(train_end_minute));
  }
  if (static_cast<std::size_t>(attributes.rows()) != stats.mean.size()) {
    throw DataError("normalization stats do not match attribute count");
  }
  Matrix out = attributes;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    // Constant attributes are only centered; dividing by ~0 would blow up.
    const double scale = stats.passthrough[i] ? 1.0 : stats.stddev[i];
    out.row(i) = (out.row(i).array() - stats.mean[i]) / scale;
  }
  return out;
}

Matrix denormalize(const Matrix& normalized, const NormalizationStats& stats) {
  if (static_cast<std::size_t>(normalized.rows()) != stats.mean.size()) {
    throw DataError("normalization stats do not match attribute count");
  }
  Matrix out = normalized;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double scale = stats.passthrough[i] ? 1.0 : stats.stddev[i];
    out.row(i) = out.row(i).array() * scale + stats.mean[i];
  }
  return out;
}

namespace {

struct CleanedInputs {
  std::vector<AttributeSeries> reduced;  // topology order
  long first_minute = 0;
  long minutes = 0;
  int replaced = 0;
};

CleanedInputs clean_inputs(const CorridorTopology& topology, std::span<const RawIntersectionSeries> raw,
                           const PipelineConfig& config) {
  CleanedInputs out;
  const int n = topology.node_count();
  if (static_cast<int>(raw.size()) != n) {
    throw DataError("topology has " + std::to_string(n) + " nodes but " + std::to_string(raw.size()) +
                    " intersection series were given");
  }
  std::vector<const RawIntersectionSeries*> by_node(n, nullptr);
  for (const auto& s : raw) {
    const int idx = topology.index_of(s.intersection_id);
    if (by_node[idx]) throw DataError("duplicate series for intersection " + s.intersection_id);
    by_node[idx] = &s;
  }
  out.first_minute = by_node[0]->first_minute;
  out.minutes = by_node[0]->minutes();
  for (const auto* s : by_node) {
    if (s->first_minute != out.first_minute || s->minutes() != out.minutes) {
      throw DataError("intersection " + s->intersection_id + " covers minutes [" +
                      std::to_string(s->first_minute) + ", " +
                      std::to_string(s->first_minute + s->minutes()) + "), misaligned with [" +
                      std::to_string(out.first_minute) + ", " +
                      std::to_string(out.first_minute + out.minutes) + ")");
    }
  }
  out.reduced.reserve(n);
  for (const auto* s : by_node) {
    AttributeSeries a = drop_occupancy(*s);
    // Fences and medians come from training minutes so test data cannot move them.
    const long fit = std::min(a.minutes(), config.train_end_minute(a.first_minute) - a.first_minute);
    if (config.replace_outliers && fit >= 4) {
      for (int c = 0; c < schema::kReducedClass; ++c) {
        std::vector<double> row(a.attributes.row(c).begin(), a.attributes.row(c).end());
        int replaced = 0;
        const auto cleaned = iqr_outlier_replace(row, &replaced, fit);
        out.replaced += replaced;
        for (long t = 0; t < a.minutes(); ++t) a.attributes(c, t) = cleaned[t];
      }
    }
    out.reduced.push_back(std::move(a));
  }
  return out;
}

CleanFeatureSeries select_rows(const AttributeSeries& a, const std::vector<int>& kept) {
  CleanFeatureSeries s;
  s.intersection_id = a.intersection_id;
  s.first_minute = a.first_minute;
  s.kept_attribute_ids = kept;
  s.reduced = a.attributes;
  s.attributes.resize(static_cast<Eigen::Index>(kept.size()), a.minutes());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    s.attributes.row(static_cast<Eigen::Index>(i)) = a.attributes.row(kept[i]);
  }
  return s;
}

}  // namespace

PreparedCorridor prepare_corridor(const CorridorTopology& topology,
                                  std::span<const RawIntersectionSeries> raw,
                                  const PipelineConfig& config, Warnings* warnings) {
  CleanedInputs in = clean_inputs(topology, raw, config);
  PreparedCorridor out;
  out.topology = topology;
  out.config = config;
  out.first_minute = in.first_minute;
  out.minutes = in.minutes;
  out.outliers_replaced = in.replaced;

  const long train_end = config.train_end_minute(in.first_minute);
  const long fit_cols = std::min(in.minutes, train_end - in.first_minute);

  // Kept set by majority vote over per-intersection decisions; ties keep.
  const int n = topology.node_count();
  std::vector<int> votes(kReducedWidth, 0);
  for (const auto& a : in.reduced) {
    std::vector<int> zero_var;
    const Matrix corr = correlation_matrix(a.attributes.leftCols(fit_cols), &zero_var);
    for (int id : select_collinear(corr, config.collinearity_threshold, kMovements)) ++votes[id];
    if (!zero_var.empty()) {
      std::string names;
      for (int z : zero_var) names += " " + schema::annotation(z);
      warn(warnings, "intersection " + a.intersection_id + " has zero-variance attributes:" + names);
    }
  }
  for (int id = 0; id < kReducedWidth; ++id) {
    if (id < kMovements || 2 * votes[id] >= n) out.kept_attribute_ids.push_back(id);
  }

  for (const auto& a : in.reduced) {
    CleanFeatureSeries s = select_rows(a, out.kept_attribute_ids);
    s.stats = fit_normalization(s.attributes, s.first_minute, train_end);
    out.series.push_back(std::move(s));
  }
  return out;
}

PreparedCorridor prepare_corridor_replay(const CorridorTopology& topology,
                                         std::span<const RawIntersectionSeries> raw,
                                         const PipelineConfig& config,
                                         const std::vector<int>& kept_attribute_ids,
                                         const std::vector<NormalizationStats>& stats) {
  CleanedInputs in = clean_inputs(topology, raw, config);
  if (stats.size() != in.reduced.size()) throw DataError("manifest stats do not cover every intersection");
  PreparedCorridor out;
  out.topology = topology;
  out.config = config;
  out.first_minute = in.first_minute;
  out.minutes = in.minutes;
  out.outliers_replaced = in.replaced;
  out.kept_attribute_ids = kept_attribute_ids;
  for (std::size_t i = 0; i < in.reduced.size(); ++i) {
    CleanFeatureSeries s = select_rows(in.reduced[i], kept_attribute_ids);
    if (stats[i].mean.size() != kept_attribute_ids.size()) {
      throw DataError("manifest stats width does not match the kept attribute set");
    }
    s.stats = stats[i];
    out.series.push_back(std::move(s));
  }
  return out;
}

std::string pipeline_manifest(const PreparedCorridor& c) {
  std::ostringstream out;
  out << "mgcnn-pipeline-v1\n";
  out << "collinearity_threshold " << format_double(c.config.collinearity_threshold) << '\n';
  out << "gap_limit " << c.config.gap_limit << '\n';
  out << "train_days " << c.config.train_days << '\n';
  out << "total_days " << c.config.total_days << '\n';
  out << "speed_floor_mph " << format_double(c.config.speed_floor_mph) << '\n';
  out << "replace_outliers " << (c.config.replace_outliers ? 1 : 0) << '\n';
  out << "lambda_max "
      << (c.config.spectral.fixed_lambda_max ? "fixed:" + format_double(*c.config.spectral.fixed_lambda_max)
                                              : std::string("power"))
      << '\n';
  out << "weight_transform "
      << (c.config.spectral.weight_transform == WeightTransform::Inverse ? "inverse" : "identity") << '\n';
  out << "first_minute " << c.first_minute << '\n';
  out << "minutes " << c.minutes << '\n';
  out << "outliers_replaced " << c.outliers_replaced << '\n';
  out << "kept " << c.kept_attribute_ids.size();
  for (int id : c.kept_attribute_ids) out << ' ' << schema::annotation(id);
  out << '\n';
  for (const auto& s : c.series) {
    out << "stats " << s.intersection_id << ' ' << s.stats.fit_begin << ' ' << s.stats.fit_end << '\n';
    for (std::size_t i = 0; i < s.stats.mean.size(); ++i) {
      out << "  " << schema::annotation(s.kept_attribute_ids[i]) << ' ' << format_double(s.stats.mean[i])
          << ' ' << format_double(s.stats.stddev[i]) << ' ' << (s.stats.passthrough[i] ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

PipelineManifest parse_pipeline_manifest(std::string_view text) {
  PipelineManifest m;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "mgcnn-pipeline-v1") {
    throw DataError("not a pipeline manifest (expected 'mgcnn-pipeline-v1')");
  }
  auto num = [](const std::string& tok, auto& out, const std::string& key) {
    if (!parse_number(tok, out)) throw DataError("pipeline manifest: bad value for " + key);
  };
  NormalizationStats* current = nullptr;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string value;
    if (key == "collinearity_threshold") {
      ls >> value;
      num(value, m.config.collinearity_threshold, key);
    } else if (key == "gap_limit") {
      ls >> value;
      num(value, m.config.gap_limit, key);
    } else if (key == "train_days") {
      ls >> value;
      num(value, m.config.train_days, key);
    } else if (key == "total_days") {
      ls >> value;
      num(value, m.config.total_days, key);
    } else if (key == "speed_floor_mph") {
      ls >> value;
      num(value, m.config.speed_floor_mph, key);
    } else if (key == "replace_outliers") {
      ls >> value;
      m.config.replace_outliers = value == "1";
    } else if (key == "lambda_max") {
      ls >> value;
      if (value.rfind("fixed:", 0) == 0) {
        double v = 0;
        num(value.substr(6), v, key);
        m.config.spectral.fixed_lambda_max = v;
      }
    } else if (key == "weight_transform") {
      ls >> value;
      m.config.spectral.weight_transform =
          value == "inverse" ? WeightTransform::Inverse : WeightTransform::Identity;
    } else if (key == "kept") {
      std::size_t count = 0;
      ls >> count;
      for (std::size_t i = 0; i < count; ++i) {
        ls >> value;
        auto idx = schema::annotation_index(value);
        if (!idx) throw DataError("pipeline manifest: bad attribute '" + value + "'");
        m.kept_attribute_ids.push_back(*idx);
      }
    } else if (key == "stats") {
      std::string id;
      ls >> id;
      m.intersection_ids.push_back(id);
      m.stats.emplace_back();
      current = &m.stats.back();
      ls >> current->fit_begin >> current->fit_end;
    } else if (schema::annotation_index(key)) {
      if (!current) throw DataError("pipeline manifest: stats row outside a stats block");
      std::string mean, sd, pass;
      ls >> mean >> sd >> pass;
      double mv = 0, sv = 0;
      num(mean, mv, key);
      num(sd, sv, key);
      current->mean.push_back(mv);
      current->stddev.push_back(sv);
      current->passthrough.push_back(pass == "1");
    }
  }
  if (m.kept_attribute_ids.empty()) throw DataError("pipeline manifest: no kept attributes");
  return m;
}

CorridorFiles find_corridor_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw DataError("data directory " + dir.string() + " not found");
  CorridorFiles f;
  f.topology = dir / "topology.txt";
  if (!std::filesystem::exists(f.topology)) throw DataError("missing " + f.topology.string());
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") f.csvs.push_back(e.path());
  }
  std::sort(f.csvs.begin(), f.csvs.end());
  if (f.csvs.empty()) throw DataError("no CSV files in " + dir.string());
  return f;
}

}  // namespace mgcnn
