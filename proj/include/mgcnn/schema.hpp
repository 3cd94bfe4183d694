#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace mgcnn::schema {

// Column layout of the per-intersection telemetry. Each measure is recorded
// for 12 movements, ordered bound-major: NB{L,T,R}, SB{L,T,R}, EB{L,T,R}, WB{L,T,R}.

inline constexpr std::array<std::string_view, 4> kBounds = {"NB", "SB", "EB", "WB"};
inline constexpr std::array<std::string_view, 3> kTurns = {"L", "T", "R"};

inline constexpr std::array<std::string_view, 11> kMeasures = {
    "count",     "speed", "arr_green", "arr_red", "arr_yellow", "green_time",
    "red_time",  "occ",   "occ_green", "occ_red", "occ_yellow"};

enum Measure : int {
  Count = 0,
  Speed,
  ArrGreen,
  ArrRed,
  ArrYellow,
  GreenTime,
  RedTime,
  Occupancy,
  OccGreen,
  OccRed,
  OccYellow,
};

enum Bound : int { NB = 0, SB, EB, WB };
enum Turn : int { Left = 0, Thru, Right };

inline constexpr int kMovementCount = 12;
inline constexpr int kRawWidth = 11 * kMovementCount + 1;      // 133
inline constexpr int kReducedWidth = 7 * kMovementCount + 1;   // 85, annotated A1..A85
inline constexpr int kRawClass = kRawWidth - 1;
inline constexpr int kReducedClass = kReducedWidth - 1;
inline constexpr int kOccupancyMeasures = 4;

constexpr int movement(Bound b, Turn t) { return static_cast<int>(b) * 3 + static_cast<int>(t); }

/// Column of (measure, movement) in the 133-wide raw layout.
constexpr int raw_index(Measure m, int mov) { return static_cast<int>(m) * kMovementCount + mov; }

/// Column of (measure, movement) in the 85-wide layout; occupancy measures have none.
constexpr int reduced_index(Measure m, int mov) {
  return static_cast<int>(m) * kMovementCount + mov;
}

inline bool is_occupancy(Measure m) { return m >= Occupancy; }

/// CSV column name, e.g. "count_EB_T", or "class".
std::string raw_name(int raw_col);
std::optional<int> raw_index_of(std::string_view name);

/// Measure of a raw column, or nullopt for the class column.
std::optional<Measure> raw_measure(int raw_col);

/// "A1".."A85" and a descriptive name for the reduced layout.
std::string annotation(int reduced_col);
std::string reduced_name(int reduced_col);
std::optional<int> annotation_index(std::string_view annotation);

/// Counts and arrivals: quantities that are zero when nothing was observed.
inline bool is_count_like(Measure m) {
  return m == Count || m == ArrGreen || m == ArrRed || m == ArrYellow;
}

}  // namespace mgcnn::schema
