#include "mgcnn/schema.hpp"

#include <charconv>

namespace mgcnn::schema {

namespace {

std::string movement_suffix(int mov) {
  return std::string(kBounds[mov / 3]) + "_" + std::string(kTurns[mov % 3]);
}

}  // namespace

std::string raw_name(int raw_col) {
  if (raw_col == kRawClass) return "class";
  return std::string(kMeasures[raw_col / kMovementCount]) + "_" +
         movement_suffix(raw_col % kMovementCount);
}

std::optional<int> raw_index_of(std::string_view name) {
  for (int c = 0; c < kRawWidth; ++c) {
    if (raw_name(c) == name) return c;
  }
  return std::nullopt;
}

std::optional<Measure> raw_measure(int raw_col) {
  if (raw_col == kRawClass) return std::nullopt;
  return static_cast<Measure>(raw_col / kMovementCount);
}

std::string annotation(int reduced_col) { return "A" + std::to_string(reduced_col + 1); }

std::string reduced_name(int reduced_col) {
  if (reduced_col == kReducedClass) return "class";
  return raw_name(reduced_col);  // first seven measures share the raw layout
}

std::optional<int> annotation_index(std::string_view a) {
  if (a.size() < 2 || a.front() != 'A') return std::nullopt;
  int v = 0;
  auto [ptr, ec] = std::from_chars(a.data() + 1, a.data() + a.size(), v);
  if (ec != std::errc{} || ptr != a.data() + a.size() || v < 1 || v > kReducedWidth) {
    return std::nullopt;
  }
  return v - 1;
}

}  // namespace mgcnn::schema
