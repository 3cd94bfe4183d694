#include "mgcnn/common.hpp"

#include <iostream>

namespace mgcnn {

void warn(Warnings* sink, std::string message) {
  if (sink != nullptr) {
    sink->push_back(std::move(message));
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw InvariantError(std::string(what) + " contains NaN or Inf");
  }
}

}  // namespace mgcnn
