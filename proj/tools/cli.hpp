#pragma once

#include <ostream>

namespace mgcnn::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInternal = 70;

/// Entry point of the `mgcnn` binary, callable in-process for tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mgcnn::cli
