#pragma once

#include "mgcnn/model.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace mgcnn {

inline constexpr std::string_view kCheckpointVersion = "mgcnn-ckpt-v1";

struct Checkpoint {
  ModelParams params;
  int horizon = 5;
};

/// Text checkpoint: version line, config line, then each tensor as
/// `tensor <name> <dims...>` followed by its values in row-major order.
/// Values use shortest round-trip formatting, so save/load is exact.
std::string checkpoint_to_text(const Checkpoint& ckpt);
Checkpoint checkpoint_from_text(std::string_view text);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mgcnn
