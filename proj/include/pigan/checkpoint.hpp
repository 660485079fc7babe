#pragma once

// Parameter checkpoint file: little-endian "PGC1" magic, u32 version,
// u32 tensor count, then per tensor a length-prefixed name, u32 rank,
// u32 dims and the flat float32 payload.

#include <string>
#include <vector>

#include "pigan/models.hpp"

namespace pigan {

void save_checkpoint(const std::string& path,
                     const std::vector<NamedTensor>& tensors);

std::vector<NamedTensor> load_checkpoint(const std::string& path);

}  // namespace pigan
