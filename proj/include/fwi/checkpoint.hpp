#pragma once

#include <cstdint>
#include <string>

#include "fwi/network.hpp"

namespace fwi {
namespace nn {

// Checkpoint container: magic FWIC, u32 version, u32 tensor count, then per
// tensor u32 rank + u32 dims + f32 data (declaration order, running batch-norm
// statistics included), trailing u64 seed and u32 epoch. Little-endian.

struct CheckpointMeta {
    std::uint64_t seed = 0;
    std::uint32_t epoch = 0;
};

void write_checkpoint(const std::string& path, Network& net, const CheckpointMeta& meta);

/// Loads tensors into an already-constructed network; throws CheckpointMismatch
/// if the tensor list does not match the architecture.
CheckpointMeta read_checkpoint(const std::string& path, Network& net);

}  // namespace nn
}  // namespace fwi
