#pragma once

#include <cstdint>
#include <filesystem>

#include "mwgan/training.hpp"

namespace mwgan {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Archive layout: 8-byte magic, u32 version, u64 header length, JSON header
// (model config, stage, iteration, sampler state, optimizer step counts and
// a tensor index), raw little-endian doubles in index order, then a u64
// FNV-1a checksum of every preceding byte.
void save_checkpoint(const TrainState& state, const std::filesystem::path& path);

// Throws IntegrityError on a bad magic, truncation or checksum mismatch and
// CheckpointError on a version, name or shape mismatch.
TrainState load_checkpoint(const std::filesystem::path& path);

}  // namespace mwgan
