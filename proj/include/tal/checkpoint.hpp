// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Binary checkpoint layout (all integers little-endian u32, all reals
// little-endian IEEE-754 f64):
//
//   "TALCKPT1"
//   version, layer_count, dims[layer_count + 1],
//   queue_capacity, queue_length, epoch, flags (bit 0: queue initialized)
//   parameters:  per layer, weights (row-major, out x in) then bias
//   momentum:    same order and shape as the parameters
//   queue:       queue_length pairs of (mean, variance), oldest first
//   rng_length, rng_length bytes of the textual mt19937_64 state

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "tal/trainer.hpp"

namespace tal {

inline constexpr char kCheckpointMagic[8] = {'T', 'A', 'L', 'C', 'K', 'P', 'T', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string serialize_checkpoint(const TrainingState& state);
// Throws FormatError on bad magic, unsupported version, inconsistent sizes,
// truncation or trailing bytes. Never returns partial state.
TrainingState deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const TrainingState& state, const std::filesystem::path& path);
TrainingState load_checkpoint(const std::filesystem::path& path);

}  // namespace tal
