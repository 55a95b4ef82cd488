/* Copyright 2026 The RING Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Binary dataset (RINGDS01) and weights (RINGWT01) containers.
// Little-endian, 32-bit float payloads, CRC-32 integrity checks.
// Byte layouts are documented in docs/formats.md.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ring/net.hpp"
#include "ring/rcmg.hpp"

namespace ring {

inline constexpr char kDatasetMagic[9] = "RINGDS01";
inline constexpr char kWeightsMagic[9] = "RINGWT01";
inline constexpr std::uint32_t kDatasetVersion = 1;
inline constexpr std::uint32_t kWeightsVersion = 1;

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_dataset(std::span<const TrainingPair> pairs);
// Throws kFormat (magic/version), kChecksum (CRC failure or truncation) or
// kInvariant (naming sequence and timestep). Never returns a partial set.
std::vector<TrainingPair> decode_dataset(std::span<const std::uint8_t> bytes);

void write_dataset(const std::string& path, std::span<const TrainingPair> pairs);
std::vector<TrainingPair> read_dataset(const std::string& path);

std::vector<std::uint8_t> encode_weights(const RingParams& params);
// expected_hidden / expected_message of 0 accept any width; otherwise a
// mismatch throws kShapeMismatch.
RingParams decode_weights(std::span<const std::uint8_t> bytes, std::size_t expected_hidden = 0,
                          std::size_t expected_message = 0);

void write_weights(const std::string& path, const RingParams& params);
RingParams read_weights(const std::string& path, std::size_t expected_hidden = 0,
                        std::size_t expected_message = 0);

// Round every stored value through float32, as a write/read cycle does.
RingParams round_to_storage(const RingParams& params);
TrainingPair round_to_storage(const TrainingPair& pair);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace ring
