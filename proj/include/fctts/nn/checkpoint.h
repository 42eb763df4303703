// include/fctts/nn/checkpoint.h

// Copyright 2026  The fctts Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef FCTTS_NN_CHECKPOINT_H_
#define FCTTS_NN_CHECKPOINT_H_

#include <string>

#include "json.hpp"

#include "fctts/nn/parameters.h"

namespace fctts {

// Checkpoint container, all integers little-endian:
//   "FCKP" | version u32 | meta_len u32 | meta (JSON text)
//   | count u32 | count x { name_len u32 | name | offset u64 }
//   | count x MELS record (see audio/mel_io.h)
// Offsets are absolute byte positions of each record. Tensors are stored as
// float32, so a save/load round trip rounds values to single precision.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  /// Model kind ("verifier" / "synthesizer"), architecture and training
  /// state.
  nlohmann::json meta;
  ParameterSet tensors;
};

void SaveCheckpoint(const std::string &path, const Checkpoint &ckpt);
Checkpoint LoadCheckpoint(const std::string &path);

/// Copies tensors whose names start with `prefix` into a new set, stripping
/// the prefix.
ParameterSet ExtractPrefixed(const ParameterSet &all, const std::string &prefix);
void AppendPrefixed(ParameterSet &all, const ParameterSet &part,
                    const std::string &prefix);

/// Rounds every value to float32 precision, matching what a save/load round
/// trip produces.
void RoundToStoragePrecision(ParameterSet &params);

}  // namespace fctts

#endif  // FCTTS_NN_CHECKPOINT_H_
