// include/fctts/audio/wav.h

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

#ifndef FCTTS_AUDIO_WAV_H_
#define FCTTS_AUDIO_WAV_H_

#include <string>

#include "fctts/audio/features.h"

namespace fctts {

/// Reads a single-channel RIFF/WAVE file. Supports 16-bit integer PCM and
/// 32-bit IEEE float. Integer samples are divided by 32768; float samples
/// are clamped to [-1, 1].
AudioClip ReadWav(const std::string &path);

/// Writes 16-bit PCM mono. Samples are clamped to [-1, 1].
void WriteWav(const std::string &path, const AudioClip &clip);

}  // namespace fctts

#endif  // FCTTS_AUDIO_WAV_H_
