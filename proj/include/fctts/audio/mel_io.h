// include/fctts/audio/mel_io.h

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

#ifndef FCTTS_AUDIO_MEL_IO_H_
#define FCTTS_AUDIO_MEL_IO_H_

#include <cstdint>
#include <iosfwd>
#include <string>

#include <Eigen/Dense>

namespace fctts {

// Flat binary matrix record:
//   "MELS" | version u32 | rows u32 | cols u32 | rows*cols float32, row-major
// All integers little-endian.
inline constexpr std::uint32_t kMelRecordVersion = 1;
inline constexpr std::size_t kMelRecordHeaderBytes = 16;

void WriteMelRecord(std::ostream &os, const Eigen::MatrixXd &m);
Eigen::MatrixXd ReadMelRecord(std::istream &is);

/// Size in bytes of the record holding an r x c matrix.
inline std::size_t MelRecordBytes(Eigen::Index rows, Eigen::Index cols) {
  return kMelRecordHeaderBytes + 4 * static_cast<std::size_t>(rows * cols);
}

void WriteMelFile(const std::string &path, const Eigen::MatrixXd &m);
Eigen::MatrixXd ReadMelFile(const std::string &path);

}  // namespace fctts

#endif  // FCTTS_AUDIO_MEL_IO_H_
