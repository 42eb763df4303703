// src/audio/wav.cc

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

#include "fctts/audio/wav.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "fctts/errors.h"

namespace fctts {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

namespace {

template <typename T>
T ReadLe(const std::vector<char> &buf, std::size_t pos) {
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  return v;
}

template <typename T>
void WriteLe(std::ofstream &os, T v) {
  os.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

}  // namespace

AudioClip ReadWav(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  std::vector<char> buf((std::istreambuf_iterator<char>(is)),
                        std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw InvalidInputError(path + ": not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t data_pos = 0, data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::string id(buf.data() + pos, 4);
    const std::uint32_t len = ReadLe<std::uint32_t>(buf, pos + 4);
    const std::size_t body = pos + 8;
    if (body + len > buf.size() && id != "data")
      throw InvalidInputError(path + ": truncated chunk " + id);
    if (id == "fmt ") {
      if (len < 16) throw InvalidInputError(path + ": short fmt chunk");
      format = ReadLe<std::uint16_t>(buf, body);
      channels = ReadLe<std::uint16_t>(buf, body + 2);
      rate = ReadLe<std::uint32_t>(buf, body + 4);
      bits = ReadLe<std::uint16_t>(buf, body + 14);
      if (format == 0xFFFE && len >= 26)  // WAVE_FORMAT_EXTENSIBLE
        format = ReadLe<std::uint16_t>(buf, body + 24);
      have_fmt = true;
    } else if (id == "data") {
      data_pos = body;
      data_len = std::min<std::size_t>(len, buf.size() - body);
      break;
    }
    pos = body + len + (len & 1u);
  }
  if (!have_fmt || data_pos == 0)
    throw InvalidInputError(path + ": missing fmt or data chunk");
  if (channels != 1)
    throw InvalidInputError(path + ": expected mono audio, got " +
                            std::to_string(channels) + " channels");

  AudioClip clip;
  clip.sample_rate_hz = static_cast<int>(rate);
  if (format == 1 && bits == 16) {
    const std::size_t n = data_len / 2;
    clip.samples.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      clip.samples(i) = ReadLe<std::int16_t>(buf, data_pos + 2 * i) / 32768.0;
  } else if (format == 3 && bits == 32) {
    const std::size_t n = data_len / 4;
    clip.samples.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      clip.samples(i) = std::clamp<double>(
          ReadLe<float>(buf, data_pos + 4 * i), -1.0, 1.0);
  } else {
    throw InvalidInputError(path + ": unsupported sample format " +
                            std::to_string(format) + "/" +
                            std::to_string(bits) + " bits");
  }
  return clip;
}

void WriteWav(const std::string &path, const AudioClip &clip) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  const auto n = static_cast<std::uint32_t>(clip.samples.size());
  const std::uint32_t data_bytes = n * 2;
  os.write("RIFF", 4);
  WriteLe<std::uint32_t>(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  WriteLe<std::uint32_t>(os, 16);
  WriteLe<std::uint16_t>(os, 1);
  WriteLe<std::uint16_t>(os, 1);
  WriteLe<std::uint32_t>(os, static_cast<std::uint32_t>(clip.sample_rate_hz));
  WriteLe<std::uint32_t>(os, static_cast<std::uint32_t>(clip.sample_rate_hz) * 2);
  WriteLe<std::uint16_t>(os, 2);
  WriteLe<std::uint16_t>(os, 16);
  os.write("data", 4);
  WriteLe<std::uint32_t>(os, data_bytes);
  for (std::uint32_t i = 0; i < n; ++i) {
    const double s = std::clamp(clip.samples(i), -1.0, 1.0);
    const long q = std::lround(s * 32768.0);
    WriteLe<std::int16_t>(os, static_cast<std::int16_t>(std::clamp(q, -32768L, 32767L)));
  }
  if (!os) throw IoError("write failed for " + path);
}

}  // namespace fctts
