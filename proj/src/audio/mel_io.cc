// src/audio/mel_io.cc

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

#include "fctts/audio/mel_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "fctts/errors.h"

namespace fctts {

static_assert(std::endian::native == std::endian::little,
              "MELS records are written in host byte order");

namespace {

void PutU32(std::ostream &os, std::uint32_t v) {
  os.write(reinterpret_cast<const char *>(&v), 4);
}

std::uint32_t GetU32(std::istream &is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char *>(&v), 4);
  return v;
}

}  // namespace

void WriteMelRecord(std::ostream &os, const Eigen::MatrixXd &m) {
  os.write("MELS", 4);
  PutU32(os, kMelRecordVersion);
  PutU32(os, static_cast<std::uint32_t>(m.rows()));
  PutU32(os, static_cast<std::uint32_t>(m.cols()));
  std::vector<float> row(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row[c] = static_cast<float>(m(r, c));
    os.write(reinterpret_cast<const char *>(row.data()),
             static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
}

Eigen::MatrixXd ReadMelRecord(std::istream &is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "MELS", 4) != 0)
    throw InvalidInputError("bad MELS record magic");
  const std::uint32_t version = GetU32(is);
  if (version != kMelRecordVersion)
    throw InvalidInputError("unsupported MELS version " +
                            std::to_string(version));
  const std::uint32_t rows = GetU32(is), cols = GetU32(is);
  if (!is) throw InvalidInputError("truncated MELS header");
  Eigen::MatrixXd m(rows, cols);
  std::vector<float> row(cols);
  for (std::uint32_t r = 0; r < rows; ++r) {
    is.read(reinterpret_cast<char *>(row.data()),
            static_cast<std::streamsize>(cols * sizeof(float)));
    if (!is) throw InvalidInputError("truncated MELS payload");
    for (std::uint32_t c = 0; c < cols; ++c) m(r, c) = row[c];
  }
  return m;
}

void WriteMelFile(const std::string &path, const Eigen::MatrixXd &m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  WriteMelRecord(os, m);
  if (!os) throw IoError("write failed for " + path);
}

Eigen::MatrixXd ReadMelFile(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  return ReadMelRecord(is);
}

}  // namespace fctts
