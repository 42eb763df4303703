// src/nn/checkpoint.cc

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

#include "fctts/nn/checkpoint.h"

#include <cstring>
#include <fstream>
#include <sstream>

#include "fctts/audio/mel_io.h"
#include "fctts/errors.h"

namespace fctts {

namespace {

template <typename T>
void Put(std::ostream &os, T v) {
  os.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T>
T Get(std::istream &is) {
  T v{};
  is.read(reinterpret_cast<char *>(&v), sizeof(T));
  if (!is) throw InvalidInputError("truncated checkpoint");
  return v;
}

}  // namespace

void SaveCheckpoint(const std::string &path, const Checkpoint &ckpt) {
  const std::string meta = ckpt.meta.dump(2);
  std::ostringstream body(std::ios::binary);
  const auto &t = ckpt.tensors;

  std::uint64_t header = 4 + 4 + 4 + meta.size() + 4;
  for (int i = 0; i < t.size(); ++i) header += 4 + t.name(i).size() + 8;

  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write checkpoint " + path);
  os.write("FCKP", 4);
  Put<std::uint32_t>(os, kCheckpointVersion);
  Put<std::uint32_t>(os, static_cast<std::uint32_t>(meta.size()));
  os.write(meta.data(), static_cast<std::streamsize>(meta.size()));
  Put<std::uint32_t>(os, static_cast<std::uint32_t>(t.size()));
  std::uint64_t offset = header;
  for (int i = 0; i < t.size(); ++i) {
    Put<std::uint32_t>(os, static_cast<std::uint32_t>(t.name(i).size()));
    os.write(t.name(i).data(), static_cast<std::streamsize>(t.name(i).size()));
    Put<std::uint64_t>(os, offset);
    offset += MelRecordBytes(t[i].rows(), t[i].cols());
  }
  for (int i = 0; i < t.size(); ++i) WriteMelRecord(os, t[i]);
  if (!os) throw IoError("write failed for checkpoint " + path);
}

Checkpoint LoadCheckpoint(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "FCKP", 4) != 0)
    throw InvalidInputError(path + ": not a checkpoint");
  const auto version = Get<std::uint32_t>(is);
  if (version != kCheckpointVersion)
    throw InvalidInputError(path + ": unsupported checkpoint version " +
                            std::to_string(version));
  const auto meta_len = Get<std::uint32_t>(is);
  std::string meta(meta_len, '\0');
  is.read(meta.data(), meta_len);
  if (!is) throw InvalidInputError(path + ": truncated metadata");
  Checkpoint ckpt;
  ckpt.meta = nlohmann::json::parse(meta);
  const auto count = Get<std::uint32_t>(is);
  std::vector<std::pair<std::string, std::uint64_t>> index;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = Get<std::uint32_t>(is);
    std::string name(len, '\0');
    is.read(name.data(), len);
    index.emplace_back(std::move(name), Get<std::uint64_t>(is));
  }
  for (const auto &[name, offset] : index) {
    is.seekg(static_cast<std::streamoff>(offset));
    ckpt.tensors.Add(name, ReadMelRecord(is));
  }
  return ckpt;
}

ParameterSet ExtractPrefixed(const ParameterSet &all, const std::string &prefix) {
  ParameterSet out;
  for (int i = 0; i < all.size(); ++i)
    if (all.name(i).rfind(prefix, 0) == 0)
      out.Add(all.name(i).substr(prefix.size()), all[i]);
  return out;
}

void AppendPrefixed(ParameterSet &all, const ParameterSet &part,
                    const std::string &prefix) {
  for (int i = 0; i < part.size(); ++i) all.Add(prefix + part.name(i), part[i]);
}

void RoundToStoragePrecision(ParameterSet &params) {
  for (int i = 0; i < params.size(); ++i)
    params[i] = params[i].cast<float>().cast<double>();
}

}  // namespace fctts
