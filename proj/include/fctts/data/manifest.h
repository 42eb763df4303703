// include/fctts/data/manifest.h

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

#ifndef FCTTS_DATA_MANIFEST_H_
#define FCTTS_DATA_MANIFEST_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fctts/audio/features.h"

namespace fctts {

enum class Split { kTrain, kVal, kTest };

std::string SplitName(Split s);
Split ParseSplit(const std::string &name);

struct ManifestEntry {
  std::string utt_id;
  std::string speaker_id;
  Split split = Split::kTrain;
  std::string audio_path;  // absolute, or relative to the manifest file
  std::string transcript;

  bool operator==(const ManifestEntry &o) const = default;
};

/// Tab-separated file with the header
///   utt_id  speaker_id  split  audio_path  transcript
class DatasetManifest {
 public:
  std::vector<ManifestEntry> entries;
  /// Directory that relative audio paths are resolved against.
  std::string base_dir;

  std::vector<const ManifestEntry *> InSplit(Split s) const;
  /// Sorted, distinct speaker ids, optionally restricted to one split.
  std::vector<std::string> Speakers(std::optional<Split> s = std::nullopt) const;
  const ManifestEntry &Find(const std::string &utt_id) const;
  std::string AudioPath(const ManifestEntry &e) const;

  /// Throws InvalidInputError on duplicate utt ids, empty fields or
  /// embedded tabs/newlines. With `check_audio` every file must exist.
  void Validate(bool check_audio) const;
};

void WriteManifest(const std::string &path, const DatasetManifest &m);
DatasetManifest ReadManifest(const std::string &path);

enum class CorpusLayout { kVctkLike, kLibriSpeechLike };
CorpusLayout ParseLayout(const std::string &name);

struct SplitSpec {
  /// Speakers moved wholesale into the test split, chosen by seed unless
  /// `test_speakers` is non-empty.
  int n_test_speakers = 8;
  std::vector<std::string> test_speakers;
  int val_per_speaker = 8;
  /// When non-empty, only these speakers are used at all.
  std::vector<std::string> include_speakers;
};

struct BuildReport {
  std::vector<std::string> issues;          // missing transcript / bad audio
  std::vector<std::string> flagged_speakers;  // too few utterances for val
};

struct BuildResult {
  DatasetManifest manifest;
  BuildReport report;
};

/// Scans a corpus tree.
///   vctk_like:        <root>/wav48/<spk>/<utt>.wav + <root>/txt/<spk>/<utt>.txt
///                     (a "wav" directory is accepted in place of "wav48")
///   librispeech_like: <root>/<spk>/<chapter>/<utt>.wav and
///                     <spk>-<chapter>.trans.txt lines "<utt> <text>"
/// Speakers with val_per_speaker or fewer utterances are flagged and give
/// one utterance to val (none if they have only one).
BuildResult BuildManifest(const std::string &corpus_root, CorpusLayout layout,
                          const SplitSpec &spec, std::uint64_t seed);

/// Reads, resamples to cfg.sample_rate_hz if necessary and extracts the
/// log-mel spectrogram of one manifest entry.
MelSpectrogram LoadMel(const DatasetManifest &m, const ManifestEntry &e,
                       const MelConfig &cfg);

}  // namespace fctts

#endif  // FCTTS_DATA_MANIFEST_H_
