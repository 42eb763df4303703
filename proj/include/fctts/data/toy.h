// include/fctts/data/toy.h

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

#ifndef FCTTS_DATA_TOY_H_
#define FCTTS_DATA_TOY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "fctts/data/manifest.h"

namespace fctts {

struct ToySpeakerSignature {
  double fundamental_hz = 0.0;
  std::vector<double> harmonic_amplitudes;  // harmonic 1, 2, ...
  /// Resonance fixed in Hz, so the speaker's envelope does not move with
  /// the pitch of each character. 0 disables it.
  double formant_hz = 0.0;
  double formant_bandwidth_hz = 250.0;
};

/// Envelope gain of the speaker's resonance at `hz` (1 far from it, 5 at it).
double FormantGain(double hz, const ToySpeakerSignature &sig);

struct ToyDatasetSpec {
  int n_speakers = 8;
  int utterances_per_speaker = 20;
  /// Trailing utterances of each speaker that go to the val split.
  int val_per_speaker = 4;
  std::string vocab = "abcdefgh";
  int min_chars = 6;
  int max_chars = 10;
  int sample_rate_hz = 16000;
  double tone_seconds = 0.080;
  double ramp_seconds = 0.010;
  double silence_seconds = 0.040;
  double noise_amplitude = 1e-3;
  int n_harmonics = 8;
  std::uint64_t seed = 0;

  void Validate() const;
};

/// Per-speaker signatures: fundamentals log-spaced over [110, 440] Hz and a
/// seeded harmonic profile (spectral tilt) plus a resonance between 500 and
/// 3000 Hz.
std::vector<ToySpeakerSignature> ToySignatures(const ToyDatasetSpec &spec);

/// Renders one utterance: each character k of the vocabulary is a tone at
/// f0 * 2^(k/12) voiced with the speaker's harmonics.
Eigen::VectorXd RenderToyUtterance(const std::string &text,
                                   const ToySpeakerSignature &sig,
                                   const ToyDatasetSpec &spec,
                                   std::uint64_t noise_seed);

/// Writes <out_dir>/wav/<spk>/<utt>.wav and <out_dir>/manifest.tsv.
DatasetManifest MakeToyDataset(const ToyDatasetSpec &spec,
                               const std::string &out_dir);

}  // namespace fctts

#endif  // FCTTS_DATA_TOY_H_
