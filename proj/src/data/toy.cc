// src/data/toy.cc

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

#include "fctts/data/toy.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "fctts/audio/wav.h"
#include "fctts/errors.h"
#include "fctts/synth/text.h"

namespace fs = std::filesystem;

namespace fctts {

void ToyDatasetSpec::Validate() const {
  if (n_speakers < 1) throw ConfigError("toy dataset needs at least one speaker");
  if (utterances_per_speaker < 1)
    throw ConfigError("utterances_per_speaker must be positive");
  if (val_per_speaker < 0 || val_per_speaker >= utterances_per_speaker)
    throw ConfigError("val_per_speaker must leave training utterances");
  if (vocab.empty()) throw ConfigError("toy vocabulary is empty");
  for (char c : vocab)
    if (Vocabulary::IdOf(c) < 0)
      throw ConfigError(std::string("toy vocabulary symbol '") + c +
                        "' is not in the text inventory");
  if (min_chars < 1 || max_chars < min_chars)
    throw ConfigError("bad toy text length range");
  if (sample_rate_hz < 8000) throw ConfigError("toy sample rate too low");
  if (!(tone_seconds > 2 * ramp_seconds) || ramp_seconds < 0 ||
      silence_seconds < 0 || noise_amplitude < 0)
    throw ConfigError("bad toy tone timing");
  if (n_harmonics < 1) throw ConfigError("n_harmonics must be positive");
}

std::vector<ToySpeakerSignature> ToySignatures(const ToyDatasetSpec &spec) {
  spec.Validate();
  const int n = spec.n_speakers;
  std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  // Spectral tilt and formant frequency, each assigned by an independent
  // shuffle so that timbre is not a function of pitch.
  std::vector<double> tilts(n), formants(n);
  for (int s = 0; s < n; ++s) {
    const double frac = n == 1 ? 0.5 : s / (n - 1.0);
    tilts[s] = 0.3 + 1.7 * frac;
    formants[s] = 500.0 * std::pow(6.0, frac);  // 500 .. 3000 Hz
  }
  std::shuffle(tilts.begin(), tilts.end(), rng);
  std::shuffle(formants.begin(), formants.end(), rng);
  std::uniform_real_distribution<double> jitter(0.75, 1.25);

  std::vector<ToySpeakerSignature> out(n);
  for (int s = 0; s < n; ++s) {
    out[s].fundamental_hz =
        n == 1 ? 220.0 : 110.0 * std::pow(4.0, s / (n - 1.0));
    double total = 0.0;
    for (int h = 1; h <= spec.n_harmonics; ++h) {
      const double a = std::pow(h, -tilts[s]) * jitter(rng);
      out[s].harmonic_amplitudes.push_back(a);
      total += a;
    }
    for (double &a : out[s].harmonic_amplitudes) a *= 0.5 / total;
    out[s].formant_hz = formants[s];
  }
  return out;
}

double FormantGain(double hz, const ToySpeakerSignature &sig) {
  if (sig.formant_hz <= 0) return 1.0;
  const double z = (hz - sig.formant_hz) / sig.formant_bandwidth_hz;
  return 1.0 + 4.0 * std::exp(-0.5 * z * z);
}

Eigen::VectorXd RenderToyUtterance(const std::string &text,
                                   const ToySpeakerSignature &sig,
                                   const ToyDatasetSpec &spec,
                                   std::uint64_t noise_seed) {
  const double fs_hz = spec.sample_rate_hz;
  const auto tone = static_cast<Eigen::Index>(std::lround(spec.tone_seconds * fs_hz));
  const auto ramp = static_cast<Eigen::Index>(std::lround(spec.ramp_seconds * fs_hz));
  const auto pad = static_cast<Eigen::Index>(std::lround(spec.silence_seconds * fs_hz));
  const Eigen::Index n = 2 * pad + tone * static_cast<Eigen::Index>(text.size());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);

  for (std::size_t c = 0; c < text.size(); ++c) {
    const auto k = spec.vocab.find(text[c]);
    if (k == std::string::npos)
      throw InvalidInputError(std::string("character '") + text[c] +
                              "' outside the toy vocabulary");
    const double f = sig.fundamental_hz * std::pow(2.0, k / 12.0);
    const Eigen::Index start = pad + static_cast<Eigen::Index>(c) * tone;
    for (Eigen::Index i = 0; i < tone; ++i) {
      double env = 1.0;
      if (i < ramp)
        env = 0.5 - 0.5 * std::cos(std::numbers::pi * i / ramp);
      else if (i >= tone - ramp)
        env = 0.5 - 0.5 * std::cos(std::numbers::pi * (tone - 1 - i) / ramp);
      const double t = i / fs_hz;
      double v = 0.0;
      for (std::size_t h = 0; h < sig.harmonic_amplitudes.size(); ++h) {
        const double fh = f * (h + 1);
        if (fh >= fs_hz / 2) break;
        v += sig.harmonic_amplitudes[h] * FormantGain(fh, sig) *
             std::sin(2 * std::numbers::pi * fh * t);
      }
      x(start + i) = env * v;
    }
  }
  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> noise(0.0, spec.noise_amplitude);
  for (Eigen::Index i = 0; i < n; ++i) x(i) += noise(rng);
  return x;
}

DatasetManifest MakeToyDataset(const ToyDatasetSpec &spec,
                               const std::string &out_dir) {
  const auto sigs = ToySignatures(spec);
  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "wav", ec);
  if (ec || !fs::is_directory(out_dir))
    throw IoError("cannot create output directory " + out_dir);

  DatasetManifest m;
  m.base_dir = out_dir;
  for (int s = 0; s < spec.n_speakers; ++s) {
    char spk[16];
    std::snprintf(spk, sizeof spk, "spk%02d", s);
    const fs::path dir = fs::path(out_dir) / "wav" / spk;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string());
    for (int u = 0; u < spec.utterances_per_speaker; ++u) {
      std::seed_seq sq{static_cast<std::uint32_t>(spec.seed),
                       static_cast<std::uint32_t>(spec.seed >> 32),
                       static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(u)};
      std::mt19937_64 rng(sq);
      std::uniform_int_distribution<int> len(spec.min_chars, spec.max_chars);
      std::uniform_int_distribution<std::size_t> sym(0, spec.vocab.size() - 1);
      std::string text;
      const int L = len(rng);
      for (int i = 0; i < L; ++i) text.push_back(spec.vocab[sym(rng)]);

      char utt[32];
      std::snprintf(utt, sizeof utt, "%s_%03d", spk, u);
      const std::string rel = (fs::path("wav") / spk / (std::string(utt) + ".wav")).string();
      AudioClip clip{RenderToyUtterance(text, sigs[s], spec, rng()),
                     spec.sample_rate_hz};
      WriteWav((fs::path(out_dir) / rel).string(), clip);
      const bool val = u >= spec.utterances_per_speaker - spec.val_per_speaker;
      m.entries.push_back({utt, spk, val ? Split::kVal : Split::kTrain, rel, text});
    }
  }
  WriteManifest((fs::path(out_dir) / "manifest.tsv").string(), m);
  return m;
}

}  // namespace fctts
