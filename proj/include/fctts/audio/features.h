// include/fctts/audio/features.h

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

#ifndef FCTTS_AUDIO_FEATURES_H_
#define FCTTS_AUDIO_FEATURES_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fctts {

struct AudioClip {
  Eigen::VectorXd samples;
  int sample_rate_hz = 16000;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

/// Optional affine normalization applied after the log. Disabled by default,
/// so a MelSpectrogram holds plain natural-log mel energies.
struct MelNormalization {
  bool enabled = false;
  double mean = 0.0;
  double scale = 1.0;
};

struct MelConfig {
  int sample_rate_hz = 16000;
  int n_fft = 800;
  int hop = 200;
  int n_mels = 80;
  double fmin_hz = 0.0;
  double fmax_hz = 8000.0;
  double log_floor = 1e-10;
  MelNormalization normalization;

  /// Throws ConfigError if any invariant is violated.
  void Validate() const;
  int num_bins() const { return n_fft / 2 + 1; }
  /// Value of an all-silent frame in the (possibly normalized) log domain.
  double floor_value() const;
  bool operator==(const MelConfig &other) const;
};

struct MelSpectrogram {
  Eigen::MatrixXd frames;  // T x n_mels
  MelConfig config;

  Eigen::Index num_frames() const { return frames.rows(); }
  Eigen::Index num_mels() const { return frames.cols(); }
};

struct ResampleResult {
  AudioClip clip;
  /// Non-empty when the target rate exceeds the source rate.
  std::string warning;
};

struct GriffinLimResult {
  AudioClip clip;
  /// Spectral convergence ||S - |STFT(x_i)||| / ||S|| after each iteration.
  std::vector<double> spectral_convergence;
};

double HzToMel(double hz);
double MelToHz(double mel);

/// Number of analysis frames for a signal of `num_samples` samples. Frames
/// lie fully inside the signal (no padding); returns 0 if shorter than n_fft.
Eigen::Index NumFrames(Eigen::Index num_samples, const MelConfig &cfg);

/// Periodic Hann window of length n.
Eigen::VectorXd HannWindow(int n);

/// Triangular filterbank, n_mels x (n_fft/2 + 1), peak weight 1.
Eigen::MatrixXd MelFilterbank(const MelConfig &cfg);

/// Center frequency of each mel filter in Hz.
Eigen::VectorXd MelCenterFrequencies(const MelConfig &cfg);

/// Complex STFT, T x (n_fft/2 + 1), Hann-windowed, no padding.
Eigen::MatrixXcd Stft(const Eigen::VectorXd &samples, const MelConfig &cfg);

/// Least-squares overlap-add inverse of Stft. Output length is
/// (T - 1) * hop + n_fft.
Eigen::VectorXd InverseStft(const Eigen::MatrixXcd &spectrum,
                            const MelConfig &cfg);

/// Windowed-sinc polyphase resampler with cutoff at the lower Nyquist.
ResampleResult Resample(const AudioClip &clip, int target_rate_hz);

MelSpectrogram ComputeMelSpectrogram(const AudioClip &clip,
                                     const MelConfig &cfg);

/// Converts log-mel energies back to mel power, undoing normalization.
Eigen::MatrixXd MelToPower(const MelSpectrogram &mel);

/// Magnitude-spectrogram estimate from mel through the filterbank
/// pseudo-inverse; T x (n_fft/2 + 1). Throws NumericalError when the
/// filterbank is rank deficient.
Eigen::MatrixXd MelToLinearMagnitude(const MelSpectrogram &mel);

GriffinLimResult GriffinLimInvert(const MelSpectrogram &mel, int n_iters,
                                  std::uint64_t seed = 0);

}  // namespace fctts

#endif  // FCTTS_AUDIO_FEATURES_H_
