// src/audio/features.cc

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

#include "fctts/audio/features.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>

#include <unsupported/Eigen/FFT>

#include "fctts/errors.h"

namespace fctts {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Half-width of the sinc kernel, in zero crossings of the cutoff.
constexpr int kResampleZeros = 16;

double Sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

double Blackman(double x) {
  // x in [-1, 1]
  if (std::abs(x) >= 1.0) return 0.0;
  const double a = kPi * (x + 1.0);
  return 0.42 - 0.5 * std::cos(a) + 0.08 * std::cos(2.0 * a);
}

}  // namespace

void MelConfig::Validate() const {
  if (sample_rate_hz <= 0) throw ConfigError("sample_rate_hz must be positive");
  if (n_fft < 2 || n_fft % 2 != 0)
    throw ConfigError("n_fft must be an even integer >= 2");
  if (hop < 1 || hop > n_fft) throw ConfigError("hop must be in [1, n_fft]");
  if (n_mels < 1) throw ConfigError("n_mels must be >= 1");
  if (!(fmin_hz >= 0.0 && fmin_hz < fmax_hz &&
        fmax_hz <= sample_rate_hz / 2.0))
    throw ConfigError("require 0 <= fmin < fmax <= sample_rate / 2");
  if (!(log_floor > 0.0)) throw ConfigError("log_floor must be positive");
  if (normalization.enabled && !(normalization.scale > 0.0))
    throw ConfigError("normalization scale must be positive");
}

double MelConfig::floor_value() const {
  double v = std::log(log_floor);
  if (normalization.enabled)
    v = (v - normalization.mean) / normalization.scale;
  return v;
}

bool MelConfig::operator==(const MelConfig &o) const {
  return sample_rate_hz == o.sample_rate_hz && n_fft == o.n_fft &&
         hop == o.hop && n_mels == o.n_mels && fmin_hz == o.fmin_hz &&
         fmax_hz == o.fmax_hz && log_floor == o.log_floor &&
         normalization.enabled == o.normalization.enabled &&
         normalization.mean == o.normalization.mean &&
         normalization.scale == o.normalization.scale;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

Eigen::Index NumFrames(Eigen::Index num_samples, const MelConfig &cfg) {
  if (num_samples < cfg.n_fft) return 0;
  return 1 + (num_samples - cfg.n_fft) / cfg.hop;
}

Eigen::VectorXd HannWindow(int n) {
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);
  return w;
}

Eigen::VectorXd MelCenterFrequencies(const MelConfig &cfg) {
  const double lo = HzToMel(cfg.fmin_hz), hi = HzToMel(cfg.fmax_hz);
  Eigen::VectorXd centers(cfg.n_mels);
  for (int m = 0; m < cfg.n_mels; ++m)
    centers(m) = MelToHz(lo + (hi - lo) * (m + 1) / (cfg.n_mels + 1));
  return centers;
}

Eigen::MatrixXd MelFilterbank(const MelConfig &cfg) {
  cfg.Validate();
  const double lo = HzToMel(cfg.fmin_hz), hi = HzToMel(cfg.fmax_hz);
  Eigen::VectorXd edges(cfg.n_mels + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i)
    edges(i) = MelToHz(lo + (hi - lo) * i / (cfg.n_mels + 1));
  const int bins = cfg.num_bins();
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(cfg.n_mels, bins);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double left = edges(m), center = edges(m + 1), right = edges(m + 2);
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate_hz / cfg.n_fft;
      const double up = (f - left) / (center - left);
      const double down = (right - f) / (right - center);
      fb(m, k) = std::max(0.0, std::min(up, down));
    }
  }
  return fb;
}

Eigen::MatrixXcd Stft(const Eigen::VectorXd &samples, const MelConfig &cfg) {
  const Eigen::Index frames = NumFrames(samples.size(), cfg);
  const int bins = cfg.num_bins();
  const Eigen::VectorXd window = HannWindow(cfg.n_fft);
  Eigen::MatrixXcd out(frames, bins);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> buf(cfg.n_fft);
  std::vector<std::complex<double>> spec;
  for (Eigen::Index t = 0; t < frames; ++t) {
    const Eigen::Index start = t * cfg.hop;
    for (int i = 0; i < cfg.n_fft; ++i) buf[i] = samples(start + i) * window(i);
    fft.fwd(spec, buf);
    for (int k = 0; k < bins; ++k) out(t, k) = spec[k];
  }
  return out;
}

Eigen::VectorXd InverseStft(const Eigen::MatrixXcd &spectrum,
                            const MelConfig &cfg) {
  const Eigen::Index frames = spectrum.rows();
  if (frames == 0) return Eigen::VectorXd();
  const Eigen::Index length = (frames - 1) * cfg.hop + cfg.n_fft;
  const Eigen::VectorXd window = HannWindow(cfg.n_fft);
  Eigen::VectorXd num = Eigen::VectorXd::Zero(length);
  Eigen::VectorXd den = Eigen::VectorXd::Zero(length);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> spec(cfg.num_bins());
  std::vector<double> buf;
  for (Eigen::Index t = 0; t < frames; ++t) {
    for (int k = 0; k < cfg.num_bins(); ++k) spec[k] = spectrum(t, k);
    fft.inv(buf, spec, cfg.n_fft);
    const Eigen::Index start = t * cfg.hop;
    for (int i = 0; i < cfg.n_fft; ++i) {
      num(start + i) += window(i) * buf[i];
      den(start + i) += window(i) * window(i);
    }
  }
  for (Eigen::Index i = 0; i < length; ++i)
    num(i) = den(i) > 1e-8 ? num(i) / den(i) : 0.0;
  return num;
}

ResampleResult Resample(const AudioClip &clip, int target_rate_hz) {
  if (clip.samples.size() == 0)
    throw InvalidInputError("cannot resample an empty clip");
  if (target_rate_hz <= 0 || clip.sample_rate_hz <= 0)
    throw ConfigError("sample rates must be positive");
  ResampleResult result;
  if (target_rate_hz == clip.sample_rate_hz) {
    result.clip = clip;
    return result;
  }
  if (target_rate_hz > clip.sample_rate_hz)
    result.warning = "upsampling from " + std::to_string(clip.sample_rate_hz) +
                     " Hz to " + std::to_string(target_rate_hz) + " Hz";

  const long g = std::gcd(static_cast<long>(clip.sample_rate_hz),
                          static_cast<long>(target_rate_hz));
  const long up = target_rate_hz / g;
  const long down = clip.sample_rate_hz / g;
  // Cutoff in cycles per input sample.
  const double cutoff = 0.5 * std::min(1.0, static_cast<double>(up) / down);
  const int half = static_cast<int>(std::ceil(kResampleZeros / (2.0 * cutoff)));
  const int taps = 2 * half;

  // One filter per output phase; taps cover input offsets (-half, half].
  std::vector<Eigen::VectorXd> phases(up, Eigen::VectorXd(taps));
  for (long p = 0; p < up; ++p) {
    const double frac = static_cast<double>(p) / up;
    Eigen::VectorXd &h = phases[p];
    for (int k = 0; k < taps; ++k) {
      // Input index j = floor(t) - half + 1 + k; tau = t - j.
      const double tau = frac + half - 1 - k;
      h(k) = 2.0 * cutoff * Sinc(2.0 * cutoff * tau) *
             Blackman(tau / (half + 1.0));
    }
    h /= h.sum();
  }

  const Eigen::Index n_in = clip.samples.size();
  const Eigen::Index n_out = (n_in * up + down - 1) / down;
  Eigen::VectorXd out(n_out);
  for (Eigen::Index n = 0; n < n_out; ++n) {
    const long long pos = static_cast<long long>(n) * down;
    const Eigen::Index base = pos / up;
    const Eigen::VectorXd &h = phases[pos % up];
    double acc = 0.0;
    for (int k = 0; k < taps; ++k) {
      const Eigen::Index j = base - half + 1 + k;
      if (j >= 0 && j < n_in) acc += h(k) * clip.samples(j);
    }
    out(n) = acc;
  }
  result.clip.samples = std::move(out);
  result.clip.sample_rate_hz = target_rate_hz;
  return result;
}

MelSpectrogram ComputeMelSpectrogram(const AudioClip &clip,
                                     const MelConfig &cfg) {
  cfg.Validate();
  if (clip.sample_rate_hz != cfg.sample_rate_hz)
    throw ConfigError("clip rate " + std::to_string(clip.sample_rate_hz) +
                      " Hz does not match mel config rate " +
                      std::to_string(cfg.sample_rate_hz) + " Hz");
  if (clip.samples.size() < cfg.n_fft)
    throw InvalidInputError("clip of " + std::to_string(clip.samples.size()) +
                            " samples is shorter than one window (" +
                            std::to_string(cfg.n_fft) + ")");
  const Eigen::MatrixXd power = Stft(clip.samples, cfg).cwiseAbs2();
  const Eigen::MatrixXd fb = MelFilterbank(cfg);
  MelSpectrogram mel;
  mel.config = cfg;
  // Scalar std::log keeps floor entries exactly equal to log(log_floor);
  // the vectorized log may differ in the last bit.
  mel.frames = (power * fb.transpose()).cwiseMax(cfg.log_floor).unaryExpr(
      [](double v) { return std::log(v); });
  if (cfg.normalization.enabled)
    mel.frames = ((mel.frames.array() - cfg.normalization.mean) /
                  cfg.normalization.scale)
                     .matrix();
  return mel;
}

Eigen::MatrixXd MelToPower(const MelSpectrogram &mel) {
  Eigen::ArrayXXd logs = mel.frames.array();
  const MelNormalization &norm = mel.config.normalization;
  if (norm.enabled) logs = logs * norm.scale + norm.mean;
  return logs.exp().matrix();
}

Eigen::MatrixXd MelToLinearMagnitude(const MelSpectrogram &mel) {
  const Eigen::MatrixXd fb = MelFilterbank(mel.config);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(fb,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd &sv = svd.singularValues();
  const double smax = sv.maxCoeff(), smin = sv.minCoeff();
  if (!(smax > 0.0) || smin < 1e-10 * smax)
    throw NumericalError("mel filterbank is rank deficient (min/max singular "
                         "value " + std::to_string(smin / smax) + ")");
  // pinv(fb) = V S^-1 U^T, bins x n_mels
  const Eigen::MatrixXd pinv = svd.matrixV() *
                               sv.cwiseInverse().asDiagonal() *
                               svd.matrixU().transpose();
  const Eigen::MatrixXd power = MelToPower(mel) * pinv.transpose();
  return power.cwiseMax(0.0).cwiseSqrt();
}

GriffinLimResult GriffinLimInvert(const MelSpectrogram &mel, int n_iters,
                                  std::uint64_t seed) {
  if (n_iters < 1) throw ConfigError("n_iters must be >= 1");
  if (mel.num_frames() == 0) throw InvalidInputError("empty mel spectrogram");
  const MelConfig &cfg = mel.config;
  const Eigen::MatrixXd target = MelToLinearMagnitude(mel);
  const double target_norm = std::max(target.norm(), 1e-300);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  Eigen::MatrixXcd spec(target.rows(), target.cols());
  for (Eigen::Index t = 0; t < target.rows(); ++t)
    for (Eigen::Index k = 0; k < target.cols(); ++k)
      spec(t, k) = std::polar(target(t, k), angle(rng));

  GriffinLimResult result;
  result.clip.sample_rate_hz = cfg.sample_rate_hz;
  Eigen::VectorXd signal;
  for (int it = 0; it < n_iters; ++it) {
    signal = InverseStft(spec, cfg);
    const Eigen::MatrixXcd rebuilt = Stft(signal, cfg);
    const Eigen::MatrixXd mag = rebuilt.cwiseAbs();
    result.spectral_convergence.push_back((target - mag).norm() / target_norm);
    for (Eigen::Index t = 0; t < spec.rows(); ++t)
      for (Eigen::Index k = 0; k < spec.cols(); ++k) {
        const std::complex<double> z = rebuilt(t, k);
        const double a = std::abs(z);
        spec(t, k) = a > 0.0 ? target(t, k) * (z / a)
                             : std::complex<double>(target(t, k), 0.0);
      }
  }
  signal = InverseStft(spec, cfg);
  result.clip.samples = signal.cwiseMax(-1.0).cwiseMin(1.0);
  return result;
}

}  // namespace fctts
