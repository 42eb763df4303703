// include/fctts/verifier/speaker_encoder.h

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

#ifndef FCTTS_VERIFIER_SPEAKER_ENCODER_H_
#define FCTTS_VERIFIER_SPEAKER_ENCODER_H_

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "fctts/ad/ops.h"
#include "fctts/audio/features.h"
#include "fctts/nn/checkpoint.h"
#include "fctts/nn/optimizer.h"
#include "fctts/nn/parameters.h"

namespace fctts {

/// Fixed-dimension utterance representation: per-channel temporal mean
/// followed by per-channel standard deviation. Not length-normalized.
struct SpeakerEmbedding {
  Eigen::RowVectorXd values;
  Eigen::Index dim() const { return values.size(); }
};

/// Residual 2-D convolutional encoder over (time, mel) followed by
/// statistics pooling and a two-layer classification head.
struct VerifierArch {
  int n_mels = 80;
  /// Channel width per stage. Stages after the first halve time and
  /// frequency resolution.
  std::vector<int> widths{32, 64, 128, 256};
  /// Residual blocks per stage.
  std::vector<int> blocks{3, 4, 6, 3};
  int kernel = 3;
  int hidden = 256;
  int n_speakers = 1;
  double eps = 1e-8;
  int crop_frames = 200;
  /// Fixed input standardization (x - input_mean) / input_std.
  double input_mean = 0.0;
  double input_std = 1.0;

  static VerifierArch Full(int n_speakers);
  static VerifierArch Toy(int n_speakers);

  int embedding_dim() const { return 2 * widths.back(); }
  int stride_of_stage(std::size_t s) const { return s == 0 ? 1 : 2; }
  /// Product of all stage strides along time.
  int total_stride() const;
  /// Output length along time for an input of `frames` frames.
  Eigen::Index output_frames(Eigen::Index frames) const;
  /// Mel bins left after the strided stages.
  Eigen::Index output_bins() const { return output_frames(n_mels); }
  /// Shortest input (in frames) accepted by EncodeFrames.
  int min_frames() const { return total_stride(); }

  void Validate() const;
  nlohmann::json ToJson() const;
  static VerifierArch FromJson(const nlohmann::json &j);
  bool operator==(const VerifierArch &other) const;
};

class VerifierModel {
 public:
  VerifierModel() = default;
  /// Random initialization.
  VerifierModel(VerifierArch arch, std::uint64_t seed);
  /// Wraps existing parameters; shapes are validated against the arch.
  VerifierModel(VerifierArch arch, ParameterSet params);

  const VerifierArch &arch() const { return arch_; }
  const ParameterSet &params() const { return params_; }
  ParameterSet &params() { return params_; }

  /// T x n_mels -> T' x C feature map on a tape.
  ad::Var EncodeFrames(ad::Tape &tape, const Binding &b, ad::Var mel) const;
  /// T x n_mels -> 1 x d embedding on a tape.
  ad::Var Embed(ad::Tape &tape, const Binding &b, ad::Var mel) const;
  /// 1 x d -> 1 x n_speakers logits on a tape.
  ad::Var Logits(ad::Tape &tape, const Binding &b, ad::Var emb) const;

  Checkpoint ToCheckpoint() const;
  /// Throws ConfigError when the checkpoint is not a verifier or, if
  /// `expected` is given, when its architecture differs.
  static VerifierModel FromCheckpoint(const Checkpoint &ckpt,
                                      const VerifierArch *expected = nullptr);

 private:
  void CheckInput(const Eigen::MatrixXd &mel) const;
  void Register(bool random, std::uint64_t seed);

  VerifierArch arch_;
  ParameterSet params_;
};

/// Time-downsampled feature map (T' x final width).
Eigen::MatrixXd EncodeFrames(const MelSpectrogram &mel, const VerifierModel &model);
SpeakerEmbedding StatisticsPoolEmbedding(const Eigen::MatrixXd &features,
                                         double eps = 1e-8);
SpeakerEmbedding ExtractEmbedding(const MelSpectrogram &mel,
                                  const VerifierModel &model);
SpeakerEmbedding ExtractEmbedding(const Eigen::MatrixXd &frames,
                                  const VerifierModel &model);
/// Softmax posterior over training speakers.
Eigen::RowVectorXd Classify(const SpeakerEmbedding &emb,
                            const VerifierModel &model);

struct VerifierBatch {
  std::vector<Eigen::MatrixXd> crops;  // each crop_frames x n_mels
  std::vector<int> labels;
};

struct VerifierStepResult {
  double loss = 0.0;      // mean cross-entropy
  double accuracy = 0.0;  // fraction of argmax hits before the update
};

/// One optimizer update on the mean cross-entropy of the batch. Throws
/// DivergenceError on a non-finite loss.
VerifierStepResult TrainVerifierStep(const VerifierBatch &batch,
                                     VerifierModel &model, Optimizer &opt,
                                     long step);

/// Loss and parameter gradients of the mean batch cross-entropy, without
/// updating anything.
double VerifierLossAndGradients(const VerifierBatch &batch,
                                const VerifierModel &model,
                                std::vector<Eigen::MatrixXd> *grads,
                                double *accuracy = nullptr);

}  // namespace fctts

#endif  // FCTTS_VERIFIER_SPEAKER_ENCODER_H_
