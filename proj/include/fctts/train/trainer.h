// include/fctts/train/trainer.h

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

#ifndef FCTTS_TRAIN_TRAINER_H_
#define FCTTS_TRAIN_TRAINER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "fctts/data/manifest.h"
#include "fctts/nn/optimizer.h"
#include "fctts/train/config.h"
#include "fctts/train/losses.h"

namespace fctts {

/// One utterance ready for synthesizer training.
struct TrainingExample {
  std::string utt_id;
  std::string speaker_id;
  std::vector<int> ids;
  Eigen::MatrixXd mel;  // T x n_mels target
  SpeakerEmbedding ref;  // verifier embedding of `mel` itself
};

std::vector<TrainingExample> PrepareExamples(const DatasetManifest &manifest,
                                             Split split, const MelConfig &cfg,
                                             const VerifierModel &verifier);

/// Length-bucketed batches. Examples are sorted by (frames, utt_id) and cut
/// into consecutive buckets of batch_size; every epoch visits the buckets
/// in a seeded random order. Batch(step) depends only on (seed, step).
class BatchSchedule {
 public:
  BatchSchedule(const std::vector<TrainingExample> &examples, int batch_size,
                std::uint64_t seed);
  std::vector<int> Batch(long step) const;
  int num_buckets() const { return static_cast<int>(buckets_.size()); }

 private:
  std::vector<std::vector<int>> buckets_;
  std::uint64_t seed_;
};

/// Seeds derived from (seed, a, b) through std::seed_seq.
std::uint64_t DeriveSeed(std::uint64_t seed, long a, long b);

/// Batch-level composite loss and its gradient with respect to every
/// synthesizer parameter (in parameter order). Mel terms are means over all
/// frames and bins of the batch, the stop term a mean over all frames and
/// the speaker term a mean over utterances. `verifier` is used only when
/// phase is fc; its parameters enter each graph as constants.
LossBreakdown BatchLossAndGradients(
    const std::vector<const TrainingExample *> &batch,
    const SynthesizerModel &synth, const VerifierModel *verifier,
    const TrainConfig &cfg, long step, std::vector<Eigen::MatrixXd> *grads);

struct TrainStepResult {
  LossBreakdown loss;
  double grad_norm = 0.0;
};

/// One optimizer update. Throws DivergenceError naming the first
/// non-finite loss term.
TrainStepResult TrainStep(const std::vector<const TrainingExample *> &batch,
                          SynthesizerModel &synth, const VerifierModel *verifier,
                          Optimizer &opt, const TrainConfig &cfg, long step);

struct TrainingSummary {
  std::string final_checkpoint;
  std::string metrics_path;
  long first_step = 0;
  long last_step = 0;  // exclusive
  std::vector<LossBreakdown> history;
};

/// Synthesizer training (baseline or fc). Writes
///   <output_dir>/ckpt_<step>.fckp every checkpoint_every global steps,
///   <output_dir>/final.fckp and an append-only <output_dir>/metrics.tsv.
TrainingSummary RunTraining(const DatasetManifest &manifest, const TrainConfig &cfg);

struct VerifierTrainingSummary {
  std::string final_checkpoint;
  std::vector<VerifierStepResult> history;
  std::vector<std::string> speakers;  // label order
};

/// Verifier training on random fixed-length crops of the train split.
VerifierTrainingSummary RunVerifierTraining(const DatasetManifest &manifest,
                                            const TrainConfig &cfg);

/// Training-speaker list stored in a verifier checkpoint.
std::vector<std::string> VerifierSpeakers(const Checkpoint &ckpt);

inline constexpr char kMetricsHeader[] =
    "step\tphase\tmse_pre\tmse_post\tstop_loss\treg_loss\tspeaker_loss\ttotal";

}  // namespace fctts

#endif  // FCTTS_TRAIN_TRAINER_H_
