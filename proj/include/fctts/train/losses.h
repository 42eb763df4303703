// include/fctts/train/losses.h

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

#ifndef FCTTS_TRAIN_LOSSES_H_
#define FCTTS_TRAIN_LOSSES_H_

#include <string>
#include <vector>

#include "fctts/synth/synthesizer.h"
#include "fctts/verifier/speaker_encoder.h"

namespace fctts {

struct LossWeights {
  double w_reg = 1e-6;
  double w_spk = 0.0;
};

struct LossBreakdown {
  double mse_pre = 0.0;
  double mse_post = 0.0;
  double stop_loss = 0.0;
  double reg_loss = 0.0;
  double speaker_loss = 0.0;
  double total = 0.0;
  LossWeights weights;

  /// mse_pre + mse_post + stop_loss + w_reg * reg_loss + w_spk * speaker_loss,
  /// always evaluated in this order.
  double Recompute() const;
  /// Name of the first non-finite term, or empty.
  std::string FirstNonFinite() const;
};

/// 1 - cos(ref, verifier(mel_post)).
double SpeakerFeedbackLoss(const Eigen::MatrixXd &mel_post,
                           const SpeakerEmbedding &ref,
                           const VerifierModel &verifier);

/// Tape version. `verifier_binding` should bind the verifier's parameters as
/// constants so that no gradient is routed to them.
ad::Var SpeakerFeedbackLoss(ad::Tape &tape, const Binding &verifier_binding,
                            ad::Var mel_post, ad::Var ref,
                            const VerifierModel &verifier);

/// d(loss)/d(mel_post).
Eigen::MatrixXd SpeakerFeedbackGradient(const Eigen::MatrixXd &mel_post,
                                        const SpeakerEmbedding &ref,
                                        const VerifierModel &verifier);

/// Sum of squared parameter values.
double RegularizationLoss(const ParameterSet &params);

/// Checks that targets are 0/1 with exactly one trailing block of ones.
void ValidateStopTargets(const Eigen::MatrixXd &stop_targets);

/// Loss terms of one utterance. With `verifier` null the speaker term is 0.
LossBreakdown CompositeLoss(const SynthesisOutput &out,
                            const Eigen::MatrixXd &target_mel,
                            const Eigen::MatrixXd &stop_targets,
                            const SynthesizerModel &synth,
                            const VerifierModel *verifier,
                            const SpeakerEmbedding *ref, LossWeights weights);

}  // namespace fctts

#endif  // FCTTS_TRAIN_LOSSES_H_
