// src/train/losses.cc

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

#include "fctts/train/losses.h"

#include <algorithm>
#include <cmath>

#include "fctts/errors.h"

namespace fctts {

double LossBreakdown::Recompute() const {
  return mse_pre + mse_post + stop_loss + weights.w_reg * reg_loss +
         weights.w_spk * speaker_loss;
}

std::string LossBreakdown::FirstNonFinite() const {
  if (!std::isfinite(mse_pre)) return "mse_pre";
  if (!std::isfinite(mse_post)) return "mse_post";
  if (!std::isfinite(stop_loss)) return "stop_loss";
  if (!std::isfinite(reg_loss)) return "reg_loss";
  if (!std::isfinite(speaker_loss)) return "speaker_loss";
  if (!std::isfinite(total)) return "total";
  return "";
}

ad::Var SpeakerFeedbackLoss(ad::Tape &tape, const Binding &verifier_binding,
                            ad::Var mel_post, ad::Var ref,
                            const VerifierModel &verifier) {
  if (ref.cols() != verifier.arch().embedding_dim() || ref.rows() != 1)
    throw ConfigError("reference embedding has dimension " +
                      std::to_string(ref.cols()) + ", verifier produces " +
                      std::to_string(verifier.arch().embedding_dim()));
  ad::Var emb = verifier.Embed(tape, verifier_binding, mel_post);
  // 1 - cos, written as a scaled cosine plus a constant.
  ad::Var neg = ad::Scale(ad::CosineSimilarity(ref, emb), -1.0);
  return ad::Add(neg, tape.Constant(Eigen::MatrixXd::Ones(1, 1)));
}

double SpeakerFeedbackLoss(const Eigen::MatrixXd &mel_post,
                           const SpeakerEmbedding &ref,
                           const VerifierModel &verifier) {
  ad::Tape tape;
  Binding b = Bind(tape, verifier.params(), false);
  const double loss = SpeakerFeedbackLoss(tape, b, tape.Constant(mel_post),
                                          tape.Constant(ref.values), verifier)
                          .scalar();
  return std::clamp(loss, 0.0, 2.0);
}

Eigen::MatrixXd SpeakerFeedbackGradient(const Eigen::MatrixXd &mel_post,
                                        const SpeakerEmbedding &ref,
                                        const VerifierModel &verifier) {
  ad::Tape tape;
  Binding b = Bind(tape, verifier.params(), false);
  ad::Var mel = tape.Leaf(mel_post);
  tape.Backward(SpeakerFeedbackLoss(tape, b, mel, tape.Constant(ref.values), verifier));
  return tape.Gradient(mel);
}

double RegularizationLoss(const ParameterSet &params) {
  return params.SquaredNorm();
}

void ValidateStopTargets(const Eigen::MatrixXd &t) {
  if (t.cols() != 1 || t.rows() < 1)
    throw ConfigError("stop targets must be a non-empty column");
  Eigen::Index first_one = t.rows();
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    const double v = t(i, 0);
    if (v != 0.0 && v != 1.0) throw ConfigError("stop targets must be 0 or 1");
    if (v == 1.0 && first_one == t.rows()) first_one = i;
    if (v == 0.0 && first_one < i)
      throw ConfigError("stop targets must end in one block of ones");
  }
  if (first_one == t.rows()) throw ConfigError("stop targets contain no 1");
}

LossBreakdown CompositeLoss(const SynthesisOutput &out,
                            const Eigen::MatrixXd &target_mel,
                            const Eigen::MatrixXd &stop_targets,
                            const SynthesizerModel &synth,
                            const VerifierModel *verifier,
                            const SpeakerEmbedding *ref, LossWeights weights) {
  if (out.mel_pre.rows() != target_mel.rows() ||
      out.mel_pre.cols() != target_mel.cols() ||
      out.mel_post.rows() != target_mel.rows() ||
      out.mel_post.cols() != target_mel.cols())
    throw ConfigError("predicted and target mels differ in shape");
  if (out.stop_logits.size() != stop_targets.rows())
    throw ConfigError("stop logits and targets differ in length");
  ValidateStopTargets(stop_targets);
  if (weights.w_spk > 0 && (!verifier || !ref))
    throw ConfigError("speaker loss weight set without a verifier/reference");

  ad::Tape tape;
  const double n = static_cast<double>(target_mel.size());
  LossBreakdown l;
  l.weights = weights;
  l.mse_pre = (out.mel_pre - target_mel).squaredNorm() / n;
  l.mse_post = (out.mel_post - target_mel).squaredNorm() / n;
  l.stop_loss = ad::BceWithLogitsSum(tape.Constant(out.stop_logits), stop_targets)
                    .scalar() /
                static_cast<double>(stop_targets.rows());
  l.reg_loss = RegularizationLoss(synth.params());
  if (verifier && ref) l.speaker_loss = SpeakerFeedbackLoss(out.mel_post, *ref, *verifier);
  l.total = l.Recompute();
  return l;
}

}  // namespace fctts
