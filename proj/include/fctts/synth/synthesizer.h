// include/fctts/synth/synthesizer.h

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

#ifndef FCTTS_SYNTH_SYNTHESIZER_H_
#define FCTTS_SYNTH_SYNTHESIZER_H_

#include <cstdint>
#include <random>
#include <vector>

#include "json.hpp"

#include "fctts/ad/ops.h"
#include "fctts/audio/features.h"
#include "fctts/nn/checkpoint.h"
#include "fctts/nn/parameters.h"
#include "fctts/synth/text.h"
#include "fctts/verifier/speaker_encoder.h"

namespace fctts {

struct SynthArch {
  int vocab_size = Vocabulary::Size();
  int char_dim = 256;
  int enc_convs = 5;
  int enc_kernel = 5;
  int enc_width = 512;  // e; BLSTM uses enc_width / 2 per direction
  int spk_dim = 512;    // d
  int n_mels = 80;
  int prenet_dim = 256;
  int prenet_layers = 2;
  double prenet_dropout = 0.5;
  int attn_dim = 128;
  int loc_filters = 32;
  int loc_kernel = 31;
  int decoder_dim = 1024;
  int postnet_layers = 5;
  int postnet_width = 512;
  int postnet_kernel = 5;
  /// Frames predicted per decoder step. Only 1 is supported.
  int reduction = 1;
  /// Go-frame value (the log floor of the feature space).
  double go_value = -23.025850929940457;

  static SynthArch Full(int spk_dim, const MelConfig &mel);
  static SynthArch Toy(int spk_dim, const MelConfig &mel);

  int memory_dim() const { return enc_width + spk_dim; }
  /// Number of frames on each side that one PostNet output frame sees.
  int postnet_radius() const { return postnet_layers * (postnet_kernel / 2); }

  void Validate() const;
  nlohmann::json ToJson() const;
  static SynthArch FromJson(const nlohmann::json &j);
  bool operator==(const SynthArch &o) const { return ToJson() == o.ToJson(); }
};

/// Recurrent decoder state for one decoding session.
struct DecoderState {
  ad::Var h, c;      // 1 x decoder_dim
  ad::Var context;   // 1 x memory_dim
  ad::Var prev_att;  // 1 x L
  ad::Var cum_att;   // 1 x L, sum of all attention rows so far
};

struct DecoderStepOutput {
  ad::Var mel;        // 1 x n_mels
  ad::Var stop;       // 1 x 1 logit
  ad::Var attention;  // 1 x L
  DecoderState next;
};

struct SynthesisGraph {
  ad::Var mel_pre;      // T x n_mels
  ad::Var residual;     // T x n_mels
  ad::Var mel_post;     // T x n_mels
  ad::Var stop_logits;  // T x 1
  ad::Var alignments;   // T x L
};

struct SynthesisOutput {
  Eigen::MatrixXd mel_pre;
  Eigen::MatrixXd residual;
  Eigen::MatrixXd mel_post;
  Eigen::VectorXd stop_logits;
  Eigen::MatrixXd alignments;
  bool stopped_naturally = false;

  Eigen::Index num_frames() const { return mel_post.rows(); }
};

/// PreNet dropout source. With `enabled` false the PreNet is deterministic.
struct Dropout {
  bool enabled = false;
  double rate = 0.5;
  std::mt19937_64 *rng = nullptr;
};

class SynthesizerModel {
 public:
  SynthesizerModel() = default;
  SynthesizerModel(SynthArch arch, std::uint64_t seed);
  SynthesizerModel(SynthArch arch, ParameterSet params);

  const SynthArch &arch() const { return arch_; }
  const ParameterSet &params() const { return params_; }
  ParameterSet &params() { return params_; }

  /// Character ids -> L x e encoder states (unconditioned).
  ad::Var EncodeText(ad::Tape &tape, const Binding &b,
                     const std::vector<int> &ids) const;
  /// Appends the same 1 x d speaker row to every encoder state.
  ad::Var Condition(ad::Tape &tape, ad::Var states, ad::Var emb) const;
  /// Memory projection for the attention energies (L x attn_dim).
  ad::Var ProcessMemory(ad::Tape &tape, const Binding &b, ad::Var memory) const;
  DecoderState ZeroState(ad::Tape &tape, Eigen::Index length) const;
  ad::Var GoFrame(ad::Tape &tape) const;
  /// One attention + LSTM step. Throws NumericalError naming `step` if the
  /// mel or stop output is non-finite.
  DecoderStepOutput DecoderStep(ad::Tape &tape, const Binding &b,
                                ad::Var prev_frame, const DecoderState &state,
                                ad::Var memory, ad::Var processed_memory,
                                const Dropout &dropout, Eigen::Index step = 0) const;
  /// Returns the PostNet residual for a T x n_mels input.
  ad::Var PostnetResidual(ad::Tape &tape, const Binding &b, ad::Var mel_pre) const;

  /// Decodes with ground-truth previous frames; T_out = target rows.
  SynthesisGraph TeacherForced(ad::Tape &tape, const Binding &b,
                               const std::vector<int> &ids, ad::Var emb,
                               const Eigen::MatrixXd &target,
                               const Dropout &dropout) const;

  /// Indices of the parameter groups, for gradient checks and reporting.
  std::vector<int> GroupIndices(const std::string &prefix) const;

  Checkpoint ToCheckpoint() const;
  static SynthesizerModel FromCheckpoint(const Checkpoint &ckpt,
                                         const SynthArch *expected = nullptr);

 private:
  ad::Var P(const Binding &b, const std::string &name) const {
    return b[params_.IndexOf(name)];
  }
  void Register(bool random, std::uint64_t seed);

  SynthArch arch_;
  ParameterSet params_;
};

struct SynthesisLimits {
  double stop_threshold = 0.5;
  /// 0 selects the default max(200, 12 * L).
  int max_steps = 0;

  int Resolve(std::size_t text_length) const;
};

struct DecodeOptions {
  bool prenet_dropout = true;
  std::uint64_t seed = 0;
};

Eigen::MatrixXd EncodeText(const TextSequence &seq, const SynthesizerModel &model);
/// Pure broadcast-concatenation of `emb` onto every row of `states`.
Eigen::MatrixXd Condition(const Eigen::MatrixXd &states,
                          const SpeakerEmbedding &emb, int expected_dim);

struct PostnetResult {
  Eigen::MatrixXd residual;
  Eigen::MatrixXd mel_post;
};
PostnetResult PostnetRefine(const Eigen::MatrixXd &mel_pre,
                            const SynthesizerModel &model);

SynthesisOutput RunTeacherForced(const TextSequence &seq,
                                 const SpeakerEmbedding &emb,
                                 const MelSpectrogram &target,
                                 const SynthesizerModel &model,
                                 const DecodeOptions &options = {});

/// Free-running decoding. Stops after the first frame whose stop
/// probability exceeds the threshold (that frame is kept), or at max_steps.
SynthesisOutput Synthesize(const TextSequence &seq, const SpeakerEmbedding &emb,
                           const SynthesizerModel &model,
                           const SynthesisLimits &limits = {},
                           const DecodeOptions &options = {});

/// Stop targets for T frames: zeros with a single 1 on the last frame.
Eigen::MatrixXd StopTargets(Eigen::Index frames);

}  // namespace fctts

#endif  // FCTTS_SYNTH_SYNTHESIZER_H_
