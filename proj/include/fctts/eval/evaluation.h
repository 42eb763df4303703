// include/fctts/eval/evaluation.h

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

#ifndef FCTTS_EVAL_EVALUATION_H_
#define FCTTS_EVAL_EVALUATION_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fctts/data/manifest.h"
#include "fctts/synth/synthesizer.h"
#include "fctts/verifier/speaker_encoder.h"

namespace fctts {

struct Trial {
  std::string enroll_utt_id;
  std::string test_utt_id;
  bool same_speaker = false;

  bool operator==(const Trial &o) const = default;
};

/// Exactly n_trials / 2 same-speaker and n_trials / 2 cross-speaker trials
/// over all entries of `manifest`, in seeded random order. Same-speaker
/// trials draw a speaker with at least two utterances, then two distinct
/// utterances; cross-speaker trials draw an enrollment utterance and a test
/// utterance of a different speaker.
std::vector<Trial> GenerateTrials(const DatasetManifest &manifest, int n_trials,
                                  std::uint64_t seed);

struct EerResult {
  double eer_percent = 0.0;
  double threshold = 0.0;
};

/// Threshold sweep over s_min - delta, the midpoints between consecutive
/// distinct scores, and s_max + delta. A trial is accepted when
/// score >= threshold. FAR - FRR strictly decreases along the sweep, and the
/// EER is read off by linear interpolation between the last operating point
/// with FAR > FRR and the next one.
EerResult ComputeEer(const std::vector<double> &scores,
                     const std::vector<bool> &same_speaker);

double CosineScore(const SpeakerEmbedding &a, const SpeakerEmbedding &b);

enum class Protocol { kDep, kIndep };
std::string ProtocolName(Protocol p);
Protocol ParseProtocol(const std::string &name);

using EmbeddingTable = std::map<std::string, SpeakerEmbedding>;

/// Natural-speech embeddings of every manifest entry.
EmbeddingTable NaturalEmbeddings(const DatasetManifest &manifest,
                                 const VerifierModel &verifier,
                                 const MelConfig &cfg = {});

struct EvalRecord {
  std::string utt_id;
  std::string ref_utt_id;
  std::string speaker_id;
  Protocol protocol = Protocol::kDep;
  SpeakerEmbedding synthesized;
  SpeakerEmbedding reference;  // the conditioning embedding
  Eigen::Index frames = 0;
  bool stopped_naturally = false;
};

struct EvalSet {
  Protocol protocol = Protocol::kDep;
  std::vector<EvalRecord> records;
  int skipped_speakers = 0;  // indep speakers with a single utterance
};

struct EvalSynthesisOptions {
  SynthesisLimits limits;
  bool prenet_dropout = true;
};

/// Synthesizes every manifest entry with the embedding of its reference
/// utterance (dep: itself; indep: a seeded draw from the same speaker's
/// other utterances) and embeds the result with the verifier. Outputs
/// shorter than the verifier's minimum length are padded with floor frames.
EvalSet SynthesizeEvalSet(const DatasetManifest &manifest,
                          const SynthesizerModel &synth,
                          const VerifierModel &verifier,
                          const EmbeddingTable &natural, Protocol protocol,
                          std::uint64_t seed,
                          const EvalSynthesisOptions &options = {});

struct EvalReport {
  double eer_percent = 0.0;
  double threshold_at_eer = 0.0;
  double avg_cosine = 0.0;
  Protocol protocol = Protocol::kDep;
  int trial_count = 0;
  std::uint64_t seed = 0;

  std::string ToKeyValueText() const;
  /// Header and row of the summary table: system, set, protocol, SV-EER, cos.
  static std::string TableHeader();
  std::string TableRow(const std::string &system, const std::string &set) const;
};

/// EER over trials whose enrollment side is natural speech and whose test
/// side is the synthesized utterance, plus the mean cosine between each
/// synthesized embedding and its reference embedding.
EvalReport Evaluate(const EvalSet &set, const EmbeddingTable &natural,
                    const DatasetManifest &manifest, int n_trials,
                    std::uint64_t seed);

/// Natural-vs-natural EER of the verifier on the same kind of trials.
EvalReport EvaluateNatural(const EmbeddingTable &natural,
                           const DatasetManifest &manifest, int n_trials,
                           std::uint64_t seed);

struct EmbeddingRow {
  std::string utt_id;
  std::string speaker_id;
  std::string tag;  // "natural" or "synthesized"
  Eigen::RowVectorXd values;
};

/// Tab-separated: utt_id, speaker_id, tag, then d values.
void ExportEmbeddings(const std::string &path, const std::vector<EmbeddingRow> &rows);
std::vector<EmbeddingRow> ReadEmbeddings(const std::string &path);

struct Projection2d {
  Eigen::MatrixXd coords;      // N x 2
  Eigen::MatrixXd components;  // d x 2, unit columns, descending variance
  Eigen::RowVectorXd mean;     // 1 x d
  Eigen::Vector2d variances;
};

/// PCA onto the two leading components. Each component's sign is fixed so
/// that its largest-magnitude entry is positive.
Projection2d Project2d(const Eigen::MatrixXd &x);

}  // namespace fctts

#endif  // FCTTS_EVAL_EVALUATION_H_
