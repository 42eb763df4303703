// src/eval/evaluation.cc

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

#include "fctts/eval/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "fctts/errors.h"
#include "fctts/nn/kernels.h"
#include "fctts/train/trainer.h"

namespace fctts {

std::vector<Trial> GenerateTrials(const DatasetManifest &manifest, int n_trials,
                                  std::uint64_t seed) {
  if (n_trials < 0 || n_trials % 2 != 0)
    throw ConfigError("n_trials must be a non-negative even number, got " +
                      std::to_string(n_trials));
  std::map<std::string, std::vector<std::string>> by_speaker;
  std::vector<std::pair<std::string, std::string>> all;  // (utt, speaker)
  for (const auto &e : manifest.entries) {
    by_speaker[e.speaker_id].push_back(e.utt_id);
    all.emplace_back(e.utt_id, e.speaker_id);
  }
  if (by_speaker.size() < 2)
    throw InvalidInputError("trials need at least two speakers");
  std::vector<std::string> multi;
  for (const auto &[spk, utts] : by_speaker)
    if (utts.size() >= 2) multi.push_back(spk);
  if (multi.empty())
    throw InvalidInputError("no speaker has two utterances for same-speaker trials");

  std::mt19937_64 rng(seed);
  auto uniform = [&rng](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };
  std::vector<Trial> trials;
  trials.reserve(static_cast<std::size_t>(n_trials));
  for (int i = 0; i < n_trials / 2; ++i) {
    const auto &utts = by_speaker[multi[uniform(multi.size())]];
    const std::size_t a = uniform(utts.size());
    std::size_t b = uniform(utts.size() - 1);
    if (b >= a) ++b;
    trials.push_back({utts[a], utts[b], true});
  }
  for (int i = 0; i < n_trials / 2; ++i) {
    const auto &[enroll, spk] = all[uniform(all.size())];
    const std::size_t others = all.size() - by_speaker[spk].size();
    std::size_t k = uniform(others);
    for (const auto &[utt, s] : all) {
      if (s == spk) continue;
      if (k-- == 0) {
        trials.push_back({enroll, utt, false});
        break;
      }
    }
  }
  std::shuffle(trials.begin(), trials.end(), rng);
  return trials;
}

EerResult ComputeEer(const std::vector<double> &scores,
                     const std::vector<bool> &same) {
  if (scores.size() != same.size())
    throw InvalidInputError("scores and labels differ in length");
  double n_tar = 0, n_non = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw InvalidInputError("non-finite score");
    (same[i] ? n_tar : n_non) += 1;
  }
  if (n_tar == 0 || n_non == 0)
    throw InvalidInputError("EER needs both target and non-target trials");

  std::vector<double> distinct(scores);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const double range = distinct.back() - distinct.front();
  const double delta = range > 0 ? 1e-3 * range : 1e-3;
  std::vector<double> thresholds{distinct.front() - delta};
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i)
    thresholds.push_back(0.5 * (distinct[i] + distinct[i + 1]));
  thresholds.push_back(distinct.back() + delta);

  auto rates = [&](double th, double *far, double *frr) {
    double fa = 0, fr = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (same[i] && scores[i] < th) fr += 1;
      if (!same[i] && scores[i] >= th) fa += 1;
    }
    *far = fa / n_non;
    *frr = fr / n_tar;
  };

  double far_prev = 0, frr_prev = 0;
  rates(thresholds[0], &far_prev, &frr_prev);
  for (std::size_t k = 1; k < thresholds.size(); ++k) {
    double far = 0, frr = 0;
    rates(thresholds[k], &far, &frr);
    const double d_prev = far_prev - frr_prev, d = far - frr;
    if (d <= 0) {
      const double a = d_prev / (d_prev - d);
      EerResult r;
      r.eer_percent = 100.0 * (far_prev + a * (far - far_prev));
      r.threshold = thresholds[k - 1] + a * (thresholds[k] - thresholds[k - 1]);
      return r;
    }
    far_prev = far;
    frr_prev = frr;
  }
  throw NumericalError("EER sweep found no crossing");  // unreachable
}

double CosineScore(const SpeakerEmbedding &a, const SpeakerEmbedding &b) {
  return CosineSimilarity(a.values, b.values);
}

std::string ProtocolName(Protocol p) { return p == Protocol::kDep ? "dep" : "indep"; }

Protocol ParseProtocol(const std::string &name) {
  if (name == "dep") return Protocol::kDep;
  if (name == "indep") return Protocol::kIndep;
  throw ConfigError("protocol must be dep or indep, got '" + name + "'");
}

EmbeddingTable NaturalEmbeddings(const DatasetManifest &manifest,
                                 const VerifierModel &verifier,
                                 const MelConfig &cfg) {
  EmbeddingTable out;
  for (const auto &e : manifest.entries)
    out[e.utt_id] = ExtractEmbedding(LoadMel(manifest, e, cfg), verifier);
  return out;
}

EvalSet SynthesizeEvalSet(const DatasetManifest &manifest,
                          const SynthesizerModel &synth,
                          const VerifierModel &verifier,
                          const EmbeddingTable &natural, Protocol protocol,
                          std::uint64_t seed,
                          const EvalSynthesisOptions &options) {
  if (synth.arch().spk_dim != verifier.arch().embedding_dim())
    throw ConfigError("synthesizer and verifier embedding sizes differ");
  EvalSet set;
  set.protocol = protocol;
  std::map<std::string, std::vector<const ManifestEntry *>> by_speaker;
  for (const auto &e : manifest.entries) by_speaker[e.speaker_id].push_back(&e);

  std::mt19937_64 rng(seed);
  for (const auto &[spk, utts] : by_speaker) {
    if (protocol == Protocol::kIndep && utts.size() < 2) {
      ++set.skipped_speakers;
      continue;
    }
    for (std::size_t i = 0; i < utts.size(); ++i) {
      const ManifestEntry &e = *utts[i];
      const ManifestEntry *ref = &e;
      if (protocol == Protocol::kIndep) {
        std::size_t j =
            std::uniform_int_distribution<std::size_t>(0, utts.size() - 2)(rng);
        if (j >= i) ++j;
        ref = utts[j];
      }
      const auto it = natural.find(ref->utt_id);
      if (it == natural.end())
        throw InvalidInputError("no natural embedding for '" + ref->utt_id + "'");

      DecodeOptions dec;
      dec.prenet_dropout = options.prenet_dropout;
      dec.seed = DeriveSeed(seed, static_cast<long>(set.records.size()), 1);
      const SynthesisOutput out =
          Synthesize(TextToIds(e.transcript), it->second, synth, options.limits, dec);
      Eigen::MatrixXd mel = out.mel_post;
      const int min_frames = verifier.arch().min_frames();
      if (mel.rows() < min_frames) {
        Eigen::MatrixXd padded =
            Eigen::MatrixXd::Constant(min_frames, mel.cols(), synth.arch().go_value);
        padded.topRows(mel.rows()) = mel;
        mel = std::move(padded);
      }
      EvalRecord r;
      r.utt_id = e.utt_id;
      r.ref_utt_id = ref->utt_id;
      r.speaker_id = spk;
      r.protocol = protocol;
      r.synthesized = ExtractEmbedding(mel, verifier);
      r.reference = it->second;
      r.frames = out.num_frames();
      r.stopped_naturally = out.stopped_naturally;
      set.records.push_back(std::move(r));
    }
  }
  return set;
}

std::string EvalReport::ToKeyValueText() const {
  std::ostringstream o;
  o.precision(10);
  o << "protocol = " << ProtocolName(protocol) << "\n"
    << "eer_percent = " << eer_percent << "\n"
    << "threshold_at_eer = " << threshold_at_eer << "\n"
    << "avg_cosine = " << avg_cosine << "\n"
    << "trial_count = " << trial_count << "\n"
    << "seed = " << seed << "\n";
  return o.str();
}

std::string EvalReport::TableHeader() {
  return "system\tset\tprotocol\tsv_eer_percent\tavg_cosine";
}

std::string EvalReport::TableRow(const std::string &system,
                                 const std::string &set) const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f\t%.3f", eer_percent, avg_cosine);
  return system + "\t" + set + "\t" + ProtocolName(protocol) + "\t" + buf;
}

namespace {

DatasetManifest Restrict(const DatasetManifest &m, const std::set<std::string> &ids) {
  DatasetManifest out;
  out.base_dir = m.base_dir;
  for (const auto &e : m.entries)
    if (ids.count(e.utt_id)) out.entries.push_back(e);
  return out;
}

const SpeakerEmbedding &Lookup(const EmbeddingTable &t, const std::string &id) {
  const auto it = t.find(id);
  if (it == t.end()) throw InvalidInputError("no embedding for '" + id + "'");
  return it->second;
}

EvalReport ScoreTrials(const std::vector<Trial> &trials,
                       const EmbeddingTable &enroll, const EmbeddingTable &test) {
  std::vector<double> scores;
  std::vector<bool> labels;
  for (const auto &t : trials) {
    scores.push_back(CosineScore(Lookup(enroll, t.enroll_utt_id),
                                 Lookup(test, t.test_utt_id)));
    labels.push_back(t.same_speaker);
  }
  const EerResult eer = ComputeEer(scores, labels);
  EvalReport r;
  r.eer_percent = eer.eer_percent;
  r.threshold_at_eer = eer.threshold;
  r.trial_count = static_cast<int>(trials.size());
  return r;
}

}  // namespace

EvalReport Evaluate(const EvalSet &set, const EmbeddingTable &natural,
                    const DatasetManifest &manifest, int n_trials,
                    std::uint64_t seed) {
  if (set.records.empty()) throw InvalidInputError("evaluation set is empty");
  EmbeddingTable synthesized;
  std::set<std::string> ids;
  double cos_sum = 0.0;
  for (const auto &r : set.records) {
    synthesized[r.utt_id] = r.synthesized;
    ids.insert(r.utt_id);
    cos_sum += CosineScore(r.synthesized, r.reference);
  }
  const auto trials = GenerateTrials(Restrict(manifest, ids), n_trials, seed);
  EvalReport report = ScoreTrials(trials, natural, synthesized);
  report.avg_cosine = cos_sum / static_cast<double>(set.records.size());
  report.protocol = set.protocol;
  report.seed = seed;
  return report;
}

EvalReport EvaluateNatural(const EmbeddingTable &natural,
                           const DatasetManifest &manifest, int n_trials,
                           std::uint64_t seed) {
  const auto trials = GenerateTrials(manifest, n_trials, seed);
  EvalReport report = ScoreTrials(trials, natural, natural);
  report.avg_cosine = 1.0;
  report.seed = seed;
  return report;
}

void ExportEmbeddings(const std::string &path, const std::vector<EmbeddingRow> &rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write embeddings to " + path);
  out << "utt_id\tspeaker_id\ttag";
  const Eigen::Index d = rows.empty() ? 0 : rows.front().values.size();
  for (Eigen::Index k = 0; k < d; ++k) out << "\te" << k;
  out << '\n';
  char buf[32];
  for (const auto &r : rows) {
    if (r.values.size() != d)
      throw ConfigError("embedding rows have inconsistent dimensions");
    out << r.utt_id << '\t' << r.speaker_id << '\t' << r.tag;
    for (Eigen::Index k = 0; k < d; ++k) {
      std::snprintf(buf, sizeof buf, "\t%.9g", r.values(k));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

std::vector<EmbeddingRow> ReadEmbeddings(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read embeddings from " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<EmbeddingRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    EmbeddingRow r;
    std::getline(ls, r.utt_id, '\t');
    std::getline(ls, r.speaker_id, '\t');
    std::getline(ls, r.tag, '\t');
    std::vector<double> v;
    std::string field;
    while (std::getline(ls, field, '\t')) v.push_back(std::stod(field));
    r.values = Eigen::Map<Eigen::RowVectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    rows.push_back(std::move(r));
  }
  return rows;
}

Projection2d Project2d(const Eigen::MatrixXd &x) {
  if (x.rows() < 1 || x.cols() < 2)
    throw InvalidInputError("PCA needs at least one row and two dimensions");
  Projection2d p;
  p.mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - p.mean;
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / std::max<double>(1.0, x.rows() - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw NumericalError("PCA eigensolver failed");
  const Eigen::Index d = x.cols();
  p.components.resize(d, 2);
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd v = es.eigenvectors().col(d - 1 - c);  // ascending order
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    p.components.col(c) = v;
    p.variances(c) = es.eigenvalues()(d - 1 - c);
  }
  p.coords = centered * p.components;
  return p;
}

}  // namespace fctts
