// tests/test_evaluation.cc

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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"

#include "fctts/data/toy.h"
#include "fctts/errors.h"
#include "fctts/eval/evaluation.h"
#include "fixtures.h"
#include "test_util.h"

using namespace fctts;
using testutil::RandomMatrix;

namespace {

// Exhaustive oracle: every candidate threshold is scored by direct
// counting, then the FAR/FRR crossing is interpolated linearly.
EerResult BruteForceEer(const std::vector<double> &scores, const std::vector<bool> &same) {
  std::vector<double> u(scores);
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  const double delta = 1e-3 * (u.back() - u.front());
  std::vector<double> th{u.front() - delta};
  for (std::size_t i = 1; i < u.size(); ++i) th.push_back(0.5 * (u[i - 1] + u[i]));
  th.push_back(u.back() + delta);
  double n_same = 0, n_diff = 0;
  for (bool s : same) (s ? n_same : n_diff) += 1;
  std::vector<double> far, frr;
  for (double t : th) {
    double fa = 0, fr = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (same[i] && scores[i] < t) fr += 1;
      if (!same[i] && scores[i] >= t) fa += 1;
    }
    far.push_back(fa / n_diff);
    frr.push_back(fr / n_same);
  }
  for (std::size_t k = 0; k + 1 < th.size(); ++k) {
    const double d0 = far[k] - frr[k], d1 = far[k + 1] - frr[k + 1];
    if (d0 > 0 && d1 <= 0) {
      const double a = d0 / (d0 - d1);
      return {100.0 * (far[k] + a * (far[k + 1] - far[k])), th[k] + a * (th[k + 1] - th[k])};
    }
  }
  return {100.0 * far.front(), th.front()};
}

DatasetManifest SyntheticManifest(int speakers, int per_speaker) {
  DatasetManifest m;
  for (int s = 0; s < speakers; ++s)
    for (int u = 0; u < per_speaker; ++u)
      m.entries.push_back({"s" + std::to_string(s) + "_" + std::to_string(u),
                           "s" + std::to_string(s), Split::kTest, "x.wav", "abc"});
  return m;
}

// Natural embeddings clustered by speaker.
EmbeddingTable ClusteredTable(const DatasetManifest &m, std::mt19937_64 &rng, double spread) {
  std::map<std::string, Eigen::RowVectorXd> centers;
  EmbeddingTable t;
  for (const auto &e : m.entries) {
    if (!centers.count(e.speaker_id)) centers[e.speaker_id] = RandomMatrix(1, 16, rng).row(0);
    t[e.utt_id] = SpeakerEmbedding{centers[e.speaker_id] + spread * RandomMatrix(1, 16, rng).row(0)};
  }
  return t;
}

EvalSet SetFromTable(const DatasetManifest &m, const EmbeddingTable &synth,
                     const EmbeddingTable &natural, Protocol p) {
  EvalSet s;
  s.protocol = p;
  for (const auto &e : m.entries) {
    EvalRecord r;
    r.utt_id = r.ref_utt_id = e.utt_id;
    r.speaker_id = e.speaker_id;
    r.protocol = p;
    r.synthesized = synth.at(e.utt_id);
    r.reference = natural.at(e.utt_id);
    s.records.push_back(r);
  }
  return s;
}

}  // namespace

TEST_CASE("EER of perfect and inverted separation") {
  const std::vector<double> s{0.9, 0.8, 0.1, 0.2};
  const EerResult good = ComputeEer(s, {true, true, false, false});
  CHECK(good.eer_percent == doctest::Approx(0.0));
  CHECK(good.threshold > 0.2);
  CHECK(good.threshold < 0.8);
  CHECK(ComputeEer(s, {false, false, true, true}).eer_percent == doctest::Approx(100.0));
  CHECK_THROWS_AS(ComputeEer(s, {true, true, true, true}), InvalidInputError);
  CHECK_THROWS_AS(ComputeEer(s, {true, false}), InvalidInputError);
}

TEST_CASE("EER agrees with the exhaustive-threshold oracle") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> size(50, 500);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = size(rng);
    std::vector<double> scores;
    std::vector<bool> labels;
    for (int i = 0; i < k; ++i) {
      const bool same = i % 2 == 0 || n(rng) > 1.0;
      labels.push_back(same);
      // Ties on a coarse grid in some sets.
      double v = n(rng) + (same ? 1.0 : 0.0);
      if (trial % 3 == 0) v = std::round(v * 4.0) / 4.0;
      scores.push_back(v);
    }
    const EerResult a = ComputeEer(scores, labels), b = BruteForceEer(scores, labels);
    CHECK(std::abs(a.eer_percent - b.eer_percent) < 1e-9);
    CHECK(std::abs(a.threshold - b.threshold) < 1e-9);
  }
}

TEST_CASE("EER depends only on the order of the scores") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> s, t;
    std::vector<bool> l;
    for (int i = 0; i < 200; ++i) {
      l.push_back(i % 3 != 0);
      s.push_back(n(rng) + (l.back() ? 0.8 : 0.0));
      t.push_back(std::exp(2.0 * s.back()) + 5.0);
    }
    CHECK(ComputeEer(s, l).eer_percent == doctest::Approx(ComputeEer(t, l).eer_percent).epsilon(1e-12));
  }
}

TEST_CASE("trial generation: balance, determinism and validity") {
  const DatasetManifest m = SyntheticManifest(4, 3);
  std::map<std::string, std::string> spk;
  for (const auto &e : m.entries) spk[e.utt_id] = e.speaker_id;
  for (int n = 2; n <= 200; n += 2) {
    const auto t = GenerateTrials(m, n, static_cast<std::uint64_t>(n));
    REQUIRE(static_cast<int>(t.size()) == n);
    CHECK(std::count_if(t.begin(), t.end(), [](const Trial &x) { return x.same_speaker; }) ==
          n / 2);
    for (const auto &x : t) {
      CHECK(x.enroll_utt_id != x.test_utt_id);
      CHECK(x.same_speaker == (spk[x.enroll_utt_id] == spk[x.test_utt_id]));
    }
  }
  CHECK(GenerateTrials(m, 10, 7) == GenerateTrials(m, 10, 7));
  CHECK(GenerateTrials(m, 10, 7) != GenerateTrials(m, 10, 8));
  CHECK_THROWS_AS(GenerateTrials(m, 11, 7), ConfigError);
  CHECK_THROWS_AS(GenerateTrials(SyntheticManifest(1, 5), 10, 7), InvalidInputError);
  CHECK_THROWS_AS(GenerateTrials(SyntheticManifest(3, 1), 10, 7), InvalidInputError);
}

TEST_CASE("cosine score properties") {
  std::mt19937_64 rng(3);
  const SpeakerEmbedding a{RandomMatrix(1, 8, rng).row(0)}, b{RandomMatrix(1, 8, rng).row(0)};
  CHECK(CosineScore(a, a) == doctest::Approx(1.0));
  CHECK(CosineScore(a, SpeakerEmbedding{2.0 * a.values}) == doctest::Approx(1.0));
  CHECK(CosineScore(a, b) == CosineScore(b, a));
  CHECK(CosineScore(SpeakerEmbedding{3.5 * a.values}, b) == doctest::Approx(CosineScore(a, b)));
  Eigen::RowVectorXd x = Eigen::RowVectorXd::Zero(4), y = Eigen::RowVectorXd::Zero(4);
  x(0) = 1.0;
  y(2) = -3.0;
  CHECK(CosineScore(SpeakerEmbedding{x}, SpeakerEmbedding{y}) == 0.0);
  CHECK_THROWS_AS(CosineScore(a, SpeakerEmbedding{Eigen::RowVectorXd::Zero(8)}), NumericalError);
  CHECK_THROWS_AS(CosineScore(a, SpeakerEmbedding{Eigen::RowVectorXd::Ones(3)}), ConfigError);
}

TEST_CASE("perfect cloning reproduces the natural-speech EER") {
  std::mt19937_64 rng(4);
  const DatasetManifest m = SyntheticManifest(6, 8);
  const EmbeddingTable natural = ClusteredTable(m, rng, 0.8);
  const EvalReport synth = Evaluate(SetFromTable(m, natural, natural, Protocol::kDep), natural, m, 400, 9);
  const EvalReport nat = EvaluateNatural(natural, m, 400, 9);
  CHECK(synth.avg_cosine == doctest::Approx(1.0));
  CHECK(synth.eer_percent == doctest::Approx(nat.eer_percent));
  CHECK(synth.trial_count == 400);
  const EvalReport again = Evaluate(SetFromTable(m, natural, natural, Protocol::kDep), natural, m, 400, 9);
  CHECK(again.eer_percent == synth.eer_percent);
  CHECK(again.threshold_at_eer == synth.threshold_at_eer);
}

TEST_CASE("random embeddings give chance-level EER") {
  std::mt19937_64 rng(5);
  const DatasetManifest m = SyntheticManifest(8, 10);
  const EmbeddingTable natural = ClusteredTable(m, rng, 0.5);
  EmbeddingTable noise;
  for (const auto &e : m.entries) noise[e.utt_id] = SpeakerEmbedding{RandomMatrix(1, 16, rng).row(0)};
  const EvalReport r = Evaluate(SetFromTable(m, noise, natural, Protocol::kDep), natural, m, 500, 3);
  CHECK(std::abs(r.eer_percent - 50.0) < 10.0);
}

TEST_CASE("report text and table row") {
  EvalReport r;
  r.eer_percent = 12.5;
  r.avg_cosine = 0.75;
  r.protocol = Protocol::kIndep;
  r.trial_count = 1000;
  r.seed = 3;
  const std::string kv = r.ToKeyValueText();
  for (const char *k : {"eer_percent", "threshold_at_eer", "avg_cosine", "protocol", "trial_count", "seed"})
    CHECK(kv.find(k) != std::string::npos);
  CHECK(kv.find("indep") != std::string::npos);
  const std::string row = r.TableRow("fc", "val");
  CHECK(row.find("fc") == 0);
  CHECK(row.find("12.5") != std::string::npos);
  CHECK(EvalReport::TableHeader() == "system\tset\tprotocol\tsv_eer_percent\tavg_cosine");
  CHECK(ParseProtocol(ProtocolName(Protocol::kDep)) == Protocol::kDep);
  CHECK_THROWS_AS(ParseProtocol("both"), ConfigError);
}

TEST_CASE("eval set synthesis follows the protocol definitions") {
  testutil::TempDir dir;
  ToyDatasetSpec spec;
  spec.n_speakers = 2;
  spec.utterances_per_speaker = 3;
  spec.val_per_speaker = 0;
  spec.seed = 2;
  DatasetManifest m = MakeToyDataset(spec, dir.path("toy"));
  const VerifierModel v(VerifierArch::Toy(2), 1);
  const SynthesizerModel s(SynthArch::Toy(64, MelConfig{}), 2);
  const EmbeddingTable natural = NaturalEmbeddings(m, v);
  CHECK(natural.size() == 6);
  EvalSynthesisOptions opt;
  opt.limits.max_steps = 12;
  opt.prenet_dropout = false;

  const EvalSet dep = SynthesizeEvalSet(m, s, v, natural, Protocol::kDep, 1, opt);
  REQUIRE(dep.records.size() == 6);
  for (const auto &r : dep.records) {
    CHECK(r.ref_utt_id == r.utt_id);
    CHECK(r.frames <= 12);
    CHECK(r.synthesized.dim() == 64);
    CHECK(r.reference.values == natural.at(r.utt_id).values);
  }

  const EvalSet ind = SynthesizeEvalSet(m, s, v, natural, Protocol::kIndep, 1, opt);
  const EvalSet ind2 = SynthesizeEvalSet(m, s, v, natural, Protocol::kIndep, 1, opt);
  REQUIRE(ind.records.size() == 6);
  std::map<std::string, std::string> spk;
  for (const auto &e : m.entries) spk[e.utt_id] = e.speaker_id;
  for (std::size_t i = 0; i < ind.records.size(); ++i) {
    const auto &r = ind.records[i];
    CHECK(r.ref_utt_id != r.utt_id);
    CHECK(spk[r.ref_utt_id] == spk[r.utt_id]);
    CHECK(r.ref_utt_id == ind2.records[i].ref_utt_id);
    CHECK(r.synthesized.values == ind2.records[i].synthesized.values);
  }

  // A speaker with a single utterance is skipped under indep only.
  m.entries.erase(std::remove_if(m.entries.begin(), m.entries.end(),
                                 [&](const ManifestEntry &e) {
                                   return e.speaker_id == m.entries.back().speaker_id &&
                                          e.utt_id != m.entries.back().utt_id;
                                 }),
                  m.entries.end());
  REQUIRE(m.entries.size() == 4);
  const EvalSet skipped = SynthesizeEvalSet(m, s, v, natural, Protocol::kIndep, 1, opt);
  CHECK(skipped.skipped_speakers == 1);
  CHECK(skipped.records.size() == 3);
  CHECK(SynthesizeEvalSet(m, s, v, natural, Protocol::kDep, 1, opt).records.size() == 4);
}

TEST_CASE("embedding export round trip and write failure") {
  testutil::TempDir dir;
  std::mt19937_64 rng(6);
  std::vector<EmbeddingRow> rows;
  for (int i = 0; i < 5; ++i)
    rows.push_back({"u" + std::to_string(i), "s" + std::to_string(i % 2),
                    i % 2 ? "natural" : "synthesized", RandomMatrix(1, 7, rng, 0.0, 100.0).row(0)});
  ExportEmbeddings(dir.path("e.tsv"), rows);
  const auto back = ReadEmbeddings(dir.path("e.tsv"));
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].utt_id == rows[i].utt_id);
    CHECK(back[i].speaker_id == rows[i].speaker_id);
    CHECK(back[i].tag == rows[i].tag);
    CHECK(((back[i].values - rows[i].values).array().abs() <=
           1e-6 * rows[i].values.array().abs().max(1.0)).all());
  }
  const std::string bad = dir.path("no/such/dir/e.tsv");
  try {
    ExportEmbeddings(bad, rows);
    FAIL("expected an io error");
  } catch (const IoError &e) {
    CHECK(std::string(e.what()).find(bad) != std::string::npos);
  }
}

TEST_CASE("PCA separates antipodal clusters and reconstructs rank-2 data") {
  std::mt19937_64 rng(7);
  Eigen::RowVectorXd dir = RandomMatrix(1, 10, rng).row(0);
  Eigen::MatrixXd x(40, 10);
  for (int i = 0; i < 40; ++i)
    x.row(i) = (i < 20 ? 5.0 : -5.0) * dir + 0.05 * RandomMatrix(1, 10, rng).row(0);
  const Projection2d p = Project2d(x);
  for (int i = 0; i < 20; ++i) CHECK(p.coords(i, 0) * p.coords(20 + i, 0) < 0.0);
  CHECK(p.variances(0) >= p.variances(1));
  Eigen::Index arg;
  p.components.col(0).cwiseAbs().maxCoeff(&arg);
  CHECK(p.components(arg, 0) > 0.0);

  const Eigen::MatrixXd basis = RandomMatrix(2, 12, rng);
  const Eigen::MatrixXd plane =
      RandomMatrix(30, 2, rng) * basis + Eigen::MatrixXd::Constant(30, 12, 3.0);
  const Projection2d q = Project2d(plane);
  const Eigen::MatrixXd rec =
      (q.coords * q.components.transpose()).rowwise() + q.mean;
  CHECK((rec - plane).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((q.components.transpose() * q.components - Eigen::Matrix2d::Identity()).norm() < 1e-9);
}
