// tests/test_data.cc

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

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "doctest.h"

#include "fctts/audio/features.h"
#include "fctts/audio/wav.h"
#include "fctts/data/manifest.h"
#include "fctts/data/toy.h"
#include "fctts/errors.h"
#include "test_util.h"

using namespace fctts;
namespace fs = std::filesystem;

namespace {

void WriteTinyWav(const fs::path &p, double value = 0.1) {
  fs::create_directories(p.parent_path());
  AudioClip c;
  c.samples = Eigen::VectorXd::Constant(32, value);
  WriteWav(p.string(), c);
}

void WriteText(const fs::path &p, const std::string &text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text << "\n";
}

std::string SpeakerName(int i) { return "p" + std::to_string(225 + i); }

// VCTK-style tree with `n_speakers` speakers of `n_utts` utterances each.
void MakeVctkTree(const fs::path &root, int n_speakers, int n_utts) {
  for (int s = 0; s < n_speakers; ++s) {
    const std::string spk = SpeakerName(s);
    for (int u = 1; u <= n_utts; ++u) {
      const std::string utt = spk + "_" + std::to_string(1000 + u).substr(1);
      WriteTinyWav(root / "wav48" / spk / (utt + ".wav"));
      WriteText(root / "txt" / spk / (utt + ".txt"), "please call stella");
    }
  }
}

std::map<std::string, std::map<Split, int>> CountBySpeaker(const DatasetManifest &m) {
  std::map<std::string, std::map<Split, int>> n;
  for (const auto &e : m.entries) ++n[e.speaker_id][e.split];
  return n;
}

std::string ReadBytes(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

ToyDatasetSpec SmallToy(std::uint64_t seed) {
  ToyDatasetSpec t;
  t.n_speakers = 3;
  t.utterances_per_speaker = 4;
  t.val_per_speaker = 1;
  t.seed = seed;
  return t;
}

}  // namespace

TEST_CASE("split names round trip and unknown names are rejected") {
  for (Split s : {Split::kTrain, Split::kVal, Split::kTest})
    CHECK(ParseSplit(SplitName(s)) == s);
  CHECK_THROWS_AS(ParseSplit("dev"), InvalidInputError);
  CHECK(ParseLayout("vctk_like") == CorpusLayout::kVctkLike);
  CHECK(ParseLayout("librispeech_like") == CorpusLayout::kLibriSpeechLike);
  CHECK_THROWS_AS(ParseLayout("timit"), ConfigError);
}

TEST_CASE("manifest write and read round trip") {
  testutil::TempDir dir;
  DatasetManifest m;
  m.entries = {{"u1", "s1", Split::kTrain, "wav/s1/u1.wav", "hello there"},
               {"u2", "s1", Split::kVal, "/abs/u2.wav", "it's a test."},
               {"u3", "s2", Split::kTest, "wav/s2/u3.wav", "x"}};
  WriteManifest(dir.path("m.tsv"), m);
  const DatasetManifest back = ReadManifest(dir.path("m.tsv"));
  CHECK(back.entries == m.entries);
  CHECK(back.AudioPath(back.entries[0]) ==
        (fs::path(dir.path()) / "wav/s1/u1.wav").string());
  CHECK(back.AudioPath(back.entries[1]) == "/abs/u2.wav");
  CHECK(back.Speakers() == std::vector<std::string>{"s1", "s2"});
  CHECK(back.Speakers(Split::kTest) == std::vector<std::string>{"s2"});
  CHECK(back.InSplit(Split::kVal).size() == 1);
  CHECK(back.Find("u3").speaker_id == "s2");
  CHECK_THROWS_AS(back.Find("nope"), InvalidInputError);
}

TEST_CASE("manifest validation and malformed files") {
  testutil::TempDir dir;
  DatasetManifest m;
  m.entries = {{"u1", "s1", Split::kTrain, "a.wav", "t"}, {"u1", "s1", Split::kTrain, "b.wav", "t"}};
  CHECK_THROWS_AS(m.Validate(false), InvalidInputError);
  m.entries[1].utt_id = "u2";
  CHECK_NOTHROW(m.Validate(false));
  m.entries[1].transcript = "";
  CHECK_THROWS_AS(m.Validate(false), InvalidInputError);
  m.entries[1].transcript = "a\tb";
  CHECK_THROWS_AS(m.Validate(false), InvalidInputError);
  m.entries[1].transcript = "ok";
  m.base_dir = dir.path();
  CHECK_THROWS_AS(m.Validate(true), IoError);

  std::ofstream(dir.path("bad.tsv")) << "not a header\n";
  CHECK_THROWS_AS(ReadManifest(dir.path("bad.tsv")), InvalidInputError);
  std::ofstream(dir.path("short.tsv"))
      << "utt_id\tspeaker_id\tsplit\taudio_path\ttranscript\nu1\ts1\ttrain\n";
  CHECK_THROWS_AS(ReadManifest(dir.path("short.tsv")), InvalidInputError);
  CHECK_THROWS_AS(ReadManifest(dir.path("missing.tsv")), IoError);
}

TEST_CASE("VCTK-style corpus of 109 speakers gives 101 training and 8 test speakers") {
  testutil::TempDir dir;
  const fs::path root = dir.path("vctk");
  MakeVctkTree(root, 109, 12);
  const BuildResult r = BuildManifest(root.string(), CorpusLayout::kVctkLike, SplitSpec{}, 7);
  CHECK(r.report.issues.empty());
  CHECK(r.report.flagged_speakers.empty());
  CHECK(r.manifest.Speakers(Split::kTrain).size() == 101);
  CHECK(r.manifest.Speakers(Split::kTest).size() == 8);
  CHECK(r.manifest.entries.size() == 109 * 12);
  for (const auto &[spk, counts] : CountBySpeaker(r.manifest)) {
    const bool is_test = counts.count(Split::kTest) > 0;
    if (is_test) {
      CHECK(counts.size() == 1);
      CHECK(counts.at(Split::kTest) == 12);
    } else {
      CHECK(counts.at(Split::kVal) == 8);
      CHECK(counts.at(Split::kTrain) == 4);
    }
  }
  // Train and test speaker sets are disjoint.
  std::set<std::string> train_spk;
  for (const auto &s : r.manifest.Speakers(Split::kTrain)) train_spk.insert(s);
  for (const auto &s : r.manifest.Speakers(Split::kTest)) CHECK(train_spk.count(s) == 0);
  CHECK_NOTHROW(r.manifest.Validate(true));
}

TEST_CASE("corpus split is a deterministic function of the seed") {
  testutil::TempDir dir;
  const fs::path root = dir.path("vctk");
  MakeVctkTree(root, 20, 10);
  const auto a = BuildManifest(root.string(), CorpusLayout::kVctkLike, SplitSpec{}, 3);
  const auto b = BuildManifest(root.string(), CorpusLayout::kVctkLike, SplitSpec{}, 3);
  CHECK(a.manifest.entries == b.manifest.entries);
  bool any_differs = false;
  for (std::uint64_t seed = 4; seed < 10 && !any_differs; ++seed) {
    const auto c = BuildManifest(root.string(), CorpusLayout::kVctkLike, SplitSpec{}, seed);
    any_differs = c.manifest.Speakers(Split::kTest) != a.manifest.Speakers(Split::kTest);
  }
  CHECK(any_differs);
}

TEST_CASE("explicit test speakers and speaker filtering") {
  testutil::TempDir dir;
  const fs::path root = dir.path("vctk");
  MakeVctkTree(root, 6, 10);
  SplitSpec spec;
  spec.test_speakers = {SpeakerName(1), SpeakerName(4)};
  const auto r = BuildManifest(root.string(), CorpusLayout::kVctkLike, spec, 0);
  CHECK(r.manifest.Speakers(Split::kTest) ==
        std::vector<std::string>{SpeakerName(1), SpeakerName(4)});

  spec.test_speakers = {"p999"};
  CHECK_THROWS_AS(BuildManifest(root.string(), CorpusLayout::kVctkLike, spec, 0), ConfigError);

  SplitSpec keep;
  keep.include_speakers = {SpeakerName(0), SpeakerName(2), SpeakerName(3)};
  keep.n_test_speakers = 1;
  const auto k = BuildManifest(root.string(), CorpusLayout::kVctkLike, keep, 0);
  CHECK(k.manifest.Speakers().size() == 3);

  SplitSpec too_many;
  too_many.n_test_speakers = 6;
  CHECK_THROWS_AS(BuildManifest(root.string(), CorpusLayout::kVctkLike, too_many, 0),
                  ConfigError);
}

TEST_CASE("speakers with too few utterances are flagged and keep one val utterance") {
  testutil::TempDir dir;
  const fs::path root = dir.path("vctk");
  MakeVctkTree(root, 3, 10);
  // A fourth speaker with only five utterances and a fifth with one.
  for (int u = 1; u <= 5; ++u)
    WriteTinyWav(root / "wav48" / "q001" / ("q001_" + std::to_string(u) + ".wav"));
  for (int u = 1; u <= 5; ++u)
    WriteText(root / "txt" / "q001" / ("q001_" + std::to_string(u) + ".txt"), "hi");
  WriteTinyWav(root / "wav48" / "q002" / "q002_1.wav");
  WriteText(root / "txt" / "q002" / "q002_1.txt", "hi");

  SplitSpec spec;
  spec.test_speakers = {SpeakerName(0)};
  const auto r = BuildManifest(root.string(), CorpusLayout::kVctkLike, spec, 1);
  CHECK(r.report.flagged_speakers == std::vector<std::string>{"q001", "q002"});
  const auto n = CountBySpeaker(r.manifest);
  CHECK(n.at("q001").at(Split::kVal) == 1);
  CHECK(n.at("q001").at(Split::kTrain) == 4);
  CHECK(n.at("q002").count(Split::kVal) == 0);
  CHECK(n.at("q002").at(Split::kTrain) == 1);
}

TEST_CASE("missing transcripts and unreadable audio are reported and skipped") {
  testutil::TempDir dir;
  const fs::path root = dir.path("vctk");
  MakeVctkTree(root, 3, 10);
  fs::remove(root / "txt" / SpeakerName(0) / (SpeakerName(0) + "_003.txt"));
  std::ofstream(root / "wav48" / SpeakerName(1) / (SpeakerName(1) + "_004.wav")) << "garbage";
  std::ofstream(root / "txt" / SpeakerName(2) / (SpeakerName(2) + "_005.txt")) << "  \n";
  SplitSpec spec;
  spec.n_test_speakers = 1;
  const auto r = BuildManifest(root.string(), CorpusLayout::kVctkLike, spec, 2);
  REQUIRE(r.report.issues.size() == 3);
  CHECK(r.report.issues[0].find("missing transcript") != std::string::npos);
  CHECK(r.report.issues[1].find("unreadable audio") != std::string::npos);
  CHECK(r.report.issues[2].find("empty transcript") != std::string::npos);
  CHECK(r.manifest.entries.size() == 27);
}

TEST_CASE("empty or absent corpora are errors") {
  testutil::TempDir dir;
  fs::create_directories(dir.path("empty/wav48"));
  CHECK_THROWS_AS(BuildManifest(dir.path("empty"), CorpusLayout::kVctkLike, SplitSpec{}, 0),
                  InvalidInputError);
  fs::create_directories(dir.path("nowav"));
  CHECK_THROWS_AS(BuildManifest(dir.path("nowav"), CorpusLayout::kVctkLike, SplitSpec{}, 0),
                  InvalidInputError);
  CHECK_THROWS_AS(BuildManifest(dir.path("absent"), CorpusLayout::kVctkLike, SplitSpec{}, 0),
                  InvalidInputError);
  SplitSpec neg;
  neg.val_per_speaker = -1;
  MakeVctkTree(dir.path("ok"), 2, 3);
  CHECK_THROWS_AS(BuildManifest(dir.path("ok"), CorpusLayout::kVctkLike, neg, 0), ConfigError);
}

TEST_CASE("LibriSpeech-style layout with chapter transcripts") {
  testutil::TempDir dir;
  const fs::path root = dir.path("libri");
  for (const std::string spk : {"19", "26", "32"}) {
    for (const std::string ch : {"198", "495"}) {
      const fs::path cdir = root / spk / ch;
      std::ofstream *trans = nullptr;
      fs::create_directories(cdir);
      std::ofstream t(cdir / (spk + "-" + ch + ".trans.txt"));
      trans = &t;
      for (int u = 0; u < 5; ++u) {
        const std::string utt = spk + "-" + ch + "-000" + std::to_string(u);
        WriteTinyWav(cdir / (utt + ".wav"));
        *trans << utt << " NORTHANGER ABBEY CHAPTER " << u << "\n";
      }
    }
  }
  SplitSpec spec;
  spec.n_test_speakers = 1;
  spec.val_per_speaker = 2;
  const auto r = BuildManifest(root.string(), CorpusLayout::kLibriSpeechLike, spec, 5);
  CHECK(r.report.issues.empty());
  CHECK(r.manifest.entries.size() == 30);
  CHECK(r.manifest.Speakers().size() == 3);
  CHECK(r.manifest.Speakers(Split::kTest).size() == 1);
  CHECK(r.manifest.Find("26-495-0003").transcript == "NORTHANGER ABBEY CHAPTER 3");
  for (const auto &[spk, counts] : CountBySpeaker(r.manifest))
    if (!counts.count(Split::kTest)) CHECK(counts.at(Split::kVal) == 2);
}

TEST_CASE("toy signatures are distinct and span the fundamental range") {
  ToyDatasetSpec spec;
  spec.seed = 1;
  const auto sigs = ToySignatures(spec);
  REQUIRE(sigs.size() == 8);
  CHECK(sigs.front().fundamental_hz == doctest::Approx(110.0));
  CHECK(sigs.back().fundamental_hz == doctest::Approx(440.0));
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    CHECK(sigs[i].harmonic_amplitudes.size() == 8);
    CHECK(sigs[i].formant_hz >= 500.0);
    CHECK(sigs[i].formant_hz <= 3000.0);
    if (i > 0) {
      // Log spacing: constant ratio between consecutive fundamentals.
      CHECK(sigs[i].fundamental_hz / sigs[i - 1].fundamental_hz ==
            doctest::Approx(std::pow(4.0, 1.0 / 7.0)));
    }
  }
}

TEST_CASE("formant gain peaks at the resonance and is neutral when disabled") {
  ToySpeakerSignature sig;
  sig.formant_hz = 1000.0;
  CHECK(FormantGain(1000.0, sig) == doctest::Approx(5.0));
  CHECK(FormantGain(1100.0, sig) < 5.0);
  CHECK(FormantGain(1100.0, sig) > 1.0);
  CHECK(FormantGain(900.0, sig) == doctest::Approx(FormantGain(1100.0, sig)));
  CHECK(FormantGain(6000.0, sig) == doctest::Approx(1.0).epsilon(1e-3));
  sig.formant_hz = 0.0;
  CHECK(FormantGain(1000.0, sig) == 1.0);
}

TEST_CASE("toy utterance renders each character at the expected pitch") {
  ToyDatasetSpec spec;
  spec.noise_amplitude = 0.0;
  ToySpeakerSignature sig;
  sig.fundamental_hz = 200.0;
  sig.harmonic_amplitudes = {1.0};
  const Eigen::VectorXd y = RenderToyUtterance("ad", sig, spec, 0);
  const auto tone = static_cast<Eigen::Index>(spec.tone_seconds * spec.sample_rate_hz);
  const auto gap = static_cast<Eigen::Index>(spec.silence_seconds * spec.sample_rate_hz);
  CHECK(y.size() >= 2 * tone + gap);
  CHECK(y.cwiseAbs().maxCoeff() <= 1.0);
  CHECK(testutil::DftPeakHz(y.head(tone), spec.sample_rate_hz) ==
        doctest::Approx(200.0).epsilon(0.03));
  // 'd' is three semitones above 'a'.
  const double expected = 200.0 * std::pow(2.0, 3.0 / 12.0);
  CHECK(testutil::DftPeakHz(y.tail(tone), spec.sample_rate_hz) ==
        doctest::Approx(expected).epsilon(0.03));
  CHECK_THROWS_AS(RenderToyUtterance("az", sig, spec, 0), InvalidInputError);
}

TEST_CASE("toy dataset has the default size and is bit-identical for equal seeds") {
  testutil::TempDir dir;
  ToyDatasetSpec spec;
  spec.seed = 9;
  const DatasetManifest m = MakeToyDataset(spec, dir.path("a"));
  CHECK(m.entries.size() == 160);
  CHECK(m.Speakers().size() == 8);
  CHECK(m.InSplit(Split::kVal).size() == 32);
  CHECK(m.InSplit(Split::kTest).empty());
  const DatasetManifest back = ReadManifest(dir.path("a/manifest.tsv"));
  CHECK_NOTHROW(back.Validate(true));
  for (const auto &e : back.entries) {
    const AudioClip c = ReadWav(back.AudioPath(e));
    CHECK(c.sample_rate_hz == 16000);
    CHECK(e.transcript.size() >= 6);
    CHECK(e.transcript.size() <= 10);
  }

  const ToyDatasetSpec small = SmallToy(4);
  MakeToyDataset(small, dir.path("b"));
  MakeToyDataset(small, dir.path("c"));
  MakeToyDataset(SmallToy(5), dir.path("d"));
  CHECK(ReadBytes(dir.path("b/manifest.tsv")) == ReadBytes(dir.path("c/manifest.tsv")));
  const DatasetManifest mb = ReadManifest(dir.path("b/manifest.tsv"));
  const DatasetManifest mc = ReadManifest(dir.path("c/manifest.tsv"));
  const DatasetManifest md = ReadManifest(dir.path("d/manifest.tsv"));
  bool any_differs = false;
  for (std::size_t i = 0; i < mb.entries.size(); ++i) {
    CHECK(ReadBytes(mb.AudioPath(mb.entries[i])) == ReadBytes(mc.AudioPath(mc.entries[i])));
    any_differs |= ReadBytes(mb.AudioPath(mb.entries[i])) != ReadBytes(md.AudioPath(md.entries[i]));
  }
  CHECK(any_differs);
}

TEST_CASE("toy dataset spec validation") {
  ToyDatasetSpec spec;
  spec.val_per_speaker = spec.utterances_per_speaker;
  CHECK_THROWS_AS(spec.Validate(), ConfigError);
  spec = ToyDatasetSpec{};
  spec.n_speakers = 0;
  CHECK_THROWS_AS(spec.Validate(), ConfigError);
  spec = ToyDatasetSpec{};
  spec.min_chars = 12;
  CHECK_THROWS_AS(spec.Validate(), ConfigError);
}

TEST_CASE("log-mel of a toy manifest entry has the configured shape") {
  testutil::TempDir dir;
  const DatasetManifest m = MakeToyDataset(SmallToy(2), dir.path());
  const MelConfig cfg;
  const MelSpectrogram mel = LoadMel(m, m.entries.front(), cfg);
  CHECK(mel.frames.cols() == cfg.n_mels);
  CHECK(mel.frames.rows() > 10);
  CHECK(mel.frames.allFinite());
}
