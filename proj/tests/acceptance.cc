// tests/acceptance.cc

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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Usage:
//   acceptance [--only 1,2,...] [--workdir DIR]
// With --workdir the artifacts of the pipeline runs are kept in DIR.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "fctts/audio/features.h"
#include "fctts/cli.h"
#include "fctts/data/toy.h"
#include "fctts/errors.h"
#include "fctts/eval/evaluation.h"
#include "fctts/nn/checkpoint.h"
#include "fctts/nn/optimizer.h"
#include "fctts/synth/synthesizer.h"
#include "fctts/train/losses.h"
#include "fctts/train/trainer.h"
#include "fctts/verifier/speaker_encoder.h"
#include "fixtures.h"
#include "test_util.h"

using namespace fctts;
using testutil::RandomMatrix;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

// Runs the command line tool in-process; throws if it fails.
std::string Cli(const std::vector<std::string> &args) {
  std::ostringstream out, err;
  const int code = CliMain(args, out, err);
  if (code != 0)
    throw std::runtime_error("fctts " + args.front() + " exited with " + std::to_string(code) +
                             ": " + err.str());
  return out.str();
}

std::map<std::string, std::string> KeyValues(const std::string &text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

std::string ReadBytes(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Exhaustive oracle: every candidate threshold is scored by direct counting,
// then the FAR/FRR crossing is interpolated linearly.
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

// 1. Frozen verifier under feedback training.
Outcome FrozenVerifier(const std::string &) {
  testutil::TempDir dir;
  ToyDatasetSpec toy;
  toy.n_speakers = 4;
  toy.utterances_per_speaker = 6;
  toy.val_per_speaker = 2;
  toy.seed = 3;
  const DatasetManifest m = MakeToyDataset(toy, dir.path());
  const VerifierModel verifier(VerifierArch::Toy(toy.n_speakers), 4);
  const MelConfig mel_cfg;
  SynthesizerModel synth(SynthArch::Toy(verifier.arch().embedding_dim(), mel_cfg), 5);
  const auto examples = PrepareExamples(m, Split::kTrain, mel_cfg, verifier);

  TrainConfig cfg = TrainConfig::Defaults(Phase::kFc);
  cfg.batch_size = 4;
  cfg.seed = 6;
  Optimizer opt(cfg.optimizer, synth.params());
  const BatchSchedule schedule(examples, cfg.batch_size, cfg.seed);
  const auto verifier_hash = verifier.params().Hash();
  const auto synth_hash = synth.params().Hash();
  double first_spk = 0.0, last_spk = 0.0;
  for (long step = 0; step < 100; ++step) {
    std::vector<const TrainingExample *> batch;
    for (int i : schedule.Batch(step)) batch.push_back(&examples[i]);
    const auto r = TrainStep(batch, synth, &verifier, opt, cfg, step);
    if (step == 0) first_spk = r.loss.speaker_loss;
    last_spk = r.loss.speaker_loss;
    if (verifier.params().Hash() != verifier_hash)
      return {false, "verifier changed at step " + std::to_string(step)};
  }
  const bool synth_moved = synth.params().Hash() != synth_hash;
  return {synth_moved, "100 fc steps, verifier hash unchanged, synthesizer updated=" +
                           std::string(synth_moved ? "yes" : "no") + ", speaker loss " +
                           Fmt(first_spk) + " -> " + Fmt(last_spk)};
}

// 2. Feedback loss gradient against central differences.
Outcome FeedbackGradient(const std::string &) {
  const VerifierModel v(testutil::MiniVerifierArch(), 21);
  std::mt19937_64 rng(22);
  Eigen::MatrixXd mel = RandomMatrix(6, v.arch().n_mels, rng);
  const SpeakerEmbedding ref{RandomMatrix(1, v.arch().embedding_dim(), rng).row(0)};
  const Eigen::MatrixXd g = SpeakerFeedbackGradient(mel, ref, v);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < mel.size(); ++i) {
    const double saved = mel.data()[i], h = 1e-5;
    mel.data()[i] = saved + h;
    const double up = SpeakerFeedbackLoss(mel, ref, v);
    mel.data()[i] = saved - h;
    const double down = SpeakerFeedbackLoss(mel, ref, v);
    mel.data()[i] = saved;
    worst = std::max(worst, testutil::RelativeError(g.data()[i], (up - down) / (2 * h)));
  }
  return {worst < 1e-4, "max relative error " + Fmt(worst, 3) + " over " +
                            std::to_string(mel.size()) + " entries"};
}

// 3. Composite loss gradient of the synthesizer groups.
Outcome SynthesizerGradient(const std::string &) {
  const VerifierModel verifier(testutil::MiniVerifierArch(), 31);
  SynthesizerModel synth(testutil::MiniSynthArch(), 32);
  std::mt19937_64 rng(33);
  std::vector<TrainingExample> examples;
  for (int i = 0; i < 3; ++i) {
    TrainingExample e;
    e.utt_id = "u" + std::to_string(i);
    e.speaker_id = "s" + std::to_string(i);
    e.ids = {2 + i, 3, 4, Vocabulary::kEos};
    e.mel = RandomMatrix(4 + i, synth.arch().n_mels, rng, -1.0, 0.5);
    e.ref = ExtractEmbedding(e.mel, verifier);
    examples.push_back(e);
  }
  std::vector<const TrainingExample *> batch;
  for (const auto &e : examples) batch.push_back(&e);
  TrainConfig cfg = TrainConfig::Defaults(Phase::kFc);
  cfg.w_spk = 1.0;
  cfg.w_reg = 1e-3;
  cfg.prenet_dropout = false;
  std::vector<Eigen::MatrixXd> grads;
  BatchLossAndGradients(batch, synth, &verifier, cfg, 0, &grads);
  std::set<int> selected;
  for (const char *p : {"embed/", "attn/", "prenet/", "postnet/"})
    for (int i : synth.GroupIndices(p)) selected.insert(i);
  const auto r = testutil::CheckGradients(
      synth.params(), grads,
      [&] { return BatchLossAndGradients(batch, synth, &verifier, cfg, 0, nullptr).total; },
      [&](int i) { return selected.count(i) > 0; });
  return {r.max_rel_error < 1e-4 && r.checked > 0,
          "max relative error " + Fmt(r.max_rel_error, 3) + " at " + r.worst + " over " +
              std::to_string(r.checked) + " parameters"};
}

// 4. EER against the brute-force oracle.
Outcome EerOracle(const std::string &) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> size(50, 500);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  for (int set = 0; set < 100; ++set) {
    const int k = size(rng);
    std::vector<double> scores;
    std::vector<bool> labels;
    for (int i = 0; i < k; ++i) {
      const bool same = i % 2 == 0 || n(rng) > 0.5;
      labels.push_back(same);
      double v = n(rng) + (same ? 1.0 : 0.0);
      if (set % 4 == 0) v = std::round(v * 4.0) / 4.0;  // ties
      scores.push_back(v);
    }
    const EerResult a = ComputeEer(scores, labels), b = BruteForceEer(scores, labels);
    worst = std::max({worst, std::abs(a.eer_percent - b.eer_percent),
                      std::abs(a.threshold - b.threshold)});
  }
  return {worst < 1e-9, "max deviation " + Fmt(worst, 3) + " over 100 sets"};
}

// 5. Exactly half of the trials are cross-speaker.
Outcome TrialBalance(const std::string &) {
  DatasetManifest m;
  for (int s = 0; s < 6; ++s)
    for (int u = 0; u < 2 + s % 3; ++u)
      m.entries.push_back({"s" + std::to_string(s) + "_" + std::to_string(u),
                           "s" + std::to_string(s), Split::kTest, "x.wav", "abc"});
  std::map<std::string, std::string> spk;
  for (const auto &e : m.entries) spk[e.utt_id] = e.speaker_id;
  std::mt19937_64 rng(51);
  std::uniform_int_distribution<int> half(1, 500);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const int n = 2 * half(rng);
    const auto trials = GenerateTrials(m, n, seed);
    int cross = 0;
    for (const auto &t : trials) {
      if (t.same_speaker == (spk[t.enroll_utt_id] != spk[t.test_utt_id]))
        return {false, "mislabelled trial for seed " + std::to_string(seed)};
      cross += t.same_speaker ? 0 : 1;
    }
    if (static_cast<int>(trials.size()) != n || 2 * cross != n)
      return {false, "seed " + std::to_string(seed) + ": " + std::to_string(cross) + " of " +
                         std::to_string(trials.size()) + " cross-speaker"};
  }
  return {true, "1000 generations balanced"};
}

// 6. Toy pipeline: feedback-constrained training against the baseline.
Outcome ToyPipeline(const std::string &workdir) {
  std::unique_ptr<testutil::TempDir> tmp;
  fs::path root;
  if (workdir.empty()) {
    tmp = std::make_unique<testutil::TempDir>();
    root = tmp->path();
  } else {
    root = fs::path(workdir) / "toy_pipeline";
    fs::remove_all(root);
    fs::create_directories(root);
  }
  auto p = [&](const std::string &name) { return (root / name).string(); };
  auto log = [](const std::string &msg) { std::cout << "  [6] " << msg << std::endl; };
  const auto start = std::chrono::steady_clock::now();
  auto minutes = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60;
  };

  Cli({"make-toy", "--out", p("toy"), "--seed", "1"});
  const std::string manifest = p("toy/manifest.tsv");
  Cli({"train-verifier", "--manifest", manifest, "--out", p("verifier"), "--seed", "1"});
  const std::string verifier = p("verifier/final.fckp");
  log("verifier trained (" + Fmt(minutes(), 3) + " min)");
  Cli({"train-baseline", "--manifest", manifest, "--verifier", verifier, "--out", p("baseline"),
       "--seed", "1", "--steps", "3000"});
  log("baseline 3000 steps (" + Fmt(minutes(), 3) + " min)");
  Cli({"train-fc", "--manifest", manifest, "--verifier", verifier, "--init",
       p("baseline/final.fckp"), "--out", p("fc"), "--seed", "1", "--steps", "3000"});
  log("fc 3000 steps from the baseline (" + Fmt(minutes(), 3) + " min)");
  // Equal-budget control: the baseline continued for the same 3000 steps.
  Cli({"train-baseline", "--manifest", manifest, "--verifier", verifier, "--init",
       p("baseline/final.fckp"), "--out", p("baseline_cont"), "--seed", "1", "--steps",
       "3000"});
  log("baseline continued 3000 steps (" + Fmt(minutes(), 3) + " min)");

  std::map<std::string, std::map<std::string, double>> r;  // "<system>/<protocol>"
  double natural_eer = 0.0;
  for (const std::string system : {"baseline", "baseline_cont", "fc"}) {
    for (const std::string protocol : {"dep", "indep"}) {
      const auto kv = KeyValues(Cli({"evaluate", "--system", p(system + "/final.fckp"),
                                     "--verifier", verifier, "--manifest", manifest,
                                     "--protocol", protocol, "--name", system, "--out",
                                     p(system + "_" + protocol + ".txt"), "--no-dropout"}));
      r[system + "/" + protocol] = {{"eer", std::stod(kv.at("eer_percent"))},
                                    {"cos", std::stod(kv.at("avg_cosine"))}};
      natural_eer = std::stod(kv.at("natural_eer_percent"));
      log(system + " " + protocol + ": eer " + Fmt(r[system + "/" + protocol]["eer"]) +
          "% cos " + Fmt(r[system + "/" + protocol]["cos"]));
    }
  }

  // Speaker-loss trend of the fc run, first vs last 100 logged steps.
  std::vector<double> spk;
  {
    std::ifstream in(p("fc/metrics.tsv"));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::vector<std::string> f;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, '\t')) f.push_back(cell);
      if (f.size() == 8) spk.push_back(std::stod(f[6]));
    }
  }
  if (spk.size() >= 200) {
    const double head = std::accumulate(spk.begin(), spk.begin() + 100, 0.0) / 100;
    const double tail = std::accumulate(spk.end() - 100, spk.end(), 0.0) / 100;
    log("fc speaker loss, mean of first/last 100 steps: " + Fmt(head) + " -> " + Fmt(tail));
  }

  // Cosine is bounded by 1, so this is the largest gain any system could show.
  log("headroom above the continued baseline (dep): " +
      Fmt(1.0 - r["baseline_cont/dep"]["cos"], 3));

  const double elapsed = minutes();
  bool ok = natural_eer < 5.0 && elapsed < 45.0;
  std::ostringstream detail;
  detail << "natural EER " << Fmt(natural_eer) << "%";
  for (const std::string control : {"baseline_cont", "baseline"}) {
    for (const std::string protocol : {"dep", "indep"}) {
      const auto &fc = r["fc/" + protocol], &base = r[control + "/" + protocol];
      const double gap = fc.at("cos") - base.at("cos");
      const bool row_ok = fc.at("eer") <= base.at("eer") &&
                          (protocol == "dep" ? gap >= 0.05 : gap > 0.0);
      ok = ok && row_ok;
      detail << "; " << protocol << " vs " << control << ": cos +" << Fmt(gap, 3) << ", eer "
             << Fmt(fc.at("eer")) << "<=" << Fmt(base.at("eer")) << (row_ok ? "" : " (violated)");
    }
  }
  detail << "; " << Fmt(elapsed, 3) << " min";
  return {ok, detail.str()};
}

// 7. Decoding terminates and attention rows are distributions.
Outcome AttentionContracts(const std::string &) {
  std::mt19937_64 rng(71);
  std::uniform_int_distribution<int> len(1, 16), limit(1, 60), chr(0, 25);
  const MelConfig mel_cfg;
  double worst = 0.0;
  long frames = 0;
  int natural_stops = 0;
  for (int model = 0; model < 100; ++model) {
    const SynthesizerModel synth(SynthArch::Toy(64, mel_cfg), 1000 + model);
    std::string text;
    for (int i = len(rng); i > 0; --i) text.push_back(static_cast<char>('a' + chr(rng)));
    SynthesisLimits lim;
    lim.max_steps = limit(rng);
    DecodeOptions opts;
    opts.seed = static_cast<std::uint64_t>(model);
    const SpeakerEmbedding emb{RandomMatrix(1, 64, rng).row(0)};
    const auto out = Synthesize(TextToIds(text), emb, synth, lim, opts);
    if (out.num_frames() < 1 || out.num_frames() > lim.max_steps)
      return {false, "model " + std::to_string(model) + " produced " +
                         std::to_string(out.num_frames()) + " frames"};
    worst = std::max(worst, (out.alignments.rowwise().sum().array() - 1.0).abs().maxCoeff());
    frames += out.num_frames();
    natural_stops += out.stopped_naturally ? 1 : 0;
  }
  return {worst <= 1e-5, "max |row sum - 1| " + Fmt(worst, 3) + " over " +
                             std::to_string(frames) + " frames, " +
                             std::to_string(natural_stops) + " natural stops"};
}

// 8. Statistics pooling properties.
Outcome PoolingProperties(const std::string &) {
  Eigen::MatrixXd two(2, 1);
  two << 1.0, 3.0;
  const auto hand = StatisticsPoolEmbedding(two, 0.0);
  if (hand.values(0) != 2.0 || hand.values(1) != 1.0)
    return {false, "{1,3} gave (" + Fmt(hand.values(0)) + ", " + Fmt(hand.values(1)) + ")"};
  std::mt19937_64 rng(81);
  std::uniform_int_distribution<int> rows(1, 60), cols(1, 32);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::MatrixXd x = RandomMatrix(rows(rng), cols(rng), rng, 0.0, 3.0);
    std::vector<int> perm(static_cast<std::size_t>(x.rows()));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd y(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) y.row(i) = x.row(perm[i]);
    if (StatisticsPoolEmbedding(x).values != StatisticsPoolEmbedding(y).values)
      return {false, "permutation changed the pooled vector in map " + std::to_string(trial)};
    // The two-frame hand case embedded in a random channel.
    Eigen::MatrixXd pair(2, x.cols());
    pair.row(0) = x.row(0);
    pair.row(1) = x.row(0).array() + 2.0;
    const auto e = StatisticsPoolEmbedding(pair, 0.0);
    const Eigen::RowVectorXd mean = x.row(0).array() + 1.0;
    if ((e.values.head(x.cols()) - mean).cwiseAbs().maxCoeff() > 1e-12 ||
        (e.values.tail(x.cols()).array() - 1.0).abs().maxCoeff() > 1e-12)
      return {false, "shifted pair gave a wrong mean/std in map " + std::to_string(trial)};
  }
  return {true, "1000 random maps bit-identical under permutation, hand case (2, 1)"};
}

// 9. Griffin-Lim round trip of a 500 Hz tone.
Outcome GriffinLimPitch(const std::string &) {
  const MelConfig cfg;
  AudioClip clip{Eigen::VectorXd(cfg.sample_rate_hz), cfg.sample_rate_hz};
  for (Eigen::Index i = 0; i < clip.samples.size(); ++i)
    clip.samples(i) = 0.5 * std::sin(2 * std::numbers::pi * 500.0 * i / cfg.sample_rate_hz);
  const auto gl = GriffinLimInvert(ComputeMelSpectrogram(clip, cfg), 60, 1);
  const double peak = testutil::DftPeakHz(gl.clip.samples, gl.clip.sample_rate_hz);
  // Width of the mel band that holds 500 Hz, from the HTK scale directly.
  auto mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  auto inv = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
  const double step = (mel(cfg.sample_rate_hz / 2.0) - mel(0.0)) / (cfg.n_mels + 1);
  const double width = inv(mel(500.0) + step) - 500.0;
  return {std::abs(peak - 500.0) <= width,
          "peak " + Fmt(peak, 5) + " Hz, allowed +-" + Fmt(width, 3) + " Hz"};
}

// 10. Two identical end-to-end runs produce identical artifacts.
Outcome Determinism(const std::string &workdir) {
  std::unique_ptr<testutil::TempDir> tmp;
  fs::path root;
  if (workdir.empty()) {
    tmp = std::make_unique<testutil::TempDir>();
    root = tmp->path();
  } else {
    root = fs::path(workdir) / "determinism";
    fs::remove_all(root);
  }
  auto run = [&](const std::string &name) {
    const fs::path d = root / name;
    fs::create_directories(d);
    auto p = [&](const std::string &f) { return (d / f).string(); };
    const std::string manifest = p("toy/manifest.tsv");
    Cli({"make-toy", "--out", p("toy"), "--speakers", "3", "--utts", "6", "--val", "2",
         "--seed", "7"});
    Cli({"train-verifier", "--manifest", manifest, "--out", p("verifier"), "--steps", "10",
         "--batch-size", "4", "--seed", "7"});
    Cli({"train-baseline", "--manifest", manifest, "--verifier", p("verifier/final.fckp"),
         "--out", p("baseline"), "--steps", "6", "--batch-size", "4", "--checkpoint-every",
         "3", "--seed", "7"});
    Cli({"train-fc", "--manifest", manifest, "--verifier", p("verifier/final.fckp"), "--init",
         p("baseline/final.fckp"), "--out", p("fc"), "--steps", "4", "--batch-size", "4",
         "--checkpoint-every", "2", "--seed", "7"});
    Cli({"evaluate", "--system", p("fc/final.fckp"), "--verifier", p("verifier/final.fckp"),
         "--manifest", manifest, "--protocol", "indep", "--max-steps", "40", "--out",
         p("report.txt"), "--seed", "7"});
  };
  run("a");
  run("b");
  int files = 0, checkpoints = 0;
  for (const auto &e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), root / "a");
    const fs::path other = root / "b" / rel;
    if (!fs::exists(other) || ReadBytes(e.path()) != ReadBytes(other))
      return {false, "differs: " + rel.string()};
    if (e.path().extension() == ".fckp") {
      if (LoadCheckpoint(e.path().string()).tensors.Hash() !=
          LoadCheckpoint(other.string()).tensors.Hash())
        return {false, "checkpoint hash differs: " + rel.string()};
      ++checkpoints;
    }
    ++files;
  }
  for (const auto &e : fs::recursive_directory_iterator(root / "b"))
    if (e.is_regular_file() && !fs::exists(root / "a" / fs::relative(e.path(), root / "b")))
      return {false, "extra file in second run"};
  const bool has_metrics =
      fs::exists(root / "a/baseline/metrics.tsv") && fs::exists(root / "a/fc/metrics.tsv");
  std::ostringstream hash;
  hash << std::hex << LoadCheckpoint((root / "a/fc/final.fckp").string()).tensors.Hash();
  return {has_metrics && checkpoints > 0,
          std::to_string(files) + " files byte-identical incl. metrics logs and " +
              std::to_string(checkpoints) + " checkpoints (fc hash " + hash.str() + ")"};
}

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;  // 0 = checked inside the criterion
  std::function<Outcome(const std::string &)> run;
};

}  // namespace

int main(int argc, char **argv) {
  CLI::App app("fctts acceptance suite");
  std::vector<int> only;
  std::string workdir;
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_option("--workdir", workdir, "Keep pipeline artifacts here");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "frozen verifier over 100 fc steps", 120, FrozenVerifier},
      {2, "feedback gradient check", 60, FeedbackGradient},
      {3, "synthesizer gradient check", 300, SynthesizerGradient},
      {4, "EER oracle equivalence", 60, EerOracle},
      {5, "trial balance", 60, TrialBalance},
      {6, "toy directional reproduction", 0, ToyPipeline},
      {7, "attention and stop contracts", 120, AttentionContracts},
      {8, "statistics pooling properties", 60, PoolingProperties},
      {9, "Griffin-Lim round trip", 60, GriffinLimPitch},
      {10, "end-to-end determinism", 0, Determinism},
  };

  int failures = 0;
  for (const auto &c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(workdir);
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0 && secs >= c.budget_seconds) {
      o.pass = false;
      o.detail += "; over the " + Fmt(c.budget_seconds) + " s budget";
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name
              << "): " << o.detail << " [" << std::fixed << std::setprecision(1) << secs
              << " s]" << std::defaultfloat << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
