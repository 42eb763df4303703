// src/train/trainer.cc

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

#include "fctts/train/trainer.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "fctts/errors.h"
#include "fctts/nn/checkpoint.h"

namespace fs = std::filesystem;

namespace fctts {

namespace {

std::string CheckpointName(const std::string &dir, long step) {
  char name[32];
  std::snprintf(name, sizeof name, "ckpt_%06ld.fckp", step);
  return (fs::path(dir) / name).string();
}

void RequireFile(const std::string &path, const std::string &what) {
  if (path.empty() || !fs::is_regular_file(path))
    throw ConfigError("missing prerequisite checkpoint (" + what + "): '" +
                      path + "'");
}

// Opens the metrics log for appending, writing the header if the file is new.
std::ofstream OpenMetrics(const std::string &path, const std::string &header) {
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  if (!fresh) {
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    if (first != header)
      throw ConfigError("existing metrics log " + path + " has a different header");
  }
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot open metrics log " + path);
  if (fresh) out << header << '\n';
  return out;
}

void WriteMetricsRow(std::ofstream &out, long step, Phase phase,
                     const LossBreakdown &l) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%ld\t%s\t%.9g\t%.9g\t%.9g\t%.9g\t%.9g\t%.9g",
                step, PhaseName(phase).c_str(), l.mse_pre, l.mse_post,
                l.stop_loss, l.reg_loss, l.speaker_loss, l.total);
  out << buf << '\n';
  out.flush();
}

Checkpoint SynthCheckpoint(const SynthesizerModel &synth, const Optimizer &opt,
                           const TrainConfig &cfg, long step,
                           std::uint64_t verifier_hash) {
  Checkpoint c = synth.ToCheckpoint();
  c.meta["step"] = step;
  c.meta["phase"] = PhaseName(cfg.phase);
  c.meta["optimizer"] = opt.config().kind;
  c.meta["optimizer_steps"] = opt.step_count();
  c.meta["verifier_hash"] = std::to_string(verifier_hash);
  AppendPrefixed(c.tensors, opt.slots(), "opt/");
  return c;
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t seed, long a, long b) {
  std::seed_seq sq{static_cast<std::uint32_t>(seed),
                   static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  std::uint32_t out[2];
  sq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::vector<TrainingExample> PrepareExamples(const DatasetManifest &manifest,
                                             Split split, const MelConfig &cfg,
                                             const VerifierModel &verifier) {
  std::vector<TrainingExample> out;
  for (const ManifestEntry *e : manifest.InSplit(split)) {
    TrainingExample ex;
    ex.utt_id = e->utt_id;
    ex.speaker_id = e->speaker_id;
    ex.ids = TextToIds(e->transcript).ids;
    ex.mel = LoadMel(manifest, *e, cfg).frames;
    ex.ref = ExtractEmbedding(ex.mel, verifier);
    out.push_back(std::move(ex));
  }
  return out;
}

BatchSchedule::BatchSchedule(const std::vector<TrainingExample> &examples,
                             int batch_size, std::uint64_t seed)
    : seed_(seed) {
  if (examples.empty()) throw InvalidInputError("no training examples");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  std::vector<int> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto ta = examples[a].mel.rows(), tb = examples[b].mel.rows();
    return ta != tb ? ta < tb : examples[a].utt_id < examples[b].utt_id;
  });
  for (std::size_t i = 0; i < order.size(); i += batch_size) {
    const std::size_t end = std::min(order.size(), i + batch_size);
    buckets_.emplace_back(order.begin() + i, order.begin() + end);
  }
}

std::vector<int> BatchSchedule::Batch(long step) const {
  const long nb = static_cast<long>(buckets_.size());
  const long epoch = step / nb;
  std::vector<int> perm(buckets_.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  std::mt19937_64 rng(DeriveSeed(seed_, epoch, -1));
  std::shuffle(perm.begin(), perm.end(), rng);
  return buckets_[perm[step % nb]];
}

LossBreakdown BatchLossAndGradients(
    const std::vector<const TrainingExample *> &batch,
    const SynthesizerModel &synth, const VerifierModel *verifier,
    const TrainConfig &cfg, long step, std::vector<Eigen::MatrixXd> *grads) {
  if (batch.empty()) throw InvalidInputError("empty batch");
  const bool fc = cfg.phase == Phase::kFc;
  if (fc && !verifier) throw ConfigError("fc phase needs the frozen verifier");
  const SynthArch &arch = synth.arch();

  double frames = 0.0;
  for (const auto *ex : batch) frames += static_cast<double>(ex->mel.rows());
  const double n_mel = frames * arch.n_mels;
  const double n_batch = static_cast<double>(batch.size());

  if (grads) *grads = synth.params().ZerosLike();
  double sq_pre = 0.0, sq_post = 0.0, bce = 0.0, spk = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const TrainingExample &ex = *batch[i];
    ad::Tape tape;
    Binding b = Bind(tape, synth.params(), grads != nullptr);
    std::mt19937_64 rng(DeriveSeed(cfg.seed, step, static_cast<long>(i)));
    Dropout dropout{cfg.prenet_dropout, arch.prenet_dropout, &rng};
    ad::Var ref = tape.Constant(ex.ref.values);
    SynthesisGraph g = synth.TeacherForced(tape, b, ex.ids, ref, ex.mel, dropout);

    ad::Var pre = ad::SquaredErrorSum(g.mel_pre, ex.mel);
    ad::Var post = ad::SquaredErrorSum(g.mel_post, ex.mel);
    ad::Var stop = ad::BceWithLogitsSum(g.stop_logits, StopTargets(ex.mel.rows()));
    ad::Var root = ad::Add(ad::Add(ad::Scale(pre, 1.0 / n_mel), ad::Scale(post, 1.0 / n_mel)),
                           ad::Scale(stop, 1.0 / frames));
    sq_pre += pre.scalar();
    sq_post += post.scalar();
    bce += stop.scalar();
    if (fc) {
      Binding vb = Bind(tape, verifier->params(), false);
      ad::Var s = SpeakerFeedbackLoss(tape, vb, g.mel_post, ref, *verifier);
      spk += s.scalar();
      if (cfg.w_spk > 0) root = ad::Add(root, ad::Scale(s, cfg.w_spk / n_batch));
    }
    if (grads) {
      tape.Backward(root);
      const auto sg = CollectGradients(tape, b);
      for (std::size_t k = 0; k < sg.size(); ++k) (*grads)[k] += sg[k];
    }
  }

  LossBreakdown l;
  l.weights = {cfg.w_reg, cfg.w_spk};
  l.mse_pre = sq_pre / n_mel;
  l.mse_post = sq_post / n_mel;
  l.stop_loss = bce / frames;
  l.reg_loss = RegularizationLoss(synth.params());
  l.speaker_loss = fc ? spk / n_batch : 0.0;
  l.total = l.Recompute();
  if (grads && cfg.w_reg > 0)
    for (int k = 0; k < synth.params().size(); ++k)
      (*grads)[k] += (2.0 * cfg.w_reg) * synth.params()[k];
  return l;
}

TrainStepResult TrainStep(const std::vector<const TrainingExample *> &batch,
                          SynthesizerModel &synth, const VerifierModel *verifier,
                          Optimizer &opt, const TrainConfig &cfg, long step) {
  std::vector<Eigen::MatrixXd> grads;
  TrainStepResult r;
  r.loss = BatchLossAndGradients(batch, synth, verifier, cfg, step, &grads);
  const std::string bad = r.loss.FirstNonFinite();
  if (!bad.empty()) throw DivergenceError(step, bad);
  for (const auto &g : grads)
    if (!g.allFinite()) throw DivergenceError(step, "gradient");
  r.grad_norm = opt.Step(synth.params(), std::move(grads));
  return r;
}

TrainingSummary RunTraining(const DatasetManifest &manifest,
                            const TrainConfig &cfg) {
  cfg.Validate();
  if (cfg.phase == Phase::kVerifier)
    throw ConfigError("use RunVerifierTraining for the verifier phase");
  RequireFile(cfg.verifier_checkpoint, "verifier");
  if (cfg.phase == Phase::kFc || !cfg.init_checkpoint.empty())
    RequireFile(cfg.init_checkpoint, "synthesizer");
  manifest.Validate(true);

  const VerifierModel verifier =
      VerifierModel::FromCheckpoint(LoadCheckpoint(cfg.verifier_checkpoint));
  const std::uint64_t verifier_hash = verifier.params().Hash();
  const MelConfig mel;
  if (verifier.arch().n_mels != mel.n_mels)
    throw ConfigError("verifier mel bins differ from the feature config");

  SynthesizerModel synth;
  Optimizer opt;
  long step0 = 0;
  if (!cfg.init_checkpoint.empty()) {
    const Checkpoint ck = LoadCheckpoint(cfg.init_checkpoint);
    synth = SynthesizerModel::FromCheckpoint(ck);
    step0 = ck.meta.value("step", 0L);
    opt = Optimizer(cfg.optimizer, synth.params());
    const ParameterSet slots = ExtractPrefixed(ck.tensors, "opt/");
    if (slots.size() > 0 && ck.meta.value("optimizer", "") == cfg.optimizer.kind)
      opt.Restore(slots, ck.meta.value("optimizer_steps", 0L));
  } else {
    SynthArch arch = cfg.arch == "toy"
                         ? SynthArch::Toy(verifier.arch().embedding_dim(), mel)
                         : SynthArch::Full(verifier.arch().embedding_dim(), mel);
    synth = SynthesizerModel(arch, DeriveSeed(cfg.seed, -1, 0));
    opt = Optimizer(cfg.optimizer, synth.params());
  }
  if (synth.arch().spk_dim != verifier.arch().embedding_dim())
    throw ConfigError("synthesizer speaker dimension does not match the verifier");

  // Surface every data problem before step 0.
  const auto examples = PrepareExamples(manifest, Split::kTrain, mel, verifier);
  if (examples.empty()) throw InvalidInputError("manifest has no train utterances");
  const BatchSchedule schedule(examples, cfg.batch_size, cfg.seed);

  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.output_dir);

  TrainingSummary summary;
  summary.final_checkpoint = (fs::path(cfg.output_dir) / "final.fckp").string();
  summary.metrics_path = (fs::path(cfg.output_dir) / "metrics.tsv").string();
  summary.first_step = step0;
  summary.last_step = step0 + cfg.total_steps;

  if (cfg.total_steps == 0 && !cfg.init_checkpoint.empty()) {
    fs::copy_file(cfg.init_checkpoint, summary.final_checkpoint,
                  fs::copy_options::overwrite_existing, ec);
    if (ec) throw IoError("cannot write " + summary.final_checkpoint);
    return summary;
  }

  std::ofstream metrics = OpenMetrics(summary.metrics_path, kMetricsHeader);
  for (long step = step0; step < summary.last_step; ++step) {
    std::vector<const TrainingExample *> batch;
    for (int i : schedule.Batch(step)) batch.push_back(&examples[i]);
    const TrainStepResult r = TrainStep(batch, synth, &verifier, opt, cfg, step);
    WriteMetricsRow(metrics, step, cfg.phase, r.loss);
    summary.history.push_back(r.loss);
    const long done = step + 1;
    if (cfg.checkpoint_every > 0 && done % cfg.checkpoint_every == 0)
      SaveCheckpoint(CheckpointName(cfg.output_dir, done),
                     SynthCheckpoint(synth, opt, cfg, done, verifier_hash));
  }
  if (verifier.params().Hash() != verifier_hash)
    throw NumericalError("frozen verifier parameters changed during training");
  SaveCheckpoint(summary.final_checkpoint,
                 SynthCheckpoint(synth, opt, cfg, summary.last_step, verifier_hash));
  return summary;
}

std::vector<std::string> VerifierSpeakers(const Checkpoint &ckpt) {
  if (!ckpt.meta.contains("speakers")) return {};
  return ckpt.meta.at("speakers").get<std::vector<std::string>>();
}

VerifierTrainingSummary RunVerifierTraining(const DatasetManifest &manifest,
                                            const TrainConfig &cfg) {
  cfg.Validate();
  if (cfg.phase != Phase::kVerifier)
    throw ConfigError("RunVerifierTraining needs phase = verifier");
  manifest.Validate(true);

  VerifierTrainingSummary summary;
  summary.speakers = manifest.Speakers(Split::kTrain);
  if (summary.speakers.size() < 2)
    throw InvalidInputError("verifier training needs at least two speakers");
  const MelConfig mel;

  std::vector<Eigen::MatrixXd> mels;
  std::vector<int> labels;
  for (const ManifestEntry *e : manifest.InSplit(Split::kTrain)) {
    mels.push_back(LoadMel(manifest, *e, mel).frames);
    labels.push_back(static_cast<int>(
        std::lower_bound(summary.speakers.begin(), summary.speakers.end(),
                         e->speaker_id) -
        summary.speakers.begin()));
  }

  // Fixed input standardization from the training features.
  double sum = 0.0, sum_sq = 0.0, count = 0.0;
  for (const auto &m : mels) {
    sum += m.sum();
    sum_sq += m.squaredNorm();
    count += static_cast<double>(m.size());
  }
  const int n_spk = static_cast<int>(summary.speakers.size());
  VerifierArch arch = cfg.arch == "toy" ? VerifierArch::Toy(n_spk) : VerifierArch::Full(n_spk);
  arch.n_mels = mel.n_mels;
  arch.input_mean = sum / count;
  arch.input_std = std::sqrt(std::max(sum_sq / count - arch.input_mean * arch.input_mean, 1e-12));

  VerifierModel model(arch, DeriveSeed(cfg.seed, -1, 0));
  Optimizer opt(cfg.optimizer, model.params());

  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.output_dir);
  std::ofstream metrics = OpenMetrics(
      (fs::path(cfg.output_dir) / "metrics.tsv").string(), "step\tphase\tloss\taccuracy");

  auto checkpoint = [&](long step) {
    Checkpoint c = model.ToCheckpoint();
    c.meta["step"] = step;
    c.meta["speakers"] = summary.speakers;
    return c;
  };

  const int crop = arch.crop_frames;
  for (long step = 0; step < cfg.total_steps; ++step) {
    std::mt19937_64 rng(DeriveSeed(cfg.seed, step, 0));
    std::uniform_int_distribution<std::size_t> pick(0, mels.size() - 1);
    VerifierBatch batch;
    for (int i = 0; i < cfg.batch_size; ++i) {
      const std::size_t k = pick(rng);
      const Eigen::MatrixXd &m = mels[k];
      Eigen::MatrixXd c = Eigen::MatrixXd::Constant(crop, m.cols(), mel.floor_value());
      if (m.rows() <= crop) {
        c.topRows(m.rows()) = m;
      } else {
        std::uniform_int_distribution<Eigen::Index> off(0, m.rows() - crop);
        c = m.middleRows(off(rng), crop);
      }
      batch.crops.push_back(std::move(c));
      batch.labels.push_back(labels[k]);
    }
    const VerifierStepResult r = TrainVerifierStep(batch, model, opt, step);
    summary.history.push_back(r);
    char buf[128];
    std::snprintf(buf, sizeof buf, "%ld\tverifier\t%.9g\t%.9g", step, r.loss, r.accuracy);
    metrics << buf << '\n';
    const long done = step + 1;
    if (cfg.checkpoint_every > 0 && done % cfg.checkpoint_every == 0)
      SaveCheckpoint(CheckpointName(cfg.output_dir, done), checkpoint(done));
  }
  summary.final_checkpoint = (fs::path(cfg.output_dir) / "final.fckp").string();
  SaveCheckpoint(summary.final_checkpoint, checkpoint(cfg.total_steps));
  return summary;
}

}  // namespace fctts
