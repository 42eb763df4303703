// src/verifier/speaker_encoder.cc

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

#include "fctts/verifier/speaker_encoder.h"

#include <cmath>
#include <random>
#include <string>

#include "fctts/errors.h"
#include "fctts/nn/kernels.h"
#include "fctts/nn/layers.h"

namespace fctts {

namespace {

std::string BlockName(std::size_t stage, int block) {
  return "s" + std::to_string(stage) + "b" + std::to_string(block);
}

bool NeedsProjection(const VerifierArch &a, std::size_t stage, int block,
                     int in_ch) {
  const int stride = block == 0 ? a.stride_of_stage(stage) : 1;
  return stride != 1 || in_ch != a.widths[stage];
}

}  // namespace

VerifierArch VerifierArch::Full(int n_speakers) {
  VerifierArch a;
  a.n_speakers = n_speakers;
  return a;
}

VerifierArch VerifierArch::Toy(int n_speakers) {
  VerifierArch a;
  a.widths = {4, 8, 16, 32};
  a.blocks = {1, 1, 1, 1};
  a.hidden = 64;
  a.n_speakers = n_speakers;
  a.crop_frames = 40;
  return a;
}

int VerifierArch::total_stride() const {
  int s = 1;
  for (std::size_t i = 0; i < widths.size(); ++i) s *= stride_of_stage(i);
  return s;
}

Eigen::Index VerifierArch::output_frames(Eigen::Index frames) const {
  for (std::size_t s = 0; s < widths.size(); ++s)
    if (stride_of_stage(s) == 2) frames = (frames - 1) / 2 + 1;
  return frames;
}

void VerifierArch::Validate() const {
  if (n_mels < 1) throw ConfigError("verifier n_mels must be >= 1");
  if (widths.empty() || widths.size() != blocks.size())
    throw ConfigError("verifier widths and blocks must be non-empty and equal length");
  for (std::size_t i = 0; i < widths.size(); ++i)
    if (widths[i] < 1 || blocks[i] < 1)
      throw ConfigError("verifier widths and block counts must be positive");
  if (kernel < 1 || kernel % 2 == 0) throw ConfigError("verifier kernel must be odd");
  if (hidden < 1 || n_speakers < 1)
    throw ConfigError("verifier hidden width and n_speakers must be positive");
  if (!(eps > 0.0) || !(input_std > 0.0))
    throw ConfigError("verifier eps and input_std must be positive");
  if (crop_frames < min_frames())
    throw ConfigError("crop_frames shorter than the minimum input length");
}

nlohmann::json VerifierArch::ToJson() const {
  return {{"n_mels", n_mels},         {"widths", widths},
          {"blocks", blocks},         {"kernel", kernel},
          {"hidden", hidden},         {"n_speakers", n_speakers},
          {"eps", eps},               {"crop_frames", crop_frames},
          {"input_mean", input_mean}, {"input_std", input_std}};
}

VerifierArch VerifierArch::FromJson(const nlohmann::json &j) {
  VerifierArch a;
  a.n_mels = j.at("n_mels");
  a.widths = j.at("widths").get<std::vector<int>>();
  a.blocks = j.at("blocks").get<std::vector<int>>();
  a.kernel = j.at("kernel");
  a.hidden = j.at("hidden");
  a.n_speakers = j.at("n_speakers");
  a.eps = j.at("eps");
  a.crop_frames = j.at("crop_frames");
  a.input_mean = j.at("input_mean");
  a.input_std = j.at("input_std");
  a.Validate();
  return a;
}

bool VerifierArch::operator==(const VerifierArch &o) const {
  return ToJson() == o.ToJson();
}

VerifierModel::VerifierModel(VerifierArch arch, std::uint64_t seed)
    : arch_(std::move(arch)) {
  arch_.Validate();
  Register(true, seed);
}

VerifierModel::VerifierModel(VerifierArch arch, ParameterSet params)
    : arch_(std::move(arch)) {
  arch_.Validate();
  Register(false, 0);
  if (params.size() != params_.size())
    throw ConfigError("verifier parameter count " + std::to_string(params.size()) +
                      " does not match architecture (" +
                      std::to_string(params_.size()) + ")");
  for (int i = 0; i < params_.size(); ++i) {
    const auto &src = params.at(params_.name(i));
    if (src.rows() != params_[i].rows() || src.cols() != params_[i].cols())
      throw ConfigError("verifier parameter " + params_.name(i) +
                        " has the wrong shape");
    params_[i] = src;
  }
}

void VerifierModel::Register(bool random, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int k = arch_.kernel;
  auto conv = [&](const std::string &name, int kh, int in, int out, double gain) {
    params_.Add(name + "/w", random ? HeNormal(kh * kh * in, out, rng, gain)
                                    : Eigen::MatrixXd::Zero(kh * kh * in, out));
    params_.Add(name + "/b", Eigen::MatrixXd::Zero(1, out));
  };
  conv("stem", k, 1, arch_.widths[0], 1.0);
  int in = arch_.widths[0];
  for (std::size_t s = 0; s < arch_.widths.size(); ++s) {
    for (int j = 0; j < arch_.blocks[s]; ++j) {
      const std::string name = BlockName(s, j);
      const int out = arch_.widths[s];
      conv(name + "/conv1", k, in, out, 1.0);
      conv(name + "/conv2", k, out, out, 0.5);
      if (NeedsProjection(arch_, s, j, in)) conv(name + "/proj", 1, in, out, 1.0);
      in = out;
    }
  }
  const int c = arch_.widths.back();
  const auto bins = arch_.output_bins();
  params_.Add("pool/freq_proj/w", random ? GlorotUniform(bins * c, c, rng)
                                         : Eigen::MatrixXd::Zero(bins * c, c));
  params_.Add("pool/freq_proj/b", Eigen::MatrixXd::Zero(1, c));
  const int d = arch_.embedding_dim();
  params_.Add("head/fc1/w", random ? GlorotUniform(d, arch_.hidden, rng)
                                   : Eigen::MatrixXd::Zero(d, arch_.hidden));
  params_.Add("head/fc1/b", Eigen::MatrixXd::Zero(1, arch_.hidden));
  params_.Add("head/fc2/w", random ? GlorotUniform(arch_.hidden, arch_.n_speakers, rng)
                                   : Eigen::MatrixXd::Zero(arch_.hidden, arch_.n_speakers));
  params_.Add("head/fc2/b", Eigen::MatrixXd::Zero(1, arch_.n_speakers));
}

void VerifierModel::CheckInput(const Eigen::MatrixXd &mel) const {
  if (mel.cols() != arch_.n_mels)
    throw ConfigError("verifier expects " + std::to_string(arch_.n_mels) +
                      " mel bins, got " + std::to_string(mel.cols()));
  if (mel.rows() < arch_.min_frames())
    throw InvalidInputError("input of " + std::to_string(mel.rows()) +
                            " frames is shorter than the minimum of " +
                            std::to_string(arch_.min_frames()));
}

ad::Var VerifierModel::EncodeFrames(ad::Tape &tape, const Binding &b,
                                    ad::Var mel) const {
  CheckInput(mel.value());
  const ParameterSet &p = params_;
  auto P = [&](const std::string &n) { return b[p.IndexOf(n)]; };

  Eigen::Index h = mel.rows(), w = mel.cols();
  ad::Var x = ad::Scale(
      ad::AddRow(mel, tape.Constant(Eigen::MatrixXd::Constant(1, w, -arch_.input_mean))),
      1.0 / arch_.input_std);
  x = ad::ReshapeRowMajor(x, h * w, 1);

  auto conv = [&](ad::Var in, Eigen::Index in_ch, const std::string &name,
                  int kernel, int stride, int out_ch, Eigen::Index *oh,
                  Eigen::Index *ow) {
    ConvGeometry g;
    g.in_h = h;
    g.in_w = w;
    g.in_ch = in_ch;
    g.out_ch = out_ch;
    g.kernel_h = g.kernel_w = kernel;
    g.stride_h = g.stride_w = stride;
    g.pad_h = g.pad_w = kernel / 2;
    *oh = g.out_h();
    *ow = g.out_w();
    return ad::Conv2d(in, g, P(name + "/w"), P(name + "/b"));
  };

  Eigen::Index oh, ow;
  x = ad::Relu(conv(x, 1, "stem", arch_.kernel, 1, arch_.widths[0], &oh, &ow));
  int in = arch_.widths[0];
  for (std::size_t s = 0; s < arch_.widths.size(); ++s) {
    for (int j = 0; j < arch_.blocks[s]; ++j) {
      const std::string name = BlockName(s, j);
      const int out = arch_.widths[s];
      const int stride = j == 0 ? arch_.stride_of_stage(s) : 1;
      Eigen::Index h1, w1, h2, w2;
      ad::Var y = ad::Relu(conv(x, in, name + "/conv1", arch_.kernel, stride,
                                out, &h1, &w1));
      ad::Var shortcut = x;
      if (NeedsProjection(arch_, s, j, in)) {
        Eigen::Index hp, wp;
        shortcut = conv(x, in, name + "/proj", 1, stride, out, &hp, &wp);
      }
      h = h1;
      w = w1;
      y = conv(y, out, name + "/conv2", arch_.kernel, 1, out, &h2, &w2);
      x = ad::Relu(ad::Add(y, shortcut));
      in = out;
    }
  }
  // Learned frequency aggregation: each frame's (bins x channels) map is
  // flattened and projected back to `channels` values.
  x = ad::ReshapeRowMajor(x, h, w * in);
  return nn::Dense(x, P("pool/freq_proj/w"), P("pool/freq_proj/b"));
}

ad::Var VerifierModel::Embed(ad::Tape &tape, const Binding &b,
                             ad::Var mel) const {
  return ad::StatisticsPool(EncodeFrames(tape, b, mel), arch_.eps);
}

ad::Var VerifierModel::Logits(ad::Tape &, const Binding &b, ad::Var emb) const {
  if (emb.cols() != arch_.embedding_dim() || emb.rows() != 1)
    throw ConfigError("classifier expects a 1 x " +
                      std::to_string(arch_.embedding_dim()) + " embedding");
  const ParameterSet &p = params_;
  auto P = [&](const std::string &n) { return b[p.IndexOf(n)]; };
  ad::Var hdn = ad::Relu(nn::Dense(emb, P("head/fc1/w"), P("head/fc1/b")));
  return nn::Dense(hdn, P("head/fc2/w"), P("head/fc2/b"));
}

Checkpoint VerifierModel::ToCheckpoint() const {
  Checkpoint c;
  c.meta = {{"kind", "verifier"}, {"arch", arch_.ToJson()}};
  AppendPrefixed(c.tensors, params_, "param/");
  return c;
}

VerifierModel VerifierModel::FromCheckpoint(const Checkpoint &ckpt,
                                            const VerifierArch *expected) {
  if (ckpt.meta.value("kind", "") != "verifier")
    throw ConfigError("checkpoint is not a verifier checkpoint");
  VerifierArch arch = VerifierArch::FromJson(ckpt.meta.at("arch"));
  if (expected && !(arch == *expected))
    throw ConfigError("verifier architecture mismatch: checkpoint has " +
                      arch.ToJson().dump() + ", expected " +
                      expected->ToJson().dump());
  return VerifierModel(arch, ExtractPrefixed(ckpt.tensors, "param/"));
}

Eigen::MatrixXd EncodeFrames(const MelSpectrogram &mel, const VerifierModel &model) {
  ad::Tape tape;
  Binding b = Bind(tape, model.params(), false);
  return model.EncodeFrames(tape, b, tape.Constant(mel.frames)).value();
}

SpeakerEmbedding StatisticsPoolEmbedding(const Eigen::MatrixXd &features,
                                         double eps) {
  return SpeakerEmbedding{StatisticsPool(features, eps)};
}

SpeakerEmbedding ExtractEmbedding(const Eigen::MatrixXd &frames,
                                  const VerifierModel &model) {
  ad::Tape tape;
  Binding b = Bind(tape, model.params(), false);
  ad::Var e = model.Embed(tape, b, tape.Constant(frames));
  return SpeakerEmbedding{e.value().row(0)};
}

SpeakerEmbedding ExtractEmbedding(const MelSpectrogram &mel,
                                  const VerifierModel &model) {
  return ExtractEmbedding(mel.frames, model);
}

Eigen::RowVectorXd Classify(const SpeakerEmbedding &emb,
                            const VerifierModel &model) {
  if (emb.dim() != model.arch().embedding_dim())
    throw ConfigError("embedding dimension " + std::to_string(emb.dim()) +
                      " does not match classifier input " +
                      std::to_string(model.arch().embedding_dim()));
  ad::Tape tape;
  Binding b = Bind(tape, model.params(), false);
  ad::Var logits = model.Logits(tape, b, tape.Constant(emb.values));
  ad::Var post = ad::SoftmaxRows(logits);
  return post.value().row(0);
}

double VerifierLossAndGradients(const VerifierBatch &batch,
                                const VerifierModel &model,
                                std::vector<Eigen::MatrixXd> *grads,
                                double *accuracy) {
  const std::size_t n = batch.crops.size();
  if (n == 0 || batch.labels.size() != n)
    throw InvalidInputError("verifier batch is empty or labels mismatch");
  for (int label : batch.labels)
    if (label < 0 || label >= model.arch().n_speakers)
      throw InvalidInputError("speaker label " + std::to_string(label) +
                              " outside [0, " +
                              std::to_string(model.arch().n_speakers) + ")");
  if (grads) *grads = model.params().ZerosLike();
  double loss = 0.0;
  int hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ad::Tape tape;
    Binding b = Bind(tape, model.params(), grads != nullptr);
    ad::Var emb = model.Embed(tape, b, tape.Constant(batch.crops[i]));
    ad::Var logits = model.Logits(tape, b, emb);
    Eigen::Index arg;
    logits.value().row(0).maxCoeff(&arg);
    if (arg == batch.labels[i]) ++hits;
    ad::Var ce = ad::Scale(ad::SoftmaxCrossEntropy(logits, batch.labels[i]),
                           1.0 / static_cast<double>(n));
    loss += ce.scalar();
    if (grads) {
      tape.Backward(ce);
      for (int k = 0; k < model.params().size(); ++k)
        (*grads)[k] += tape.Gradient(b[k]);
    }
  }
  if (accuracy) *accuracy = static_cast<double>(hits) / static_cast<double>(n);
  return loss;
}

VerifierStepResult TrainVerifierStep(const VerifierBatch &batch,
                                     VerifierModel &model, Optimizer &opt,
                                     long step) {
  std::vector<Eigen::MatrixXd> grads;
  VerifierStepResult r;
  r.loss = VerifierLossAndGradients(batch, model, &grads, &r.accuracy);
  if (!std::isfinite(r.loss)) throw DivergenceError(step, "cross-entropy");
  opt.Step(model.params(), std::move(grads));
  return r;
}

}  // namespace fctts
