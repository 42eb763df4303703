// src/synth/synthesizer.cc

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

#include "fctts/synth/synthesizer.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fctts/errors.h"
#include "fctts/nn/layers.h"

namespace fctts {

SynthArch SynthArch::Full(int spk_dim, const MelConfig &mel) {
  SynthArch a;
  a.spk_dim = spk_dim;
  a.n_mels = mel.n_mels;
  a.go_value = mel.floor_value();
  return a;
}

SynthArch SynthArch::Toy(int spk_dim, const MelConfig &mel) {
  SynthArch a = Full(spk_dim, mel);
  a.char_dim = 16;
  a.enc_width = 32;
  a.prenet_dim = 32;
  a.attn_dim = 32;
  a.loc_filters = 8;
  a.loc_kernel = 7;
  a.decoder_dim = 64;
  a.postnet_layers = 3;
  a.postnet_width = 32;
  return a;
}

void SynthArch::Validate() const {
  if (vocab_size < 3) throw ConfigError("vocab_size must be >= 3");
  if (char_dim < 1 || enc_width < 2 || enc_width % 2 != 0)
    throw ConfigError("char_dim must be positive and enc_width even");
  if (enc_convs < 0 || enc_kernel % 2 == 0 || enc_kernel < 1)
    throw ConfigError("encoder convolutions need a positive odd kernel");
  if (spk_dim < 0 || n_mels < 1) throw ConfigError("bad spk_dim or n_mels");
  if (prenet_layers < 1 || prenet_dim < 1)
    throw ConfigError("PreNet needs at least one layer");
  if (!(prenet_dropout >= 0.0 && prenet_dropout < 1.0))
    throw ConfigError("prenet_dropout must be in [0, 1)");
  if (attn_dim < 1 || loc_filters < 1 || loc_kernel < 1 || loc_kernel % 2 == 0)
    throw ConfigError("attention sizes must be positive, location kernel odd");
  if (decoder_dim < 1) throw ConfigError("decoder_dim must be positive");
  if (postnet_layers < 1 || postnet_width < 1 || postnet_kernel % 2 == 0)
    throw ConfigError("PostNet needs >= 1 layer and an odd kernel");
  if (reduction != 1) throw ConfigError("only reduction factor 1 is supported");
}

nlohmann::json SynthArch::ToJson() const {
  return {{"vocab_size", vocab_size},     {"char_dim", char_dim},
          {"enc_convs", enc_convs},       {"enc_kernel", enc_kernel},
          {"enc_width", enc_width},       {"spk_dim", spk_dim},
          {"n_mels", n_mels},             {"prenet_dim", prenet_dim},
          {"prenet_layers", prenet_layers}, {"prenet_dropout", prenet_dropout},
          {"attn_dim", attn_dim},         {"loc_filters", loc_filters},
          {"loc_kernel", loc_kernel},     {"decoder_dim", decoder_dim},
          {"postnet_layers", postnet_layers}, {"postnet_width", postnet_width},
          {"postnet_kernel", postnet_kernel}, {"reduction", reduction},
          {"go_value", go_value}};
}

SynthArch SynthArch::FromJson(const nlohmann::json &j) {
  SynthArch a;
  a.vocab_size = j.at("vocab_size");
  a.char_dim = j.at("char_dim");
  a.enc_convs = j.at("enc_convs");
  a.enc_kernel = j.at("enc_kernel");
  a.enc_width = j.at("enc_width");
  a.spk_dim = j.at("spk_dim");
  a.n_mels = j.at("n_mels");
  a.prenet_dim = j.at("prenet_dim");
  a.prenet_layers = j.at("prenet_layers");
  a.prenet_dropout = j.at("prenet_dropout");
  a.attn_dim = j.at("attn_dim");
  a.loc_filters = j.at("loc_filters");
  a.loc_kernel = j.at("loc_kernel");
  a.decoder_dim = j.at("decoder_dim");
  a.postnet_layers = j.at("postnet_layers");
  a.postnet_width = j.at("postnet_width");
  a.postnet_kernel = j.at("postnet_kernel");
  a.reduction = j.at("reduction");
  a.go_value = j.at("go_value");
  a.Validate();
  return a;
}

SynthesizerModel::SynthesizerModel(SynthArch arch, std::uint64_t seed)
    : arch_(std::move(arch)) {
  arch_.Validate();
  Register(true, seed);
}

SynthesizerModel::SynthesizerModel(SynthArch arch, ParameterSet params)
    : arch_(std::move(arch)) {
  arch_.Validate();
  Register(false, 0);
  if (params.size() != params_.size())
    throw ConfigError("synthesizer parameter count " +
                      std::to_string(params.size()) +
                      " does not match architecture (" +
                      std::to_string(params_.size()) + ")");
  for (int i = 0; i < params_.size(); ++i) {
    const auto &src = params.at(params_.name(i));
    if (src.rows() != params_[i].rows() || src.cols() != params_[i].cols())
      throw ConfigError("synthesizer parameter " + params_.name(i) +
                        " has the wrong shape");
    params_[i] = src;
  }
}

void SynthesizerModel::Register(bool random, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const SynthArch &a = arch_;
  auto dense = [&](const std::string &name, Eigen::Index in, Eigen::Index out,
                   double gain = 1.0) {
    params_.Add(name + "/w", random ? Eigen::MatrixXd(gain * GlorotUniform(in, out, rng))
                                    : Eigen::MatrixXd::Zero(in, out));
    params_.Add(name + "/b", Eigen::MatrixXd::Zero(1, out));
  };
  auto lstm = [&](const std::string &name, Eigen::Index in, Eigen::Index h) {
    params_.Add(name + "/wx", random ? GlorotUniform(in, 4 * h, rng)
                                     : Eigen::MatrixXd::Zero(in, 4 * h));
    params_.Add(name + "/wh", random ? GlorotUniform(h, 4 * h, rng)
                                     : Eigen::MatrixXd::Zero(h, 4 * h));
    Eigen::MatrixXd bias = Eigen::MatrixXd::Zero(1, 4 * h);
    if (random) bias.middleCols(h, h).setOnes();  // forget gate
    params_.Add(name + "/b", bias);
  };

  std::normal_distribution<double> emb_init(0.0, 0.3);
  Eigen::MatrixXd table(a.vocab_size, a.char_dim);
  for (Eigen::Index j = 0; j < table.cols(); ++j)
    for (Eigen::Index i = 0; i < table.rows(); ++i)
      table(i, j) = random ? emb_init(rng) : 0.0;
  params_.Add("embed/table", table);

  Eigen::Index in = a.char_dim;
  for (int i = 0; i < a.enc_convs; ++i) {
    dense("enc/conv" + std::to_string(i), a.enc_kernel * in, a.enc_width);
    in = a.enc_width;
  }
  lstm("enc/lstm_f", in, a.enc_width / 2);
  lstm("enc/lstm_b", in, a.enc_width / 2);

  in = a.n_mels;
  for (int i = 0; i < a.prenet_layers; ++i) {
    dense("prenet/fc" + std::to_string(i), in, a.prenet_dim);
    in = a.prenet_dim;
  }

  const int m = a.memory_dim();
  lstm("dec/lstm", a.prenet_dim + m, a.decoder_dim);

  params_.Add("attn/wq", random ? GlorotUniform(a.decoder_dim, a.attn_dim, rng)
                                : Eigen::MatrixXd::Zero(a.decoder_dim, a.attn_dim));
  params_.Add("attn/b", Eigen::MatrixXd::Zero(1, a.attn_dim));
  params_.Add("attn/wm", random ? GlorotUniform(m, a.attn_dim, rng)
                                : Eigen::MatrixXd::Zero(m, a.attn_dim));
  dense("attn/loc", a.loc_kernel * 2, a.loc_filters);
  params_.Add("attn/loc_proj", random ? GlorotUniform(a.loc_filters, a.attn_dim, rng)
                                      : Eigen::MatrixXd::Zero(a.loc_filters, a.attn_dim));
  params_.Add("attn/v", random ? GlorotUniform(a.attn_dim, 1, rng)
                               : Eigen::MatrixXd::Zero(a.attn_dim, 1));

  dense("proj/mel", a.decoder_dim + m, a.n_mels);
  dense("proj/stop", a.decoder_dim + m, 1);

  in = a.n_mels;
  for (int i = 0; i < a.postnet_layers; ++i) {
    const bool last = i + 1 == a.postnet_layers;
    const int out = last ? a.n_mels : a.postnet_width;
    dense("postnet/conv" + std::to_string(i), a.postnet_kernel * in, out,
          last ? 0.1 : 1.0);
    in = out;
  }
}

ad::Var SynthesizerModel::EncodeText(ad::Tape &tape, const Binding &b,
                                     const std::vector<int> &ids) const {
  if (ids.empty()) throw InvalidInputError("empty token sequence");
  for (int id : ids)
    if (id < 0 || id >= arch_.vocab_size)
      throw InvalidInputError("token id " + std::to_string(id) +
                              " outside vocabulary of " +
                              std::to_string(arch_.vocab_size));
  ad::Var x = ad::GatherRows(P(b, "embed/table"), ids);
  for (int i = 0; i < arch_.enc_convs; ++i) {
    const std::string n = "enc/conv" + std::to_string(i);
    x = ad::Relu(nn::Conv1d(x, arch_.enc_kernel, P(b, n + "/w"), P(b, n + "/b")));
  }
  const Eigen::Index len = x.rows();
  const int h = arch_.enc_width / 2;
  auto run = [&](const std::string &name, bool reverse) {
    ad::Var gx = nn::Dense(x, P(b, name + "/wx"), P(b, name + "/b"));
    nn::LstmState s{tape.Constant(Eigen::MatrixXd::Zero(1, h)),
                    tape.Constant(Eigen::MatrixXd::Zero(1, h))};
    std::vector<ad::Var> rows(static_cast<std::size_t>(len));
    for (Eigen::Index k = 0; k < len; ++k) {
      const Eigen::Index t = reverse ? len - 1 - k : k;
      s = nn::LstmStep(ad::SliceRows(gx, t, 1), s, P(b, name + "/wh"));
      rows[static_cast<std::size_t>(t)] = s.h;
    }
    return ad::ConcatRows(rows);
  };
  const ad::Var parts[] = {run("enc/lstm_f", false), run("enc/lstm_b", true)};
  return ad::ConcatCols(parts);
}

ad::Var SynthesizerModel::Condition(ad::Tape &tape, ad::Var states,
                                    ad::Var emb) const {
  if (emb.rows() != 1 || emb.cols() != arch_.spk_dim)
    throw ConfigError("speaker embedding has dimension " +
                      std::to_string(emb.cols()) + ", synthesizer expects " +
                      std::to_string(arch_.spk_dim));
  ad::Var ones = tape.Constant(Eigen::MatrixXd::Ones(states.rows(), 1));
  const ad::Var parts[] = {states, ad::MatMul(ones, emb)};
  return ad::ConcatCols(parts);
}

ad::Var SynthesizerModel::ProcessMemory(ad::Tape &, const Binding &b,
                                        ad::Var memory) const {
  return ad::MatMul(memory, P(b, "attn/wm"));
}

DecoderState SynthesizerModel::ZeroState(ad::Tape &tape,
                                         Eigen::Index length) const {
  DecoderState s;
  s.h = tape.Constant(Eigen::MatrixXd::Zero(1, arch_.decoder_dim));
  s.c = tape.Constant(Eigen::MatrixXd::Zero(1, arch_.decoder_dim));
  s.context = tape.Constant(Eigen::MatrixXd::Zero(1, arch_.memory_dim()));
  s.prev_att = tape.Constant(Eigen::MatrixXd::Zero(1, length));
  s.cum_att = tape.Constant(Eigen::MatrixXd::Zero(1, length));
  return s;
}

ad::Var SynthesizerModel::GoFrame(ad::Tape &tape) const {
  return tape.Constant(Eigen::MatrixXd::Constant(1, arch_.n_mels, arch_.go_value));
}

DecoderStepOutput SynthesizerModel::DecoderStep(
    ad::Tape &, const Binding &b, ad::Var prev_frame,
    const DecoderState &state, ad::Var memory, ad::Var processed_memory,
    const Dropout &dropout, Eigen::Index step) const {
  ad::Var p = prev_frame;
  for (int i = 0; i < arch_.prenet_layers; ++i) {
    const std::string n = "prenet/fc" + std::to_string(i);
    p = ad::Relu(nn::Dense(p, P(b, n + "/w"), P(b, n + "/b")));
    if (dropout.enabled && dropout.rate > 0.0) {
      std::bernoulli_distribution keep(1.0 - dropout.rate);
      Eigen::MatrixXd mask(1, p.cols());
      for (Eigen::Index k = 0; k < mask.cols(); ++k)
        mask(0, k) = keep(*dropout.rng) ? 1.0 / (1.0 - dropout.rate) : 0.0;
      p = ad::MulConst(p, mask);
    }
  }

  const ad::Var lstm_in[] = {p, state.context};
  ad::Var gates_x = nn::Dense(ad::ConcatCols(lstm_in), P(b, "dec/lstm/wx"),
                              P(b, "dec/lstm/b"));
  nn::LstmState lstm = nn::LstmStep(gates_x, {state.h, state.c}, P(b, "dec/lstm/wh"));

  // Location-sensitive additive attention.
  ad::Var query = nn::Dense(lstm.h, P(b, "attn/wq"), P(b, "attn/b"));
  const ad::Var feats[] = {ad::Transpose(state.prev_att),
                           ad::Transpose(state.cum_att)};
  ad::Var loc = nn::Conv1d(ad::ConcatCols(feats), arch_.loc_kernel,
                           P(b, "attn/loc/w"), P(b, "attn/loc/b"));
  ad::Var loc_proj = ad::MatMul(loc, P(b, "attn/loc_proj"));
  ad::Var hidden = ad::Tanh(ad::AddRow(ad::Add(processed_memory, loc_proj), query));
  ad::Var energies = ad::Transpose(ad::MatMul(hidden, P(b, "attn/v")));
  ad::Var att = ad::SoftmaxRows(energies);
  ad::Var context = ad::MatMul(att, memory);

  const ad::Var out_parts[] = {lstm.h, context};
  ad::Var out = ad::ConcatCols(out_parts);

  DecoderStepOutput r;
  r.mel = nn::Dense(out, P(b, "proj/mel/w"), P(b, "proj/mel/b"));
  r.stop = nn::Dense(out, P(b, "proj/stop/w"), P(b, "proj/stop/b"));
  r.attention = att;
  r.next.h = lstm.h;
  r.next.c = lstm.c;
  r.next.context = context;
  r.next.prev_att = att;
  r.next.cum_att = ad::Add(state.cum_att, att);
  if (!r.mel.value().allFinite() || !r.stop.value().allFinite())
    throw NumericalError("non-finite decoder output at step " + std::to_string(step));
  return r;
}

ad::Var SynthesizerModel::PostnetResidual(ad::Tape &, const Binding &b,
                                          ad::Var mel_pre) const {
  if (mel_pre.cols() != arch_.n_mels)
    throw ConfigError("PostNet expects " + std::to_string(arch_.n_mels) +
                      " mel bins");
  ad::Var x = mel_pre;
  for (int i = 0; i < arch_.postnet_layers; ++i) {
    const std::string n = "postnet/conv" + std::to_string(i);
    x = nn::Conv1d(x, arch_.postnet_kernel, P(b, n + "/w"), P(b, n + "/b"));
    if (i + 1 < arch_.postnet_layers) x = ad::Tanh(x);
  }
  return x;
}

SynthesisGraph SynthesizerModel::TeacherForced(ad::Tape &tape, const Binding &b,
                                               const std::vector<int> &ids,
                                               ad::Var emb,
                                               const Eigen::MatrixXd &target,
                                               const Dropout &dropout) const {
  if (target.rows() < 1) throw InvalidInputError("empty target mel");
  if (target.cols() != arch_.n_mels)
    throw ConfigError("target has " + std::to_string(target.cols()) +
                      " mel bins, synthesizer expects " +
                      std::to_string(arch_.n_mels));
  ad::Var memory = Condition(tape, EncodeText(tape, b, ids), emb);
  ad::Var processed = ProcessMemory(tape, b, memory);
  DecoderState state = ZeroState(tape, memory.rows());
  const Eigen::Index frames = target.rows();
  std::vector<ad::Var> mels, stops, atts;
  mels.reserve(frames);
  stops.reserve(frames);
  atts.reserve(frames);
  ad::Var prev = GoFrame(tape);
  for (Eigen::Index t = 0; t < frames; ++t) {
    DecoderStepOutput o = DecoderStep(tape, b, prev, state, memory, processed, dropout, t);
    mels.push_back(o.mel);
    stops.push_back(o.stop);
    atts.push_back(o.attention);
    state = o.next;
    if (t + 1 < frames) prev = tape.Constant(target.row(t));
  }
  SynthesisGraph g;
  g.mel_pre = ad::ConcatRows(mels);
  g.stop_logits = ad::ConcatRows(stops);
  g.alignments = ad::ConcatRows(atts);
  g.residual = PostnetResidual(tape, b, g.mel_pre);
  g.mel_post = ad::Add(g.mel_pre, g.residual);
  return g;
}

std::vector<int> SynthesizerModel::GroupIndices(const std::string &prefix) const {
  std::vector<int> out;
  for (int i = 0; i < params_.size(); ++i)
    if (params_.name(i).rfind(prefix, 0) == 0) out.push_back(i);
  return out;
}

Checkpoint SynthesizerModel::ToCheckpoint() const {
  Checkpoint c;
  c.meta = {{"kind", "synthesizer"}, {"arch", arch_.ToJson()}};
  AppendPrefixed(c.tensors, params_, "param/");
  return c;
}

SynthesizerModel SynthesizerModel::FromCheckpoint(const Checkpoint &ckpt,
                                                  const SynthArch *expected) {
  if (ckpt.meta.value("kind", "") != "synthesizer")
    throw ConfigError("checkpoint is not a synthesizer checkpoint");
  SynthArch arch = SynthArch::FromJson(ckpt.meta.at("arch"));
  if (expected && !(arch == *expected))
    throw ConfigError("synthesizer architecture mismatch: checkpoint has " +
                      arch.ToJson().dump() + ", expected " +
                      expected->ToJson().dump());
  return SynthesizerModel(arch, ExtractPrefixed(ckpt.tensors, "param/"));
}

int SynthesisLimits::Resolve(std::size_t text_length) const {
  if (max_steps > 0) return max_steps;
  return std::max<int>(200, 12 * static_cast<int>(text_length));
}

Eigen::MatrixXd EncodeText(const TextSequence &seq, const SynthesizerModel &model) {
  ad::Tape tape;
  Binding b = Bind(tape, model.params(), false);
  return model.EncodeText(tape, b, seq.ids).value();
}

Eigen::MatrixXd Condition(const Eigen::MatrixXd &states,
                          const SpeakerEmbedding &emb, int expected_dim) {
  if (emb.dim() != expected_dim)
    throw ConfigError("speaker embedding has dimension " +
                      std::to_string(emb.dim()) + ", expected " +
                      std::to_string(expected_dim));
  Eigen::MatrixXd out(states.rows(), states.cols() + emb.dim());
  out.leftCols(states.cols()) = states;
  out.rightCols(emb.dim()).rowwise() = emb.values;
  return out;
}

PostnetResult PostnetRefine(const Eigen::MatrixXd &mel_pre,
                            const SynthesizerModel &model) {
  ad::Tape tape;
  Binding b = Bind(tape, model.params(), false);
  ad::Var pre = tape.Constant(mel_pre);
  ad::Var res = model.PostnetResidual(tape, b, pre);
  PostnetResult r;
  r.residual = res.value();
  r.mel_post = ad::Add(pre, res).value();
  return r;
}

SynthesisOutput RunTeacherForced(const TextSequence &seq,
                                 const SpeakerEmbedding &emb,
                                 const MelSpectrogram &target,
                                 const SynthesizerModel &model,
                                 const DecodeOptions &options) {
  if (target.config.n_mels != model.arch().n_mels ||
      target.config.floor_value() != model.arch().go_value)
    throw ConfigError("target mel config does not match the synthesizer");
  std::mt19937_64 rng(options.seed);
  Dropout dropout{options.prenet_dropout, model.arch().prenet_dropout, &rng};
  ad::Tape tape;
  Binding b = Bind(tape, model.params(), false);
  SynthesisGraph g = model.TeacherForced(tape, b, seq.ids,
                                         tape.Constant(emb.values), target.frames,
                                         dropout);
  SynthesisOutput out;
  out.mel_pre = g.mel_pre.value();
  out.residual = g.residual.value();
  out.mel_post = g.mel_post.value();
  out.stop_logits = g.stop_logits.value().col(0);
  out.alignments = g.alignments.value();
  out.stopped_naturally = true;
  return out;
}

SynthesisOutput Synthesize(const TextSequence &seq, const SpeakerEmbedding &emb,
                           const SynthesizerModel &model,
                           const SynthesisLimits &limits,
                           const DecodeOptions &options) {
  const int max_steps = limits.Resolve(seq.ids.size());
  if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
  std::mt19937_64 rng(options.seed);
  Dropout dropout{options.prenet_dropout, model.arch().prenet_dropout, &rng};
  ad::Tape tape;
  Binding b = Bind(tape, model.params(), false);
  ad::Var memory =
      model.Condition(tape, model.EncodeText(tape, b, seq.ids), tape.Constant(emb.values));
  ad::Var processed = model.ProcessMemory(tape, b, memory);
  DecoderState state = model.ZeroState(tape, memory.rows());
  ad::Var prev = model.GoFrame(tape);

  std::vector<ad::Var> mels, stops, atts;
  SynthesisOutput out;
  for (int t = 0; t < max_steps; ++t) {
    DecoderStepOutput o =
        model.DecoderStep(tape, b, prev, state, memory, processed, dropout, t);
    mels.push_back(o.mel);
    stops.push_back(o.stop);
    atts.push_back(o.attention);
    state = o.next;
    prev = o.mel;
    const double logit = o.stop.scalar();
    const double prob = 1.0 / (1.0 + std::exp(-logit));
    if (prob > limits.stop_threshold) {
      out.stopped_naturally = true;
      break;
    }
  }
  ad::Var pre = ad::ConcatRows(mels);
  ad::Var res = model.PostnetResidual(tape, b, pre);
  out.mel_pre = pre.value();
  out.residual = res.value();
  out.mel_post = ad::Add(pre, res).value();
  out.stop_logits = ad::ConcatRows(stops).value().col(0);
  out.alignments = ad::ConcatRows(atts).value();
  return out;
}

Eigen::MatrixXd StopTargets(Eigen::Index frames) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(frames, 1);
  if (frames > 0) t(frames - 1, 0) = 1.0;
  return t;
}

}  // namespace fctts
