// src/train/config.cc

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

#include "fctts/train/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fctts/errors.h"

namespace fctts {

namespace {

std::string Trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double ToDouble(const std::string &key, const std::string &v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used != v.size() || !std::isfinite(d))
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  return d;
}

long ToLong(const std::string &key, const std::string &v) {
  long x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  return x;
}

bool ToBool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + v + "'");
}

}  // namespace

std::string PhaseName(Phase p) {
  switch (p) {
    case Phase::kVerifier: return "verifier";
    case Phase::kBaseline: return "baseline";
    case Phase::kFc: return "fc";
  }
  return "baseline";
}

Phase ParsePhase(const std::string &name) {
  if (name == "verifier") return Phase::kVerifier;
  if (name == "baseline") return Phase::kBaseline;
  if (name == "fc") return Phase::kFc;
  throw ConfigError("unknown phase '" + name + "'");
}

std::map<std::string, std::string> ParseKeyValueText(const std::string &text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!out.emplace(key, value).second)
      throw ConfigError("key '" + key + "' given twice");
  }
  return out;
}

TrainConfig TrainConfig::Defaults(Phase phase) {
  TrainConfig c;
  c.phase = phase;
  if (phase == Phase::kVerifier) {
    c.batch_size = 16;
    c.total_steps = 200;
    c.w_reg = 0.0;
    c.optimizer.kind = "adam";
    c.optimizer.learning_rate = 1e-3;
    c.optimizer.clip_norm = 5.0;
  } else {
    c.optimizer.kind = "adam";
    c.optimizer.learning_rate = 1e-3;
    c.optimizer.clip_norm = 1.0;
    c.w_spk = phase == Phase::kFc ? 1.0 : 0.0;
  }
  return c;
}

void TrainConfig::Set(const std::string &key, const std::string &v) {
  if (key == "phase") {
    phase = ParsePhase(v);
  } else if (key == "arch") {
    arch = v;
  } else if (key == "w_reg") {
    w_reg = ToDouble(key, v);
  } else if (key == "w_spk") {
    w_spk = ToDouble(key, v);
  } else if (key == "batch_size") {
    batch_size = static_cast<int>(ToLong(key, v));
  } else if (key == "total_steps" || key == "steps") {
    total_steps = ToLong(key, v);
  } else if (key == "seed") {
    seed = static_cast<std::uint64_t>(ToLong(key, v));
  } else if (key == "optimizer") {
    optimizer.kind = v;
  } else if (key == "learning_rate") {
    optimizer.learning_rate = ToDouble(key, v);
  } else if (key == "momentum") {
    optimizer.momentum = ToDouble(key, v);
  } else if (key == "beta1") {
    optimizer.beta1 = ToDouble(key, v);
  } else if (key == "beta2") {
    optimizer.beta2 = ToDouble(key, v);
  } else if (key == "epsilon") {
    optimizer.epsilon = ToDouble(key, v);
  } else if (key == "clip_norm") {
    optimizer.clip_norm = ToDouble(key, v);
  } else if (key == "checkpoint_every") {
    checkpoint_every = ToLong(key, v);
  } else if (key == "prenet_dropout") {
    prenet_dropout = ToBool(key, v);
  } else if (key == "verifier_checkpoint") {
    verifier_checkpoint = v;
  } else if (key == "init_checkpoint") {
    init_checkpoint = v;
  } else if (key == "output_dir") {
    output_dir = v;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void TrainConfig::Validate() const {
  if (arch != "toy" && arch != "full")
    throw ConfigError("arch must be toy or full, got '" + arch + "'");
  if (w_reg < 0 || w_spk < 0) throw ConfigError("loss weights must be non-negative");
  if (w_spk > 0 && phase != Phase::kFc)
    throw ConfigError("w_spk > 0 is only allowed in the fc phase");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (total_steps < 0) throw ConfigError("total_steps must be non-negative");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be non-negative");
  if (optimizer.kind != "sgd" && optimizer.kind != "adam")
    throw ConfigError("optimizer must be sgd or adam");
  if (optimizer.learning_rate < 0) throw ConfigError("learning_rate must be >= 0");
  if (phase != Phase::kVerifier && verifier_checkpoint.empty())
    throw ConfigError("synthesizer training requires verifier_checkpoint");
  if (phase == Phase::kFc && init_checkpoint.empty())
    throw ConfigError("fc phase requires a baseline init_checkpoint");
  if (output_dir.empty()) throw ConfigError("output_dir is empty");
}

std::string TrainConfig::ToText() const {
  std::ostringstream o;
  o.precision(17);
  o << "phase = " << PhaseName(phase) << "\n"
    << "arch = " << arch << "\n"
    << "w_reg = " << w_reg << "\n"
    << "w_spk = " << w_spk << "\n"
    << "batch_size = " << batch_size << "\n"
    << "total_steps = " << total_steps << "\n"
    << "seed = " << seed << "\n"
    << "optimizer = " << optimizer.kind << "\n"
    << "learning_rate = " << optimizer.learning_rate << "\n"
    << "momentum = " << optimizer.momentum << "\n"
    << "beta1 = " << optimizer.beta1 << "\n"
    << "beta2 = " << optimizer.beta2 << "\n"
    << "epsilon = " << optimizer.epsilon << "\n"
    << "clip_norm = " << optimizer.clip_norm << "\n"
    << "checkpoint_every = " << checkpoint_every << "\n"
    << "prenet_dropout = " << (prenet_dropout ? "true" : "false") << "\n";
  if (!verifier_checkpoint.empty())
    o << "verifier_checkpoint = " << verifier_checkpoint << "\n";
  if (!init_checkpoint.empty()) o << "init_checkpoint = " << init_checkpoint << "\n";
  o << "output_dir = " << output_dir << "\n";
  return o.str();
}

TrainConfig LoadTrainConfig(const std::string &path, Phase phase) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  TrainConfig c = TrainConfig::Defaults(phase);
  for (const auto &[k, v] : ParseKeyValueText(ss.str())) {
    if (k == "phase" && ParsePhase(v) != phase)
      throw ConfigError("config phase '" + v + "' does not match command phase '" +
                        PhaseName(phase) + "'");
    c.Set(k, v);
  }
  return c;
}

}  // namespace fctts
