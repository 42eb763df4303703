// src/cli/cli.cc

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

#include "fctts/cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "fctts/audio/mel_io.h"
#include "fctts/audio/wav.h"
#include "fctts/data/manifest.h"
#include "fctts/data/toy.h"
#include "fctts/errors.h"
#include "fctts/eval/evaluation.h"
#include "fctts/nn/checkpoint.h"
#include "fctts/train/trainer.h"

namespace fs = std::filesystem;

namespace fctts {

namespace {

const std::set<std::string> kTrainCommands = {"train-verifier", "train-baseline",
                                              "train-fc"};

std::string ReadFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Value of --config in the raw arguments, if any.
std::string FindConfig(const std::vector<std::string> &args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return "";
}

// Turns config-file keys into leading flags so that explicit flags, which
// come later, take precedence.
std::vector<std::string> InjectConfig(const std::vector<std::string> &args,
                                      CLI::App &sub) {
  const std::string path = FindConfig(args);
  if (path.empty()) return args;
  std::vector<std::string> out{args.front()};
  for (const auto &[key, value] : ParseKeyValueText(ReadFile(path))) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    const CLI::Option *opt = sub.get_option_no_throw("--" + flag);
    if (!opt || flag == "config")
      throw ConfigError("unknown config key '" + key + "' for " + sub.get_name());
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1") out.push_back("--" + flag);
      else if (value != "false" && value != "0")
        throw ConfigError("'" + key + "' expects true or false");
    } else {
      out.push_back("--" + flag);
      out.push_back(value);
    }
  }
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

SpeakerEmbedding EmbeddingFromWav(const std::string &path,
                                  const VerifierModel &verifier) {
  const MelConfig mel;
  AudioClip clip = ReadWav(path);
  if (clip.sample_rate_hz != mel.sample_rate_hz)
    clip = Resample(clip, mel.sample_rate_hz).clip;
  return ExtractEmbedding(ComputeMelSpectrogram(clip, mel), verifier);
}

DatasetManifest SelectSplit(const DatasetManifest &m, const std::string &split) {
  Split s;
  if (split == "auto")
    s = m.InSplit(Split::kTest).empty() ? Split::kVal : Split::kTest;
  else
    s = ParseSplit(split);
  DatasetManifest out;
  out.base_dir = m.base_dir;
  for (const auto &e : m.entries)
    if (e.split == s) out.entries.push_back(e);
  if (out.entries.empty())
    throw InvalidInputError("manifest has no '" + SplitName(s) + "' utterances");
  return out;
}

struct TrainFlags {
  std::string manifest, verifier, init, out, arch;
  long steps = 0;
  int batch_size = 0;
  double w_spk = 0, w_reg = 0, lr = 0;
  long checkpoint_every = 0;
  bool no_dropout = false;
};

void AddTrainFlags(CLI::App *sub, TrainFlags &f, bool synth) {
  sub->add_option("--manifest", f.manifest, "Dataset manifest")->required();
  sub->add_option("--out", f.out, "Output directory");
  sub->add_option("--steps", f.steps, "Steps to run in this invocation");
  sub->add_option("--batch-size", f.batch_size, "Batch size");
  sub->add_option("--learning-rate", f.lr, "Learning rate");
  sub->add_option("--checkpoint-every", f.checkpoint_every, "Checkpoint cadence");
  sub->add_option("--arch", f.arch, "toy or full");
  if (synth) {
    sub->add_option("--verifier", f.verifier, "Frozen verifier checkpoint");
    sub->add_option("--init", f.init, "Synthesizer checkpoint to continue from");
    sub->add_option("--w-spk", f.w_spk, "Speaker feedback weight");
    sub->add_option("--w-reg", f.w_reg, "L2 regularization weight");
    sub->add_flag("--no-dropout", f.no_dropout, "Deterministic PreNet");
  }
}

TrainConfig ResolveTrainConfig(CLI::App *sub, const TrainFlags &f, Phase phase,
                               const std::string &config_path, long seed) {
  TrainConfig cfg = config_path.empty() ? TrainConfig::Defaults(phase)
                                        : LoadTrainConfig(config_path, phase);
  auto given = [sub](const char *name) {
    const CLI::Option *o = sub->get_option_no_throw(name);
    return o && o->count() > 0;
  };
  if (given("--seed")) cfg.seed = static_cast<std::uint64_t>(seed);
  if (given("--out")) cfg.output_dir = f.out;
  if (given("--steps")) cfg.total_steps = f.steps;
  if (given("--batch-size")) cfg.batch_size = f.batch_size;
  if (given("--learning-rate")) cfg.optimizer.learning_rate = f.lr;
  if (given("--checkpoint-every")) cfg.checkpoint_every = f.checkpoint_every;
  if (given("--arch")) cfg.arch = f.arch;
  if (given("--verifier")) cfg.verifier_checkpoint = f.verifier;
  if (given("--init")) cfg.init_checkpoint = f.init;
  if (given("--w-spk")) cfg.w_spk = f.w_spk;
  if (given("--w-reg")) cfg.w_reg = f.w_reg;
  if (given("--no-dropout")) cfg.prenet_dropout = !f.no_dropout;
  cfg.Validate();
  return cfg;
}

}  // namespace

int CliMain(const std::vector<std::string> &raw_args, std::ostream &out,
            std::ostream &err) {
  CLI::App app{"Multispeaker text-to-mel lab with a speaker feedback constraint", "fctts"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  std::string config;
  long seed = 0;
  auto common = [&](CLI::App *sub) {
    sub->add_option("--config", config, "key = value config file");
    sub->add_option("--seed", seed, "Random seed");
  };
  std::function<void()> action;

  // prepare-data
  std::string layout, root, manifest_out, speakers_csv, test_csv;
  int n_test = 8, val_per = 8;
  auto *prep = app.add_subcommand("prepare-data", "Build a manifest from a corpus tree");
  common(prep);
  prep->add_option("--layout", layout, "vctk_like or librispeech_like")->required();
  prep->add_option("--root", root, "Corpus root directory")->required();
  prep->add_option("--out", manifest_out, "Output manifest path")->required();
  prep->add_option("--test-speakers", n_test, "Number of held-out test speakers");
  prep->add_option("--test-speaker-list", test_csv, "Comma-separated test speakers");
  prep->add_option("--speakers", speakers_csv, "Comma-separated speakers to keep");
  prep->add_option("--val-per-speaker", val_per, "Validation utterances per speaker");
  prep->callback([&] {
    action = [&] {
      SplitSpec spec;
      spec.n_test_speakers = n_test;
      spec.val_per_speaker = val_per;
      auto split_csv = [](const std::string &s) {
        std::vector<std::string> v;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ','))
          if (!item.empty()) v.push_back(item);
        return v;
      };
      spec.test_speakers = split_csv(test_csv);
      spec.include_speakers = split_csv(speakers_csv);
      const BuildResult r = BuildManifest(root, ParseLayout(layout), spec,
                                          static_cast<std::uint64_t>(seed));
      WriteManifest(manifest_out, r.manifest);
      for (const auto &issue : r.report.issues) err << "warning: " << issue << "\n";
      for (const auto &s : r.report.flagged_speakers)
        err << "warning: speaker " << s << " has too few utterances for the val rule\n";
      out << "entries = " << r.manifest.entries.size() << "\n"
          << "train_speakers = " << r.manifest.Speakers(Split::kTrain).size() << "\n"
          << "test_speakers = " << r.manifest.Speakers(Split::kTest).size() << "\n"
          << "issues = " << r.report.issues.size() << "\n";
    };
  });

  // make-toy
  ToyDatasetSpec toy;
  std::string toy_out;
  auto *mk = app.add_subcommand("make-toy", "Generate the synthetic toy corpus");
  common(mk);
  mk->add_option("--speakers", toy.n_speakers, "Number of speakers");
  mk->add_option("--utts", toy.utterances_per_speaker, "Utterances per speaker");
  mk->add_option("--val", toy.val_per_speaker, "Val utterances per speaker");
  mk->add_option("--out", toy_out, "Output directory")->required();
  mk->callback([&] {
    action = [&] {
      toy.seed = static_cast<std::uint64_t>(seed);
      const DatasetManifest m = MakeToyDataset(toy, toy_out);
      out << "manifest = " << (fs::path(toy_out) / "manifest.tsv").string() << "\n"
          << "utterances = " << m.entries.size() << "\n";
    };
  });

  // training commands
  TrainFlags tf;
  const std::pair<const char *, Phase> train_cmds[] = {
      {"train-verifier", Phase::kVerifier},
      {"train-baseline", Phase::kBaseline},
      {"train-fc", Phase::kFc}};
  for (const auto &[name, phase] : train_cmds) {
    auto *sub = app.add_subcommand(name, std::string("Train (") + PhaseName(phase) + ")");
    common(sub);
    AddTrainFlags(sub, tf, phase != Phase::kVerifier);
    const Phase ph = phase;
    sub->callback([&, sub, ph] {
      action = [&, sub, ph] {
        const TrainConfig cfg = ResolveTrainConfig(sub, tf, ph, config, seed);
        const DatasetManifest m = ReadManifest(tf.manifest);
        if (ph == Phase::kVerifier) {
          const auto s = RunVerifierTraining(m, cfg);
          out << "checkpoint = " << s.final_checkpoint << "\n";
          if (!s.history.empty())
            out << "final_loss = " << s.history.back().loss << "\n"
                << "final_accuracy = " << s.history.back().accuracy << "\n";
        } else {
          const auto s = RunTraining(m, cfg);
          out << "checkpoint = " << s.final_checkpoint << "\n"
              << "steps = " << s.first_step << ".." << s.last_step << "\n";
          if (!s.history.empty())
            out << "final_total = " << s.history.back().total << "\n";
        }
      };
    });
  }

  // synthesize
  std::string sys_path, ver_path, text, ref_wav, out_mel, out_wav;
  int gl_iters = 60, max_steps = 0;
  bool no_dropout = false;
  auto *syn = app.add_subcommand("synthesize", "Synthesize a mel (and optional WAV)");
  common(syn);
  syn->add_option("--system", sys_path, "Synthesizer checkpoint")->required();
  syn->add_option("--verifier", ver_path, "Verifier checkpoint")->required();
  syn->add_option("--text", text, "Input text")->required();
  syn->add_option("--ref-wav", ref_wav, "Reference utterance for the voice")->required();
  syn->add_option("--out-mel", out_mel, "Output MELS file")->required();
  syn->add_option("--out-wav", out_wav, "Griffin-Lim WAV output");
  syn->add_option("--gl-iters", gl_iters, "Griffin-Lim iterations");
  syn->add_option("--max-steps", max_steps, "Decoder step limit (0 = default)");
  syn->add_flag("--no-dropout", no_dropout, "Deterministic PreNet");
  syn->callback([&] {
    action = [&] {
      const VerifierModel verifier = VerifierModel::FromCheckpoint(LoadCheckpoint(ver_path));
      const SynthesizerModel synth = SynthesizerModel::FromCheckpoint(LoadCheckpoint(sys_path));
      const TextSequence seq = TextToIds(text);
      if (seq.unknown_count > 0)
        err << "warning: dropped " << seq.unknown_count << " unknown characters\n";
      SynthesisLimits limits;
      limits.max_steps = max_steps;
      DecodeOptions dec{!no_dropout, static_cast<std::uint64_t>(seed)};
      const SynthesisOutput o =
          Synthesize(seq, EmbeddingFromWav(ref_wav, verifier), synth, limits, dec);
      WriteMelFile(out_mel, o.mel_post);
      out << "frames = " << o.num_frames() << "\n"
          << "stopped_naturally = " << (o.stopped_naturally ? "true" : "false") << "\n";
      if (!out_wav.empty()) {
        MelConfig cfg;
        if (o.num_frames() < 1) throw InvalidInputError("no frames to invert");
        const GriffinLimResult gl = GriffinLimInvert(
            MelSpectrogram{o.mel_post, cfg}, gl_iters, static_cast<std::uint64_t>(seed));
        WriteWav(out_wav, gl.clip);
        out << "wav = " << out_wav << "\n";
      }
    };
  });

  // evaluate
  std::string eval_manifest, protocol = "dep", split = "auto", report_out,
                             system_name, set_name;
  int n_trials = 1000;
  auto *ev = app.add_subcommand("evaluate", "SV-EER and average cosine of a system");
  common(ev);
  ev->add_option("--system", sys_path, "Synthesizer checkpoint")->required();
  ev->add_option("--verifier", ver_path, "Verifier checkpoint")->required();
  ev->add_option("--manifest", eval_manifest, "Dataset manifest")->required();
  ev->add_option("--protocol", protocol, "dep or indep");
  ev->add_option("--split", split, "Split to evaluate (auto = test, else val)");
  ev->add_option("--n-trials", n_trials, "Number of trials (even)");
  ev->add_option("--name", system_name, "System label in the table row");
  ev->add_option("--set-name", set_name, "Set label in the table row");
  ev->add_option("--out", report_out, "Write the report here as well");
  ev->add_option("--max-steps", max_steps, "Decoder step limit (0 = default)");
  ev->add_flag("--no-dropout", no_dropout, "Deterministic PreNet");
  ev->callback([&] {
    action = [&] {
      const VerifierModel verifier = VerifierModel::FromCheckpoint(LoadCheckpoint(ver_path));
      const SynthesizerModel synth = SynthesizerModel::FromCheckpoint(LoadCheckpoint(sys_path));
      const DatasetManifest m = SelectSplit(ReadManifest(eval_manifest), split);
      const EmbeddingTable natural = NaturalEmbeddings(m, verifier);
      EvalSynthesisOptions opts;
      opts.limits.max_steps = max_steps;
      opts.prenet_dropout = !no_dropout;
      const auto s = static_cast<std::uint64_t>(seed);
      const EvalSet set = SynthesizeEvalSet(m, synth, verifier, natural,
                                            ParseProtocol(protocol), s, opts);
      const EvalReport rep = Evaluate(set, natural, m, n_trials, s);
      const EvalReport nat = EvaluateNatural(natural, m, n_trials, s);
      std::ostringstream text_out;
      text_out << rep.ToKeyValueText() << "natural_eer_percent = " << nat.eer_percent
               << "\n"
               << "skipped_speakers = " << set.skipped_speakers << "\n"
               << EvalReport::TableHeader() << "\n"
               << rep.TableRow(system_name.empty() ? fs::path(sys_path).stem().string()
                                                   : system_name,
                               set_name.empty() ? "eval" : set_name)
               << "\n";
      out << text_out.str();
      if (!report_out.empty()) {
        std::ofstream f(report_out);
        if (!f) throw IoError("cannot write report " + report_out);
        f << text_out.str();
      }
    };
  });

  // export-embeddings
  std::string emb_out, pca_out;
  auto *ex = app.add_subcommand("export-embeddings", "Dump embeddings (+ PCA) for plotting");
  common(ex);
  ex->add_option("--verifier", ver_path, "Verifier checkpoint")->required();
  ex->add_option("--manifest", eval_manifest, "Dataset manifest")->required();
  ex->add_option("--split", split, "Split to export (auto = test, else val)");
  ex->add_option("--system", sys_path, "Also export synthesized (dep) embeddings");
  ex->add_option("--out", emb_out, "Output TSV")->required();
  ex->add_option("--pca", pca_out, "Output TSV of 2-D PCA coordinates");
  ex->add_flag("--no-dropout", no_dropout, "Deterministic PreNet");
  ex->callback([&] {
    action = [&] {
      const VerifierModel verifier = VerifierModel::FromCheckpoint(LoadCheckpoint(ver_path));
      const DatasetManifest m = SelectSplit(ReadManifest(eval_manifest), split);
      const EmbeddingTable natural = NaturalEmbeddings(m, verifier);
      std::vector<EmbeddingRow> rows;
      for (const auto &e : m.entries)
        rows.push_back({e.utt_id, e.speaker_id, "natural", natural.at(e.utt_id).values});
      if (!sys_path.empty()) {
        const SynthesizerModel synth =
            SynthesizerModel::FromCheckpoint(LoadCheckpoint(sys_path));
        EvalSynthesisOptions opts;
        opts.prenet_dropout = !no_dropout;
        const EvalSet set = SynthesizeEvalSet(m, synth, verifier, natural, Protocol::kDep,
                                              static_cast<std::uint64_t>(seed), opts);
        for (const auto &r : set.records)
          rows.push_back({r.utt_id, r.speaker_id, "synthesized", r.synthesized.values});
      }
      ExportEmbeddings(emb_out, rows);
      out << "rows = " << rows.size() << "\n";
      if (!pca_out.empty()) {
        Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), rows.front().values.size());
        for (std::size_t i = 0; i < rows.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = rows[i].values;
        const Projection2d p = Project2d(x);
        std::ofstream f(pca_out);
        if (!f) throw IoError("cannot write " + pca_out);
        f << "utt_id\tspeaker_id\ttag\tpc1\tpc2\n";
        for (std::size_t i = 0; i < rows.size(); ++i)
          f << rows[i].utt_id << '\t' << rows[i].speaker_id << '\t' << rows[i].tag << '\t'
            << p.coords(static_cast<Eigen::Index>(i), 0) << '\t'
            << p.coords(static_cast<Eigen::Index>(i), 1) << '\n';
        out << "pca = " << pca_out << "\n";
      }
    };
  });

  try {
    std::vector<std::string> args = raw_args;
    if (!args.empty() && !kTrainCommands.count(args.front())) {
      CLI::App *sub = nullptr;
      try {
        sub = app.get_subcommand(args.front());
      } catch (const CLI::OptionNotFound &) {
      }
      if (sub) args = InjectConfig(args, *sub);
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError &e) {
    err << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const Error &e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  }

  try {
    if (action) action();
    return 0;
  } catch (const Error &e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
  } catch (const nlohmann::json::exception &e) {
    err << "error: io: malformed checkpoint metadata: " << e.what() << "\n";
  } catch (const std::exception &e) {
    err << "error: internal: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace fctts
