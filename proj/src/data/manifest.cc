// src/data/manifest.cc

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

#include "fctts/data/manifest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "fctts/audio/wav.h"
#include "fctts/errors.h"

namespace fs = std::filesystem;

namespace fctts {

namespace {

const char kHeader[] = "utt_id\tspeaker_id\tsplit\taudio_path\ttranscript";

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string Trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string ReadText(const fs::path &p) {
  std::ifstream in(p);
  if (!in) throw IoError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '\t', ' ');
  return Trim(text);
}

bool AudioReadable(const fs::path &p) {
  try {
    ReadWav(p.string());
    return true;
  } catch (const Error &) {
    return false;
  }
}

struct Candidate {
  std::string utt_id, speaker_id;
  fs::path audio;
  std::string transcript;
};

std::vector<fs::path> SortedChildren(const fs::path &dir, bool dirs) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto &e : fs::directory_iterator(dir))
    if (dirs ? e.is_directory() : e.is_regular_file()) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

void ScanVctk(const fs::path &root, std::vector<Candidate> *out,
              BuildReport *report) {
  fs::path wav_root = root / "wav48";
  if (!fs::is_directory(wav_root)) wav_root = root / "wav";
  if (!fs::is_directory(wav_root))
    throw InvalidInputError("no wav48/ or wav/ directory under " + root.string());
  for (const auto &spk_dir : SortedChildren(wav_root, true)) {
    const std::string spk = spk_dir.filename().string();
    for (const auto &wav : SortedChildren(spk_dir, false)) {
      if (wav.extension() != ".wav") continue;
      const std::string utt = wav.stem().string();
      const fs::path txt = root / "txt" / spk / (utt + ".txt");
      if (!fs::exists(txt)) {
        report->issues.push_back("missing transcript: " + txt.string());
        continue;
      }
      if (!AudioReadable(wav)) {
        report->issues.push_back("unreadable audio: " + wav.string());
        continue;
      }
      std::string text = ReadText(txt);
      if (text.empty()) {
        report->issues.push_back("empty transcript: " + txt.string());
        continue;
      }
      out->push_back({utt, spk, wav, std::move(text)});
    }
  }
}

void ScanLibriSpeech(const fs::path &root, std::vector<Candidate> *out,
                     BuildReport *report) {
  for (const auto &spk_dir : SortedChildren(root, true)) {
    const std::string spk = spk_dir.filename().string();
    for (const auto &chapter : SortedChildren(spk_dir, true)) {
      std::map<std::string, std::string> texts;
      const fs::path trans =
          chapter / (spk + "-" + chapter.filename().string() + ".trans.txt");
      if (fs::exists(trans)) {
        std::ifstream in(trans);
        std::string line;
        while (std::getline(in, line)) {
          line = Trim(line);
          const auto sp = line.find(' ');
          if (line.empty() || sp == std::string::npos) continue;
          texts[line.substr(0, sp)] = Trim(line.substr(sp + 1));
        }
      }
      for (const auto &wav : SortedChildren(chapter, false)) {
        if (wav.extension() != ".wav") continue;
        const std::string utt = wav.stem().string();
        const auto it = texts.find(utt);
        if (it == texts.end() || it->second.empty()) {
          report->issues.push_back("missing transcript: " + utt + " in " +
                                   trans.string());
          continue;
        }
        if (!AudioReadable(wav)) {
          report->issues.push_back("unreadable audio: " + wav.string());
          continue;
        }
        out->push_back({utt, spk, wav, it->second});
      }
    }
  }
}

}  // namespace

std::string SplitName(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

Split ParseSplit(const std::string &name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw InvalidInputError("unknown split '" + name + "'");
}

std::vector<const ManifestEntry *> DatasetManifest::InSplit(Split s) const {
  std::vector<const ManifestEntry *> out;
  for (const auto &e : entries)
    if (e.split == s) out.push_back(&e);
  return out;
}

std::vector<std::string> DatasetManifest::Speakers(std::optional<Split> s) const {
  std::set<std::string> ids;
  for (const auto &e : entries)
    if (!s || e.split == *s) ids.insert(e.speaker_id);
  return {ids.begin(), ids.end()};
}

const ManifestEntry &DatasetManifest::Find(const std::string &utt_id) const {
  for (const auto &e : entries)
    if (e.utt_id == utt_id) return e;
  throw InvalidInputError("utterance '" + utt_id + "' not in manifest");
}

std::string DatasetManifest::AudioPath(const ManifestEntry &e) const {
  const fs::path p(e.audio_path);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (fs::path(base_dir) / p).string();
}

void DatasetManifest::Validate(bool check_audio) const {
  std::set<std::string> seen;
  for (const auto &e : entries) {
    for (const std::string *f :
         {&e.utt_id, &e.speaker_id, &e.audio_path, &e.transcript}) {
      if (f->empty()) throw InvalidInputError("empty manifest field for '" + e.utt_id + "'");
    }
    for (const std::string *f :
         {&e.utt_id, &e.speaker_id, &e.audio_path, &e.transcript}) {
      if (f->find_first_of("\t\n\r") != std::string::npos)
        throw InvalidInputError("tab or newline inside manifest field of '" +
                                e.utt_id + "'");
    }
    if (!seen.insert(e.utt_id).second)
      throw InvalidInputError("duplicate utt_id '" + e.utt_id + "'");
    if (check_audio && !fs::exists(AudioPath(e)))
      throw IoError("audio file not found: " + AudioPath(e));
  }
}

void WriteManifest(const std::string &path, const DatasetManifest &m) {
  m.Validate(false);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest " + path);
  out << kHeader << '\n';
  for (const auto &e : m.entries)
    out << e.utt_id << '\t' << e.speaker_id << '\t' << SplitName(e.split)
        << '\t' << e.audio_path << '\t' << e.transcript << '\n';
  if (!out) throw IoError("write failed for manifest " + path);
}

DatasetManifest ReadManifest(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read manifest " + path);
  DatasetManifest m;
  m.base_dir = fs::path(path).parent_path().string();
  std::string line;
  if (!std::getline(in, line) || Trim(line) != kHeader)
    throw InvalidInputError("manifest " + path + " lacks the expected header");
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = SplitTabs(line);
    if (f.size() != 5)
      throw InvalidInputError(path + ":" + std::to_string(line_no) +
                              ": expected 5 tab-separated fields");
    m.entries.push_back({f[0], f[1], ParseSplit(f[2]), f[3], f[4]});
  }
  m.Validate(false);
  return m;
}

CorpusLayout ParseLayout(const std::string &name) {
  if (name == "vctk_like") return CorpusLayout::kVctkLike;
  if (name == "librispeech_like") return CorpusLayout::kLibriSpeechLike;
  throw ConfigError("unknown corpus layout '" + name + "'");
}

BuildResult BuildManifest(const std::string &corpus_root, CorpusLayout layout,
                          const SplitSpec &spec, std::uint64_t seed) {
  const fs::path root(corpus_root);
  if (!fs::is_directory(root))
    throw InvalidInputError("corpus root " + corpus_root + " does not exist");
  if (spec.n_test_speakers < 0 || spec.val_per_speaker < 0)
    throw ConfigError("split sizes must be non-negative");

  BuildResult result;
  std::vector<Candidate> found;
  if (layout == CorpusLayout::kVctkLike)
    ScanVctk(root, &found, &result.report);
  else
    ScanLibriSpeech(root, &found, &result.report);

  std::map<std::string, std::vector<Candidate>> by_speaker;
  const std::set<std::string> include(spec.include_speakers.begin(),
                                      spec.include_speakers.end());
  for (auto &c : found)
    if (include.empty() || include.count(c.speaker_id))
      by_speaker[c.speaker_id].push_back(std::move(c));
  if (by_speaker.empty())
    throw InvalidInputError("corpus " + corpus_root + " contains no usable utterances");

  std::vector<std::string> speakers;
  for (const auto &kv : by_speaker) speakers.push_back(kv.first);

  std::mt19937_64 rng(seed);
  std::set<std::string> test;
  if (!spec.test_speakers.empty()) {
    for (const auto &s : spec.test_speakers) {
      if (!by_speaker.count(s))
        throw ConfigError("test speaker '" + s + "' not found in corpus");
      test.insert(s);
    }
  } else {
    if (spec.n_test_speakers >= static_cast<int>(speakers.size()))
      throw ConfigError("cannot hold out " + std::to_string(spec.n_test_speakers) +
                        " of " + std::to_string(speakers.size()) + " speakers");
    std::vector<std::string> shuffled = speakers;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    test.insert(shuffled.begin(), shuffled.begin() + spec.n_test_speakers);
  }

  for (const auto &spk : speakers) {
    auto utts = by_speaker[spk];
    std::vector<Split> splits(utts.size(), Split::kTrain);
    if (test.count(spk)) {
      std::fill(splits.begin(), splits.end(), Split::kTest);
    } else {
      std::vector<std::size_t> order(utts.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::shuffle(order.begin(), order.end(), rng);
      std::size_t n_val = static_cast<std::size_t>(spec.val_per_speaker);
      if (utts.size() <= n_val) {
        result.report.flagged_speakers.push_back(spk);
        n_val = utts.size() > 1 ? 1 : 0;
      }
      for (std::size_t i = 0; i < n_val; ++i) splits[order[i]] = Split::kVal;
    }
    for (std::size_t i = 0; i < utts.size(); ++i)
      result.manifest.entries.push_back({utts[i].utt_id, spk, splits[i],
                                         fs::absolute(utts[i].audio).string(),
                                         utts[i].transcript});
  }
  result.manifest.Validate(false);
  return result;
}

MelSpectrogram LoadMel(const DatasetManifest &m, const ManifestEntry &e,
                       const MelConfig &cfg) {
  AudioClip clip = ReadWav(m.AudioPath(e));
  if (clip.sample_rate_hz != cfg.sample_rate_hz)
    clip = Resample(clip, cfg.sample_rate_hz).clip;
  return ComputeMelSpectrogram(clip, cfg);
}

}  // namespace fctts
