// src/synth/text.cc

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

#include "fctts/synth/text.h"

#include <algorithm>
#include <cctype>

#include "fctts/errors.h"

namespace fctts {

const std::string &Vocabulary::Symbols() {
  static const std::string symbols =
      "abcdefghijklmnopqrstuvwxyz0123456789 ',.?!-";
  return symbols;
}

int Vocabulary::Size() { return 2 + static_cast<int>(Symbols().size()); }

int Vocabulary::IdOf(char c) {
  const auto pos = Symbols().find(c);
  return pos == std::string::npos ? -1 : 2 + static_cast<int>(pos);
}

char Vocabulary::SymbolOf(int id) {
  if (id < 2 || id >= Size()) return '\0';
  return Symbols()[static_cast<std::size_t>(id - 2)];
}

TextSequence TextToIds(const std::string &text) {
  TextSequence seq;
  seq.raw = text;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto byte = static_cast<unsigned char>(text[i]);
    if (byte >= 0x80) {
      // Count a multi-byte code point once, at its lead byte.
      if (byte >= 0xC0) ++seq.unknown_count;
      continue;
    }
    const int id = Vocabulary::IdOf(static_cast<char>(std::tolower(byte)));
    if (id < 0) {
      ++seq.unknown_count;
      continue;
    }
    seq.ids.push_back(id);
  }
  const int space = Vocabulary::IdOf(' ');
  const bool blank = std::all_of(seq.ids.begin(), seq.ids.end(),
                                 [space](int id) { return id == space; });
  if (blank)
    throw InvalidInputError("text is empty after normalization: '" + text + "'");
  seq.ids.push_back(Vocabulary::kEos);
  return seq;
}

}  // namespace fctts
