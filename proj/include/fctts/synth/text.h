// include/fctts/synth/text.h

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

#ifndef FCTTS_SYNTH_TEXT_H_
#define FCTTS_SYNTH_TEXT_H_

#include <string>
#include <vector>

namespace fctts {

/// Character inventory: PAD, EOS, then a-z, 0-9, space and ' , . ? ! -
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kEos = 1;

  static const std::string &Symbols();
  static int Size();
  /// Id of a (lowercase) character, or -1 if it is not in the inventory.
  static int IdOf(char c);
  /// Inverse of IdOf for character ids; PAD/EOS map to '\0'.
  static char SymbolOf(int id);
};

struct TextSequence {
  std::vector<int> ids;  // ends with Vocabulary::kEos
  std::string raw;
  int unknown_count = 0;
};

/// Lowercases, drops characters outside the vocabulary (counting each
/// dropped UTF-8 code point once) and appends EOS. Throws InvalidInputError
/// if nothing remains.
TextSequence TextToIds(const std::string &text);

}  // namespace fctts

#endif  // FCTTS_SYNTH_TEXT_H_
