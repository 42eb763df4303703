// tests/fixtures.h

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

#ifndef FCTTS_TESTS_FIXTURES_H_
#define FCTTS_TESTS_FIXTURES_H_

#include <random>

#include <Eigen/Dense>

#include "fctts/synth/synthesizer.h"
#include "fctts/verifier/speaker_encoder.h"

namespace testutil {

// Miniature verifier: one stage of 2 channels over 6 mel bins, d = 4.
inline fctts::VerifierArch MiniVerifierArch() {
  fctts::VerifierArch a;
  a.n_mels = 6;
  a.widths = {2};
  a.blocks = {1};
  a.kernel = 3;
  a.hidden = 4;
  a.n_speakers = 3;
  a.crop_frames = 4;
  return a;
}

// Miniature synthesizer: vocab 5, e = 8, d = 4, 6 mel bins.
inline fctts::SynthArch MiniSynthArch() {
  fctts::SynthArch a;
  a.vocab_size = 5;
  a.char_dim = 4;
  a.enc_convs = 1;
  a.enc_kernel = 3;
  a.enc_width = 8;
  a.spk_dim = 4;
  a.n_mels = 6;
  a.prenet_dim = 4;
  a.prenet_layers = 2;
  a.attn_dim = 4;
  a.loc_filters = 2;
  a.loc_kernel = 3;
  a.decoder_dim = 6;
  a.postnet_layers = 2;
  a.postnet_width = 4;
  a.postnet_kernel = 3;
  a.go_value = -2.0;
  return a;
}

inline Eigen::MatrixXd RandomMatrix(Eigen::Index r, Eigen::Index c, std::mt19937_64 &rng,
                                    double mean = 0.0, double stddev = 1.0) {
  std::normal_distribution<double> n(mean, stddev);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

}  // namespace testutil

#endif  // FCTTS_TESTS_FIXTURES_H_
