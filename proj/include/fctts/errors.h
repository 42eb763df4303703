// include/fctts/errors.h

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

#ifndef FCTTS_ERRORS_H_
#define FCTTS_ERRORS_H_

#include <stdexcept>
#include <string>

namespace fctts {

/// Base class for every error thrown by the library. `kind()` is a short
/// stable token used by the CLI's machine-parsable error line.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string &what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string &kind() const { return kind_; }

 private:
  std::string kind_;
};

class InvalidInputError : public Error {
 public:
  explicit InvalidInputError(const std::string &what)
      : Error("invalid-input", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string &what) : Error("config", what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string &what) : Error("numerical", what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string &what) : Error("io", what) {}
};

/// Raised when a training loss becomes non-finite.
class DivergenceError : public Error {
 public:
  DivergenceError(long step, const std::string &term)
      : Error("divergence", "non-finite " + term + " at step " +
                                std::to_string(step)),
        step_(step),
        term_(term) {}
  long step() const { return step_; }
  const std::string &term() const { return term_; }

 private:
  long step_;
  std::string term_;
};

}  // namespace fctts

#endif  // FCTTS_ERRORS_H_
