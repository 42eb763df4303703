// include/fctts/cli.h

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

#ifndef FCTTS_CLI_H_
#define FCTTS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace fctts {

/// Entry point of the `fctts` command. `args` excludes the program name.
/// Returns 0 on success, 2 on usage errors and 1 on any other failure, in
/// which case one line "error: <kind>: <message>" is written to `err`.
int CliMain(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err);

}  // namespace fctts

#endif  // FCTTS_CLI_H_
