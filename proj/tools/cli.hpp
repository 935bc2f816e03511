// SPDX-License-Identifier: Apache-2.0
//
// cabinlifi: reading-light LiFi channel and DCO-OFDM link simulator
// Copyright (C) 2026 The cabinlifi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CABINLIFI_TOOLS_CLI_HPP
#define CABINLIFI_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace cabinlifi::cli
{

enum ExitCode
{
    kOk = 0,
    kConfigError = 2,
    kRuntimeError = 3
};

// Runs one command line (args excludes the program name). Diagnostics go to
// `err`, summaries to `out`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

//! Log-linear interpolation of the axis value where the curve first drops
//! below `target`. NaN when it never does.
double crossing_db(const std::vector<double> &snr_db, const std::vector<double> &ber, double target);

} // namespace cabinlifi::cli

#endif
