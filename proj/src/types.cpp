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

#include "cabinlifi/types.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>

namespace cabinlifi
{

double parse_number(std::string_view text)
{
    const std::string s(text);
    if (s.empty())
        throw std::invalid_argument("empty number");
    char *end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
        throw std::invalid_argument("'" + s + "' is not a number");
    if (errno == ERANGE && std::isinf(v))
        throw std::invalid_argument("'" + s + "' is out of range");
    return v;
}

std::string to_string(Band band) { return band == Band::ir ? "ir" : "vl"; }

Band band_from_string(const std::string &name)
{
    if (name == "ir" || name == "IR")
        return Band::ir;
    if (name == "vl" || name == "VL")
        return Band::vl;
    throw ConfigError("unknown band '" + name + "' (expected ir or vl)");
}

std::string to_string(CabinVariant variant) { return variant == CabinVariant::simplified ? "simplified" : "realistic"; }

CabinVariant cabin_variant_from_string(const std::string &name)
{
    if (name == "simplified")
        return CabinVariant::simplified;
    if (name == "realistic")
        return CabinVariant::realistic;
    throw ConfigError("unknown cabin variant '" + name + "' (expected simplified or realistic)");
}

} // namespace cabinlifi
