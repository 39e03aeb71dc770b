// Copyright 2026 The Forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FORGE_CSV_HPP_
#define FORGE_CSV_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace forge::csv {

using Row = std::vector<std::string>;

/// RFC 4180: fields containing a comma, quote, CR or LF are quoted and
/// embedded quotes doubled.
std::string escape(std::string_view field);

/// Joins a row and terminates it with CRLF.
std::string format_row(const Row& row);

/// Parses a whole document. Accepts CRLF or LF line ends, a leading UTF-8
/// BOM and a missing final line break. Throws FormatError on an
/// unterminated quoted field or stray quote.
std::vector<Row> parse(std::string_view text);

}  // namespace forge::csv

#endif  // FORGE_CSV_HPP_
