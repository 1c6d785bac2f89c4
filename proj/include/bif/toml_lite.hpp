// Copyright 2026 The bifscan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Parser for the TOML subset used by model files: comments, [table] and
// [[array.of.tables]] headers, bare / quoted / dotted keys, basic and
// literal strings, integers, floats (including inf and nan), booleans,
// multi-line arrays and inline tables. Dates and multi-line strings are not
// supported. The document is returned as a JSON value tree.

#pragma once

#include "bif/error.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace bif::toml {

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

nlohmann::json parse(std::string_view text);

/// Throws Error when the file cannot be read.
nlohmann::json parse_file(const std::string& path);

}  // namespace bif::toml
