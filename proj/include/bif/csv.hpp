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

// CSV output: comma separated, header row, LF line endings, floats with 17
// significant digits. Files are written to a temporary sibling and renamed,
// so a failed run never leaves a partial file behind.

#pragma once

#include <string>
#include <vector>

namespace bif {

/// "%.17g"; non-finite values print as nan, inf, -inf.
std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  /// Throws InvalidArgumentError when the field count differs from the header.
  void row(const std::vector<std::string>& fields);
  const std::string& str() const { return text_; }
  std::size_t rows() const { return rows_; }

 private:
  void append(const std::vector<std::string>& fields);

  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string text_;
};

/// Throws IoError.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace bif
