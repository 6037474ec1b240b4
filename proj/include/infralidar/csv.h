// Copyright 2026 The Infralidar Authors
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

/// \file
/// \brief Minimal CSV plumbing shared by every artifact format.
///
/// Numbers are written in shortest round-trip form so that re-reading a file
/// reproduces the in-memory doubles bit for bit.

#ifndef INFRALIDAR_CSV_H_
#define INFRALIDAR_CSV_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace infralidar {

/// File system or format failure. Messages carry `file:line` when known.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void AppendDouble(std::string* out, double v);
void AppendInt(std::string* out, std::int64_t v);

/// Builds one CSV row at a time into an in-memory buffer.
class CsvWriter {
 public:
  explicit CsvWriter(std::string_view header);

  CsvWriter& Field(double v);
  CsvWriter& Field(std::int64_t v);
  CsvWriter& Field(int v) { return Field(static_cast<std::int64_t>(v)); }
  CsvWriter& Field(std::uint32_t v) {
    return Field(static_cast<std::int64_t>(v));
  }
  CsvWriter& Field(std::string_view v);
  void EndRow();

  const std::string& buffer() const { return buffer_; }
  /// Writes the buffer, creating parent directories. Throws IoError.
  void Save(const std::filesystem::path& path) const;

 private:
  std::string buffer_;
  bool row_started_ = false;
};

/// Reads a header + rows file and checks the header verbatim.
class CsvReader {
 public:
  CsvReader(const std::filesystem::path& path, std::string_view header);

  /// Advances to the next non-empty row. Returns false at end of file.
  bool Next();

  std::size_t num_fields() const { return fields_.size(); }
  double Double(std::size_t i) const;
  std::int64_t Int(std::size_t i) const;
  std::string_view Text(std::size_t i) const;
  /// Throws IoError unless the current row has exactly `n` fields.
  void ExpectFields(std::size_t n) const;
  [[noreturn]] void Fail(const std::string& message) const;

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::string line_;
  std::vector<std::string_view> fields_;
  std::size_t line_number_ = 0;
};

/// Whole-file helpers.
std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view content);

}  // namespace infralidar

#endif  // INFRALIDAR_CSV_H_
