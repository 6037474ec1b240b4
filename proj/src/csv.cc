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

#include "infralidar/csv.h"

#include <charconv>
#include <sstream>

namespace infralidar {

void AppendDouble(std::string* out, double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out->append(buf, res.ptr);
}

void AppendInt(std::string* out, std::int64_t v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out->append(buf, res.ptr);
}

CsvWriter::CsvWriter(std::string_view header) {
  buffer_.append(header);
  buffer_.push_back('\n');
}

CsvWriter& CsvWriter::Field(double v) {
  if (row_started_) buffer_.push_back(',');
  AppendDouble(&buffer_, v);
  row_started_ = true;
  return *this;
}

CsvWriter& CsvWriter::Field(std::int64_t v) {
  if (row_started_) buffer_.push_back(',');
  AppendInt(&buffer_, v);
  row_started_ = true;
  return *this;
}

CsvWriter& CsvWriter::Field(std::string_view v) {
  if (row_started_) buffer_.push_back(',');
  buffer_.append(v);
  row_started_ = true;
  return *this;
}

void CsvWriter::EndRow() {
  buffer_.push_back('\n');
  row_started_ = false;
}

void CsvWriter::Save(const std::filesystem::path& path) const {
  WriteFile(path, buffer_);
}

CsvReader::CsvReader(const std::filesystem::path& path,
                     std::string_view header)
    : path_(path), in_(path) {
  if (!in_) throw IoError(path.string() + ": cannot open for reading");
  if (!std::getline(in_, line_)) {
    throw IoError(path.string() + ":1: missing header");
  }
  line_number_ = 1;
  if (!line_.empty() && line_.back() == '\r') line_.pop_back();
  if (line_ != header) {
    throw IoError(path.string() + ":1: expected header '" +
                  std::string(header) + "', found '" + line_ + "'");
  }
}

bool CsvReader::Next() {
  while (std::getline(in_, line_)) {
    ++line_number_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    if (line_.empty()) continue;
    fields_.clear();
    std::string_view rest(line_);
    while (true) {
      const auto comma = rest.find(',');
      fields_.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return true;
  }
  return false;
}

void CsvReader::Fail(const std::string& message) const {
  throw IoError(path_.string() + ":" + std::to_string(line_number_) + ": " +
                message);
}

void CsvReader::ExpectFields(std::size_t n) const {
  if (fields_.size() != n) {
    Fail("expected " + std::to_string(n) + " fields, found " +
         std::to_string(fields_.size()));
  }
}

double CsvReader::Double(std::size_t i) const {
  if (i >= fields_.size()) Fail("missing field " + std::to_string(i));
  const std::string_view f = fields_[i];
  double v = 0.0;
  const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
  if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
    Fail("field " + std::to_string(i) + " is not a number: '" +
         std::string(f) + "'");
  }
  return v;
}

std::int64_t CsvReader::Int(std::size_t i) const {
  if (i >= fields_.size()) Fail("missing field " + std::to_string(i));
  const std::string_view f = fields_[i];
  std::int64_t v = 0;
  const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
  if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
    Fail("field " + std::to_string(i) + " is not an integer: '" +
         std::string(f) + "'");
  }
  return v;
}

std::string_view CsvReader::Text(std::size_t i) const {
  if (i >= fields_.size()) Fail("missing field " + std::to_string(i));
  return fields_[i];
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError(path.parent_path().string() + ": " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError(path.string() + ": write failed");
}

}  // namespace infralidar
