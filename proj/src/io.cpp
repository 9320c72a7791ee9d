/* Copyright 2026 The imbcal Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <utility>

#include "error.hpp"

namespace imbcal {
namespace {

std::uint8_t* put_u32(std::uint8_t* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) *out++ = static_cast<std::uint8_t>(v >> (8 * i));
  return out;
}

std::uint8_t* put_u64(std::uint8_t* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) *out++ = static_cast<std::uint8_t>(v >> (8 * i));
  return out;
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view token) {
  token = trim(token);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ValidationError("not a number: '" + std::string(token) + "'");
  }
  return v;
}

// Splits on newlines, dropping blank lines and '#' comments.
std::vector<std::string_view> content_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

void validate_content(const PredictionFile& file) {
  if (file.content == Content::kProbs) {
    PosteriorMatrix check(file.values);
  } else {
    LogitMatrix check(file.values);
  }
}

}  // namespace

const char* to_string(Content content) {
  return content == Content::kLogits ? "logits" : "probs";
}

Content content_from_string(const std::string& name) {
  if (name == "logits") return Content::kLogits;
  if (name == "probs") return Content::kProbs;
  throw ValidationError("unknown content '" + name + "' (expected logits or probs)");
}

std::vector<std::uint8_t> encode_binary(const PredictionFile& file) {
  std::vector<std::uint8_t> out(kPredictionHeaderSize + 8 * file.values.values().size());
  std::uint8_t* p = out.data();
  std::memcpy(p, kPredictionMagic, sizeof(kPredictionMagic));
  p += sizeof(kPredictionMagic);
  p = put_u32(p, kPredictionVersion);
  p = put_u32(p, kDtypeFloat64);
  p = put_u32(p, static_cast<std::uint32_t>(file.content));
  p = put_u32(p, 0);
  p = put_u64(p, file.values.rows());
  p = put_u64(p, file.values.cols());
  for (double v : file.values.values()) p = put_u64(p, std::bit_cast<std::uint64_t>(v));
  return out;
}

PredictionFile decode_binary(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kPredictionHeaderSize) throw IoError("prediction file: truncated header");
  if (std::memcmp(bytes.data(), kPredictionMagic, sizeof(kPredictionMagic)) != 0) {
    throw IoError("prediction file: bad magic");
  }
  const std::uint8_t* p = bytes.data();
  if (get_u32(p + 8) != kPredictionVersion) throw IoError("prediction file: unsupported version");
  if (get_u32(p + 12) != kDtypeFloat64) throw IoError("prediction file: unsupported dtype");
  const std::uint32_t content = get_u32(p + 16);
  if (content > 1) throw IoError("prediction file: unknown content tag");
  const std::uint64_t rows = get_u64(p + 24);
  const std::uint64_t cols = get_u64(p + 32);
  if (cols != 0 && rows > (bytes.size() - kPredictionHeaderSize) / 8 / cols) {
    throw IoError("prediction file: declared shape exceeds payload");
  }
  if (bytes.size() != kPredictionHeaderSize + 8 * rows * cols) {
    throw IoError("prediction file: payload size does not match declared N*K");
  }
  std::vector<double> values(rows * cols);
  const std::uint8_t* payload = p + kPredictionHeaderSize;
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<double>(get_u64(payload + 8 * i));
  }
  PredictionFile file{static_cast<Content>(content),
                      Matrix(rows, cols, std::move(values))};
  validate_content(file);
  return file;
}

std::string encode_csv(const Matrix& values) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t r = 0; r < values.rows(); ++r) {
    auto row = values.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      os << row[c];
    }
    os << '\n';
  }
  return os.str();
}

Matrix decode_csv(std::string_view text) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  for (auto line : content_lines(text)) {
    std::size_t n = 0;
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      values.push_back(parse_real(line.substr(start, comma - start)));
      ++n;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) cols = n;
    if (n != cols) {
      throw ValidationError("csv: row " + std::to_string(rows) + " has " + std::to_string(n) +
                            " fields, expected " + std::to_string(cols));
    }
    ++rows;
  }
  return Matrix(rows, cols, std::move(values));
}

void save_predictions(const std::filesystem::path& path, const PredictionFile& file) {
  if (path.extension() == ".csv") {
    write_file(path, encode_csv(file.values));
    return;
  }
  auto bytes = encode_binary(file);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

PredictionFile load_predictions(const std::filesystem::path& path, Content csv_content) {
  if (path.extension() == ".csv") {
    PredictionFile file{csv_content, decode_csv(read_file(path))};
    validate_content(file);
    return file;
  }
  return decode_binary(read_bytes(path));
}

LabelVector load_labels(const std::filesystem::path& path, std::size_t n_classes) {
  std::vector<std::uint32_t> labels;
  const std::string text = read_file(path);
  for (auto line : content_lines(text)) {
    std::uint32_t y = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), y);
    if (ec != std::errc() || ptr != line.data() + line.size()) {
      throw ValidationError("labels: not a class index: '" + std::string(line) + "'");
    }
    labels.push_back(y);
  }
  return LabelVector(std::move(labels), n_classes);
}

void save_labels(const std::filesystem::path& path, const LabelVector& labels) {
  std::ostringstream os;
  for (auto y : labels.values()) os << y << '\n';
  write_file(path, os.str());
}

PriorVector load_prior(const std::string& path_or_keyword, std::size_t n_classes,
                       PriorRole role) {
  if (path_or_keyword == "uniform") return PriorVector::uniform(n_classes, role);
  const std::string text = read_file(path_or_keyword);
  auto lines = content_lines(text);
  if (lines.size() == 1 && lines[0] == "uniform") return PriorVector::uniform(n_classes, role);
  std::vector<double> values;
  for (auto line : lines) values.push_back(parse_real(line));
  if (values.size() != n_classes) {
    throw ValidationError("prior file " + path_or_keyword + " has " +
                          std::to_string(values.size()) + " entries, expected " +
                          std::to_string(n_classes));
  }
  return PriorVector(std::move(values), role);
}

std::vector<double> load_column(const std::filesystem::path& path) {
  std::vector<double> values;
  const std::string text = read_file(path);
  for (auto line : content_lines(text)) values.push_back(parse_real(line));
  return values;
}

std::map<std::string, std::string> parse_key_value(std::string_view text) {
  std::map<std::string, std::string> out;
  for (auto line : content_lines(text)) {
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("config: expected 'key = value', got '" + std::string(line) + "'");
    }
    auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ValidationError("config: empty key");
    out[std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

std::map<std::string, std::string> load_key_value(const std::filesystem::path& path) {
  return parse_key_value(read_file(path));
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    auto comma = text.find(',', start);
    out.push_back(parse_real(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace imbcal
