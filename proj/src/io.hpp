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
#ifndef IMBCAL_IO_HPP_
#define IMBCAL_IO_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"

namespace imbcal {

// Binary prediction file layout (all integers little-endian):
//
//   offset  size  field
//        0     8  magic "IMBCALPF"
//        8     4  version (1)
//       12     4  dtype (1 = float64)
//       16     4  content (0 = logits, 1 = probs)
//       20     4  reserved (0)
//       24     8  rows N
//       32     8  cols K
//       40  8*NK  row-major float64 payload
inline constexpr char kPredictionMagic[8] = {'I', 'M', 'B', 'C', 'A', 'L', 'P', 'F'};
inline constexpr std::uint32_t kPredictionVersion = 1;
inline constexpr std::uint32_t kDtypeFloat64 = 1;
inline constexpr std::size_t kPredictionHeaderSize = 40;

enum class Content : std::uint32_t { kLogits = 0, kProbs = 1 };

const char* to_string(Content content);
Content content_from_string(const std::string& name);

struct PredictionFile {
  Content content = Content::kProbs;
  Matrix values;
};

std::vector<std::uint8_t> encode_binary(const PredictionFile& file);
// Validates the header and payload size; probs must be row-stochastic.
PredictionFile decode_binary(std::span<const std::uint8_t> bytes);

// One row per sample, comma separated, 17 significant digits.
std::string encode_csv(const Matrix& values);
Matrix decode_csv(std::string_view text);

// Paths ending in ".csv" use the CSV form, anything else the binary form.
// CSV carries no header, so `csv_content` says what it holds.
void save_predictions(const std::filesystem::path& path, const PredictionFile& file);
PredictionFile load_predictions(const std::filesystem::path& path,
                                Content csv_content = Content::kProbs);

// Labels: one integer class index per line.
LabelVector load_labels(const std::filesystem::path& path, std::size_t n_classes);
void save_labels(const std::filesystem::path& path, const LabelVector& labels);

// Priors: one probability per line, K lines; the keyword "uniform" (either
// as the argument itself or as the file content) yields 1/K everywhere.
PriorVector load_prior(const std::string& path_or_keyword, std::size_t n_classes,
                       PriorRole role);

// One real value per line.
std::vector<double> load_column(const std::filesystem::path& path);

// "key = value" lines; '#' starts a comment; blank lines ignored.
std::map<std::string, std::string> parse_key_value(std::string_view text);
std::map<std::string, std::string> load_key_value(const std::filesystem::path& path);
// Comma-separated reals.
std::vector<double> parse_real_list(std::string_view text);

std::string read_file(const std::filesystem::path& path);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace imbcal

#endif  // IMBCAL_IO_HPP_
