/*
 Copyright 2026 The regimes Authors.
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "regimes/core.hpp"
#include "regimes/gaussian_hmm.hpp"
#include "regimes/metrics.hpp"
#include "regimes/sticky_hdphmm.hpp"

namespace regimes::io {

inline constexpr int kFormatVersion = 1;

enum class SeriesFormat { Csv, Json };

// Guess from the extension: .json -> Json, anything else -> Csv.
SeriesFormat format_for(const std::filesystem::path& path);
std::optional<SeriesFormat> parse_format(std::string_view name);

// CSV: header `t,v_txt,a_txt[,v_aud,a_aud][,v_vid,a_vid]`, t contiguous from 0.
ConversationSeries parse_series_csv(std::string_view text, std::string id);
// JSON: [{"t": 0, "txt": [v, a], "aud": [v, a]}, ...]
ConversationSeries parse_series_json(std::string_view text, std::string id);
// The series id is the file stem.
ConversationSeries read_series(const std::filesystem::path& path,
                               std::optional<SeriesFormat> format = std::nullopt);

std::string format_series_csv(const ConversationSeries& series);
std::string format_series_json(const ConversationSeries& series);
void write_series(const ConversationSeries& series, const std::filesystem::path& path,
                  std::optional<SeriesFormat> format = std::nullopt);

// CSV `t,label[,name]`. Integer labels are re-indexed densely in ascending
// order; anything else is interned by first appearance.
LabelSequence parse_labels_csv(std::string_view text);
LabelSequence read_labels(const std::filesystem::path& path);
std::string format_labels_csv(const LabelSequence& labels);
void write_labels(const LabelSequence& labels, const std::filesystem::path& path);

using FittedModel = std::variant<HmmModel, StickyPosterior>;

std::string model_to_json(const HmmModel& model);
std::string model_to_json(const StickyPosterior& posterior, bool include_samples = false);
FittedModel model_from_json(std::string_view text);
void write_model(const FittedModel& model, const std::filesystem::path& path,
                 bool include_samples = false);
FittedModel read_model(const std::filesystem::path& path);

std::string report_to_json(const MetricReport& report);
MetricReport report_from_json(std::string_view text);

enum class StandardizationScope { PerConversation, Corpus };

struct ManifestEntry {
  std::string id;
  std::filesystem::path series;
  std::optional<std::filesystem::path> labels;
};

struct CorpusManifest {
  std::vector<ManifestEntry> conversations;
  StandardizationScope scope = StandardizationScope::PerConversation;
};

// JSON: {"standardization": "per_conversation"|"corpus",
//        "conversations": [{"id": ..., "series": ..., "labels": ...}]}
// Relative paths resolve against the manifest's directory.
CorpusManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir);
CorpusManifest read_manifest(const std::filesystem::path& path);
std::string format_manifest(const CorpusManifest& manifest);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace regimes::io
