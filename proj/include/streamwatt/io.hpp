// Copyright 2026 The streamwatt Authors
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

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "streamwatt/policy.hpp"
#include "streamwatt/session.hpp"

namespace streamwatt {

/// Formats for tabular artifacts. CSV carries the config echo in a leading
/// `# config {...}` comment; JSONL carries it as a leading single-key
/// `{"config": {...}}` line. Both parsers skip those lines.
enum class TableFormat { kCsv, kJsonl };

TableFormat table_format_from_name(const std::string& name);
/// Decides by extension (.csv / .jsonl / .ndjson), falling back to content
/// sniffing (a leading '{' means JSONL).
TableFormat sniff_table_format(const std::filesystem::path& path);

/// One row that failed validation. `line` is 1-based over the raw file.
struct RowRejection {
  std::size_t line = 0;
  std::string field;
  std::string reason;
};

/// A parsed raw dataset. `external_mos` runs parallel to `sessions` and
/// holds the optional measured-MOS column.
struct Dataset {
  std::vector<Session> sessions;
  std::vector<std::optional<double>> external_mos;
  std::vector<RowRejection> rejections;
};

/// Reads a raw session table. Invalid rows become rejections and never
/// abort the batch; zero valid rows is EmptyDataset. Bitrate converts
/// kbps -> bps here. Throws UnreadableFile, MalformedHeader, EmptyDataset.
Dataset parse_sessions(const std::filesystem::path& path, TableFormat format);
Dataset parse_sessions(const std::filesystem::path& path);

/// A parsed pre-scored table; rows carry no raw features (session == null).
struct ScoredTable {
  std::vector<ScoredSession> rows;
  std::vector<RowRejection> rejections;
};

ScoredTable parse_scored(const std::filesystem::path& path,
                         TableFormat format);
ScoredTable parse_scored(const std::filesystem::path& path);

enum class InputKind { kRawDataset, kScoredTable };

/// Distinguishes raw datasets from scored tables by header or keys.
InputKind sniff_input_kind(const std::filesystem::path& path);

/// Per-session analysis flags for the annotated export.
struct SessionFlags {
  bool kept = false;
  bool efficient = false;
};

// Writers. All numbers are serialized in shortest round-trip decimal, a
// non-finite value anywhere is refused (Validation), and a failed write is
// UnwritablePath. `config_echo` is embedded into every artifact.

void write_dataset(const std::filesystem::path& path,
                   std::span<const Session> sessions,
                   std::span<const std::optional<double>> external_mos,
                   TableFormat format, const nlohmann::json& config_echo);

void write_scored(const std::filesystem::path& path,
                  std::span<const ScoredSession> scored, TableFormat format,
                  const nlohmann::json& config_echo);

void write_annotated(const std::filesystem::path& path,
                     std::span<const ScoredSession> scored,
                     std::span<const SessionFlags> flags, TableFormat format,
                     const nlohmann::json& config_echo);

/// Efficient points only, groups in key order, ascending MOS inside each.
void write_fronts(const std::filesystem::path& path, const FrontMap& fronts,
                  TableFormat format, const nlohmann::json& config_echo);

void write_sweep(const std::filesystem::path& path,
                 std::span<const CapSweepRow> rows, TableFormat format,
                 const nlohmann::json& config_echo);

void write_per_session(const std::filesystem::path& path,
                       std::span<const PerSessionDelta> deltas,
                       TableFormat format, const nlohmann::json& config_echo);

enum class ReportFormat { kJson, kCsv };

/// JSON reports carry every SavingsReport field including per-session
/// deltas; the CSV form flattens aggregate plus breakdown rows and drops
/// per-session deltas (write_per_session covers those).
void write_report(const std::filesystem::path& path,
                  std::span<const SavingsReport> reports, ReportFormat format,
                  const nlohmann::json& config_echo);

/// Round-trip readers for report documents.
struct ReportDocument {
  nlohmann::json config;
  std::vector<SavingsReport> reports;
};

ReportDocument read_report_json(const std::filesystem::path& path);
ReportDocument read_report_csv(const std::filesystem::path& path);

}  // namespace streamwatt
