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

#include "streamwatt/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>
#include <utility>

#include "streamwatt/numeric.hpp"

namespace streamwatt {
namespace {

using nlohmann::json;

constexpr std::string_view kConfigCommentPrefix = "# config ";

const std::vector<std::string> kDatasetColumns = {
    "id",         "device",          "codec",       "width",
    "height",     "fps",             "bitrate_kbps", "duration_s",
    "loading_delay_s", "stall_count", "stall_total_s", "online"};
constexpr std::string_view kOptionalMosColumn = "mos";

const std::vector<std::string> kScoredColumns = {
    "id", "device", "codec", "mos", "watts", "energy_joules"};

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::kUnreadableFile,
         "cannot read '" + path.string() + "'");
  }
  return in;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool is_skippable(const std::string& line) {
  return line.empty() || line.front() == '#';
}

// A leading {"config": {...}} line is the JSONL form of the config echo.
bool is_config_echo(const json& doc) {
  return doc.is_object() && doc.size() == 1 && doc.contains("config");
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out;
  out.reserve(field.size() + 2);
  out += '"';
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// RFC 4180-style splitting; returns nothing when a quote never closes.
std::optional<std::vector<std::string>> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) return std::nullopt;
  cells.push_back(std::move(cur));
  return cells;
}

std::string join_csv(std::span<const std::string> cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) line += ',';
    line += csv_escape(cells[i]);
  }
  return line;
}

/// Column-name -> cell-index map for a header line; order is free, every
/// name must be known, required names must all appear.
std::map<std::string, std::size_t> parse_header(
    const std::string& line, std::span<const std::string> required,
    std::span<const std::string_view> optional) {
  const auto cells = split_csv(line);
  if (!cells || cells->empty()) {
    fail(ErrorCode::kMalformedHeader, "unparseable header line");
  }
  std::map<std::string, std::size_t> columns;
  for (std::size_t i = 0; i < cells->size(); ++i) {
    const std::string& name = (*cells)[i];
    const bool known =
        std::find(required.begin(), required.end(), name) != required.end() ||
        std::find(optional.begin(), optional.end(), name) != optional.end();
    if (!known) {
      fail(ErrorCode::kMalformedHeader, "unknown column '" + name + "'");
    }
    if (!columns.emplace(name, i).second) {
      fail(ErrorCode::kMalformedHeader, "duplicate column '" + name + "'");
    }
  }
  for (const std::string& name : required) {
    if (!columns.count(name)) {
      fail(ErrorCode::kMalformedHeader, "missing column '" + name + "'");
    }
  }
  return columns;
}

double need_double(const std::string& cell, const std::string& field) {
  double v = 0.0;
  if (!parse_double(cell, v) || !std::isfinite(v)) {
    throw ValidationError(field, "must be a finite number, got '" + cell + "'");
  }
  return v;
}

int need_int(const std::string& cell, const std::string& field) {
  long long v = 0;
  if (!parse_i64(cell, v) || v < std::numeric_limits<int>::min() ||
      v > std::numeric_limits<int>::max()) {
    throw ValidationError(field, "must be an integer, got '" + cell + "'");
  }
  return static_cast<int>(v);
}

bool need_bool(const std::string& cell, const std::string& field) {
  if (cell == "true" || cell == "1") return true;
  if (cell == "false" || cell == "0") return false;
  throw ValidationError(field, "must be a boolean, got '" + cell + "'");
}

void check_mos_cell(double mos) {
  if (!(mos >= kMosFloor && mos <= kMosCeil)) {
    throw ValidationError("mos", "must be in [1, 5], got " + format_double(mos));
  }
}

// -- JSONL field extraction ------------------------------------------------

double json_double(const json& row, const std::string& field) {
  const json& v = row.at(field);
  if (!v.is_number()) {
    throw ValidationError(field, "must be a number");
  }
  const double d = v.get<double>();
  if (!std::isfinite(d)) {
    throw ValidationError(field, "must be finite");
  }
  return d;
}

int json_int(const json& row, const std::string& field) {
  const json& v = row.at(field);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw ValidationError(field, "must be an integer");
  }
  const long long d = v.get<long long>();
  if (d < std::numeric_limits<int>::min() ||
      d > std::numeric_limits<int>::max()) {
    throw ValidationError(field, "is out of range");
  }
  return static_cast<int>(d);
}

std::string json_string(const json& row, const std::string& field) {
  const json& v = row.at(field);
  if (!v.is_string()) {
    throw ValidationError(field, "must be a string");
  }
  return v.get<std::string>();
}

bool json_bool(const json& row, const std::string& field) {
  const json& v = row.at(field);
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer() || v.is_number_unsigned()) {
    const long long d = v.get<long long>();
    if (d == 0 || d == 1) return d == 1;
  }
  throw ValidationError(field, "must be a boolean");
}

void check_known_keys(const json& row, std::span<const std::string> required,
                      std::span<const std::string_view> optional) {
  for (const auto& [key, value] : row.items()) {
    const bool known =
        std::find(required.begin(), required.end(), key) != required.end() ||
        std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) throw ValidationError(key, "unknown field");
  }
  for (const std::string& key : required) {
    if (!row.contains(key)) {
      throw ValidationError(key, "missing field");
    }
  }
}

// -- Row -> domain conversions ----------------------------------------------

struct RawRow {
  Session session;
  std::optional<double> mos;
};

RawRow session_from_cells(const std::vector<std::string>& cells,
                          const std::map<std::string, std::size_t>& columns) {
  const auto cell = [&](const std::string& name) -> const std::string& {
    return cells[columns.at(name)];
  };
  RawRow row;
  Session& s = row.session;
  s.id = cell("id");
  s.device.tag = cell("device");
  s.codec.tag = cell("codec");
  s.params.width = need_int(cell("width"), "width");
  s.params.height = need_int(cell("height"), "height");
  s.params.fps = need_double(cell("fps"), "fps");
  s.params.bitrate_bps = need_double(cell("bitrate_kbps"), "bitrate_kbps") * 1000.0;
  s.duration_s = need_double(cell("duration_s"), "duration_s");
  s.impairments.loading_delay_s =
      need_double(cell("loading_delay_s"), "loading_delay_s");
  s.impairments.stall_count = need_int(cell("stall_count"), "stall_count");
  s.impairments.stall_total_s =
      need_double(cell("stall_total_s"), "stall_total_s");
  s.online = need_bool(cell("online"), "online");
  if (auto it = columns.find(std::string(kOptionalMosColumn));
      it != columns.end() && !cells[it->second].empty()) {
    const double mos = need_double(cells[it->second], "mos");
    check_mos_cell(mos);
    row.mos = mos;
  }
  validate(s);
  return row;
}

RawRow session_from_json(const json& doc) {
  static const std::vector<std::string_view> kOptional = {kOptionalMosColumn};
  check_known_keys(doc, kDatasetColumns, kOptional);
  RawRow row;
  Session& s = row.session;
  s.id = json_string(doc, "id");
  s.device.tag = json_string(doc, "device");
  s.codec.tag = json_string(doc, "codec");
  s.params.width = json_int(doc, "width");
  s.params.height = json_int(doc, "height");
  s.params.fps = json_double(doc, "fps");
  s.params.bitrate_bps = json_double(doc, "bitrate_kbps") * 1000.0;
  s.duration_s = json_double(doc, "duration_s");
  s.impairments.loading_delay_s = json_double(doc, "loading_delay_s");
  s.impairments.stall_count = json_int(doc, "stall_count");
  s.impairments.stall_total_s = json_double(doc, "stall_total_s");
  s.online = json_bool(doc, "online");
  if (doc.contains(kOptionalMosColumn)) {
    const double mos = json_double(doc, std::string(kOptionalMosColumn));
    check_mos_cell(mos);
    row.mos = mos;
  }
  validate(s);
  return row;
}

ScoredSession scored_from_cells(
    const std::vector<std::string>& cells,
    const std::map<std::string, std::size_t>& columns) {
  const auto cell = [&](const std::string& name) -> const std::string& {
    return cells[columns.at(name)];
  };
  ScoredSession s;
  s.id = cell("id");
  s.device.tag = cell("device");
  s.codec.tag = cell("codec");
  s.mos = need_double(cell("mos"), "mos");
  s.watts = need_double(cell("watts"), "watts");
  s.energy_joules = need_double(cell("energy_joules"), "energy_joules");
  return s;
}

ScoredSession scored_from_json(const json& doc) {
  check_known_keys(doc, kScoredColumns, {});
  ScoredSession s;
  s.id = json_string(doc, "id");
  s.device.tag = json_string(doc, "device");
  s.codec.tag = json_string(doc, "codec");
  s.mos = json_double(doc, "mos");
  s.watts = json_double(doc, "watts");
  s.energy_joules = json_double(doc, "energy_joules");
  return s;
}

void validate_scored(const ScoredSession& s) {
  if (s.id.empty()) throw ValidationError("id", "must be non-empty");
  if (s.device.tag.empty()) {
    throw ValidationError("device", "must be non-empty");
  }
  if (s.codec.tag.empty()) {
    throw ValidationError("codec", "must be non-empty");
  }
  check_mos_cell(s.mos);
  if (!(s.watts > 0.0)) {
    throw ValidationError("watts", "must be > 0, got " + format_double(s.watts));
  }
  if (!(s.energy_joules >= 0.0)) {
    throw ValidationError("energy_joules", "must be >= 0");
  }
}

/// Shared line-iteration scaffold for both table kinds. `on_row` converts
/// one data row or throws ValidationError; conversion failures become
/// structured rejections and never abort the batch.
template <typename OnCsvRow, typename OnJsonRow>
void for_each_row(const std::filesystem::path& path, TableFormat format,
                  std::span<const std::string> required_columns,
                  std::span<const std::string_view> optional_columns,
                  std::vector<RowRejection>& rejections, OnCsvRow on_csv_row,
                  OnJsonRow on_json_row) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::map<std::string, std::size_t>> columns;
  bool saw_data_line = false;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (is_skippable(line)) continue;
    if (format == TableFormat::kCsv) {
      if (!columns) {
        columns = parse_header(line, required_columns, optional_columns);
        continue;
      }
      saw_data_line = true;
      const auto cells = split_csv(line);
      if (!cells) {
        rejections.push_back({lineno, "", "unbalanced quote"});
        continue;
      }
      if (cells->size() != columns->size()) {
        rejections.push_back(
            {lineno, "",
             "expected " + std::to_string(columns->size()) + " cells, got " +
                 std::to_string(cells->size())});
        continue;
      }
      try {
        on_csv_row(*cells, *columns, lineno);
      } catch (const ValidationError& e) {
        rejections.push_back({lineno, e.field(), e.what()});
      }
    } else {
      json doc = json::parse(line, nullptr, false);
      if (doc.is_discarded()) {
        rejections.push_back({lineno, "", "malformed JSON"});
        continue;
      }
      if (is_config_echo(doc)) continue;
      if (!doc.is_object()) {
        rejections.push_back({lineno, "", "row must be a JSON object"});
        continue;
      }
      saw_data_line = true;
      try {
        on_json_row(doc, lineno);
      } catch (const ValidationError& e) {
        rejections.push_back({lineno, e.field(), e.what()});
      }
    }
  }
  if (format == TableFormat::kCsv && !columns) {
    fail(ErrorCode::kMalformedHeader,
         "'" + path.string() + "' has no header line");
  }
  (void)saw_data_line;
}

class ArtifactWriter {
 public:
  explicit ArtifactWriter(const std::filesystem::path& path)
      : path_(path), out_(path) {
    if (!out_) {
      fail(ErrorCode::kUnwritablePath,
           "cannot open '" + path.string() + "' for writing");
    }
  }

  void line(const std::string& text) { out_ << text << '\n'; }

  void config_echo(TableFormat format, const json& config) {
    if (config.is_null()) return;
    if (format == TableFormat::kCsv) {
      line(std::string(kConfigCommentPrefix) + config.dump());
    } else {
      line(json{{"config", config}}.dump());
    }
  }

  void finish() {
    out_.flush();
    if (!out_) {
      fail(ErrorCode::kUnwritablePath,
           "write to '" + path_.string() + "' failed");
    }
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::string num(double value, const std::string& what) {
  if (!std::isfinite(value)) {
    fail(ErrorCode::kValidation,
         "refusing to serialize non-finite value for " + what);
  }
  return format_double(value);
}

json json_num(double value, const std::string& what) {
  if (!std::isfinite(value)) {
    fail(ErrorCode::kValidation,
         "refusing to serialize non-finite value for " + what);
  }
  return json(value);
}

json report_to_json(const SavingsReport& r) {
  json breakdown = json::array();
  for (const SavingsBreakdownRow& row : r.breakdown) {
    breakdown.push_back(
        {{"label", row.label},
         {"n_sessions", row.n_sessions},
         {"baseline_mean_watts", json_num(row.baseline_mean_watts, "breakdown")},
         {"optimized_mean_watts",
          json_num(row.optimized_mean_watts, "breakdown")},
         {"absolute_saving_watts",
          json_num(row.absolute_saving_watts, "breakdown")},
         {"relative_saving", json_num(row.relative_saving, "breakdown")}});
  }
  json per_session = json::array();
  for (const PerSessionDelta& d : r.per_session) {
    per_session.push_back({{"id", d.id},
                           {"old_mos", json_num(d.old_mos, "per_session")},
                           {"new_mos", json_num(d.new_mos, "per_session")},
                           {"old_watts", json_num(d.old_watts, "per_session")},
                           {"new_watts", json_num(d.new_watts, "per_session")},
                           {"remapped", d.remapped}});
  }
  return {{"policy", r.policy},
          {"configuration", r.configuration},
          {"n_sessions", r.n_sessions},
          {"n_remapped", r.n_remapped},
          {"n_infeasible", r.n_infeasible},
          {"baseline_mean_watts", json_num(r.baseline_mean_watts, r.policy)},
          {"optimized_mean_watts", json_num(r.optimized_mean_watts, r.policy)},
          {"absolute_saving_watts",
           json_num(r.absolute_saving_watts, r.policy)},
          {"relative_saving_ratio_of_means",
           json_num(r.relative_saving_ratio_of_means, r.policy)},
          {"relative_saving_mean_of_ratios",
           json_num(r.relative_saving_mean_of_ratios, r.policy)},
          {"baseline_mean_mos", json_num(r.baseline_mean_mos, r.policy)},
          {"optimized_mean_mos", json_num(r.optimized_mean_mos, r.policy)},
          {"breakdown", std::move(breakdown)},
          {"per_session", std::move(per_session)}};
}

SavingsReport report_from_json(const json& doc) {
  SavingsReport r;
  r.policy = json_string(doc, "policy");
  r.configuration = json_string(doc, "configuration");
  r.n_sessions = doc.at("n_sessions").get<std::size_t>();
  r.n_remapped = doc.at("n_remapped").get<std::size_t>();
  r.n_infeasible = doc.at("n_infeasible").get<std::size_t>();
  r.baseline_mean_watts = json_double(doc, "baseline_mean_watts");
  r.optimized_mean_watts = json_double(doc, "optimized_mean_watts");
  r.absolute_saving_watts = json_double(doc, "absolute_saving_watts");
  r.relative_saving_ratio_of_means =
      json_double(doc, "relative_saving_ratio_of_means");
  r.relative_saving_mean_of_ratios =
      json_double(doc, "relative_saving_mean_of_ratios");
  r.baseline_mean_mos = json_double(doc, "baseline_mean_mos");
  r.optimized_mean_mos = json_double(doc, "optimized_mean_mos");
  for (const json& row : doc.at("breakdown")) {
    SavingsBreakdownRow b;
    b.label = json_string(row, "label");
    b.n_sessions = row.at("n_sessions").get<std::size_t>();
    b.baseline_mean_watts = json_double(row, "baseline_mean_watts");
    b.optimized_mean_watts = json_double(row, "optimized_mean_watts");
    b.absolute_saving_watts = json_double(row, "absolute_saving_watts");
    b.relative_saving = json_double(row, "relative_saving");
    r.breakdown.push_back(std::move(b));
  }
  for (const json& row : doc.at("per_session")) {
    PerSessionDelta d;
    d.id = json_string(row, "id");
    d.old_mos = json_double(row, "old_mos");
    d.new_mos = json_double(row, "new_mos");
    d.old_watts = json_double(row, "old_watts");
    d.new_watts = json_double(row, "new_watts");
    d.remapped = row.at("remapped").get<bool>();
    r.per_session.push_back(std::move(d));
  }
  return r;
}

std::size_t need_size(const std::string& cell, const std::string& field) {
  long long v = 0;
  if (!parse_i64(cell, v) || v < 0) {
    throw ValidationError(field, "must be a count, got '" + cell + "'");
  }
  return static_cast<std::size_t>(v);
}

const std::vector<std::string> kReportCsvColumns = {
    "policy",
    "configuration",
    "scope",
    "label",
    "n_sessions",
    "n_remapped",
    "n_infeasible",
    "baseline_mean_watts",
    "optimized_mean_watts",
    "absolute_saving_watts",
    "relative_saving_ratio_of_means",
    "relative_saving_mean_of_ratios",
    "baseline_mean_mos",
    "optimized_mean_mos"};

}  // namespace

TableFormat table_format_from_name(const std::string& name) {
  if (name == "csv") return TableFormat::kCsv;
  if (name == "jsonl") return TableFormat::kJsonl;
  throw Error(ErrorCode::kUsage, "unknown table format '" + name + "'");
}

TableFormat sniff_table_format(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".csv") return TableFormat::kCsv;
  if (ext == ".jsonl" || ext == ".ndjson") return TableFormat::kJsonl;
  std::ifstream in = open_input(path);
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (is_skippable(line)) continue;
    return line.front() == '{' ? TableFormat::kJsonl : TableFormat::kCsv;
  }
  return TableFormat::kCsv;
}

Dataset parse_sessions(const std::filesystem::path& path, TableFormat format) {
  Dataset dataset;
  std::unordered_set<std::string> seen_ids;
  static const std::vector<std::string_view> kOptional = {kOptionalMosColumn};
  const auto accept = [&](RawRow row, std::size_t lineno) {
    if (!seen_ids.insert(row.session.id).second) {
      dataset.rejections.push_back(
          {lineno, "id", "duplicate session id '" + row.session.id + "'"});
      return;
    }
    dataset.sessions.push_back(std::move(row.session));
    dataset.external_mos.push_back(row.mos);
  };
  for_each_row(
      path, format, kDatasetColumns, kOptional, dataset.rejections,
      [&](const std::vector<std::string>& cells,
          const std::map<std::string, std::size_t>& columns,
          std::size_t lineno) { accept(session_from_cells(cells, columns), lineno); },
      [&](const json& doc, std::size_t lineno) {
        accept(session_from_json(doc), lineno);
      });
  if (dataset.sessions.empty()) {
    fail(ErrorCode::kEmptyDataset,
         "'" + path.string() + "' contains no valid session rows (" +
             std::to_string(dataset.rejections.size()) + " rejected)");
  }
  return dataset;
}

Dataset parse_sessions(const std::filesystem::path& path) {
  return parse_sessions(path, sniff_table_format(path));
}

ScoredTable parse_scored(const std::filesystem::path& path,
                         TableFormat format) {
  ScoredTable table;
  std::unordered_set<std::string> seen_ids;
  const auto accept = [&](ScoredSession row, std::size_t lineno) {
    validate_scored(row);
    if (!seen_ids.insert(row.id).second) {
      table.rejections.push_back(
          {lineno, "id", "duplicate session id '" + row.id + "'"});
      return;
    }
    table.rows.push_back(std::move(row));
  };
  for_each_row(
      path, format, kScoredColumns, {}, table.rejections,
      [&](const std::vector<std::string>& cells,
          const std::map<std::string, std::size_t>& columns,
          std::size_t lineno) { accept(scored_from_cells(cells, columns), lineno); },
      [&](const json& doc, std::size_t lineno) {
        accept(scored_from_json(doc), lineno);
      });
  if (table.rows.empty()) {
    fail(ErrorCode::kEmptyDataset,
         "'" + path.string() + "' contains no valid scored rows (" +
             std::to_string(table.rejections.size()) + " rejected)");
  }
  return table;
}

ScoredTable parse_scored(const std::filesystem::path& path) {
  return parse_scored(path, sniff_table_format(path));
}

InputKind sniff_input_kind(const std::filesystem::path& path) {
  const TableFormat format = sniff_table_format(path);
  std::ifstream in = open_input(path);
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (is_skippable(line)) continue;
    if (format == TableFormat::kCsv) {
      const auto cells = split_csv(line);
      if (!cells) break;
      if (std::find(cells->begin(), cells->end(), "width") != cells->end()) {
        return InputKind::kRawDataset;
      }
      if (std::find(cells->begin(), cells->end(), "watts") != cells->end()) {
        return InputKind::kScoredTable;
      }
      break;
    }
    const json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) break;
    if (is_config_echo(doc)) continue;
    if (doc.contains("width")) return InputKind::kRawDataset;
    if (doc.contains("watts")) return InputKind::kScoredTable;
    break;
  }
  fail(ErrorCode::kMalformedHeader,
       "cannot tell whether '" + path.string() +
           "' is a raw dataset or a scored table");
}

void write_dataset(const std::filesystem::path& path,
                   std::span<const Session> sessions,
                   std::span<const std::optional<double>> external_mos,
                   TableFormat format, const nlohmann::json& config_echo) {
  if (!external_mos.empty() && external_mos.size() != sessions.size()) {
    fail(ErrorCode::kValidation,
         "external MOS column does not match the session count");
  }
  ArtifactWriter out(path);
  out.config_echo(format, config_echo);
  const bool with_mos = !external_mos.empty();
  if (format == TableFormat::kCsv) {
    std::vector<std::string> header = kDatasetColumns;
    if (with_mos) header.emplace_back(kOptionalMosColumn);
    out.line(join_csv(header));
    for (std::size_t i = 0; i < sessions.size(); ++i) {
      const Session& s = sessions[i];
      std::vector<std::string> cells = {
          s.id,
          s.device.tag,
          s.codec.tag,
          std::to_string(s.params.width),
          std::to_string(s.params.height),
          num(s.params.fps, "fps"),
          num(s.params.bitrate_bps / 1000.0, "bitrate_kbps"),
          num(s.duration_s, "duration_s"),
          num(s.impairments.loading_delay_s, "loading_delay_s"),
          std::to_string(s.impairments.stall_count),
          num(s.impairments.stall_total_s, "stall_total_s"),
          s.online ? "true" : "false"};
      if (with_mos) {
        cells.push_back(external_mos[i] ? num(*external_mos[i], "mos") : "");
      }
      out.line(join_csv(cells));
    }
  } else {
    for (std::size_t i = 0; i < sessions.size(); ++i) {
      const Session& s = sessions[i];
      json row = {{"id", s.id},
                  {"device", s.device.tag},
                  {"codec", s.codec.tag},
                  {"width", s.params.width},
                  {"height", s.params.height},
                  {"fps", json_num(s.params.fps, "fps")},
                  {"bitrate_kbps",
                   json_num(s.params.bitrate_bps / 1000.0, "bitrate_kbps")},
                  {"duration_s", json_num(s.duration_s, "duration_s")},
                  {"loading_delay_s",
                   json_num(s.impairments.loading_delay_s, "loading_delay_s")},
                  {"stall_count", s.impairments.stall_count},
                  {"stall_total_s",
                   json_num(s.impairments.stall_total_s, "stall_total_s")},
                  {"online", s.online}};
      if (with_mos && external_mos[i]) {
        row["mos"] = json_num(*external_mos[i], "mos");
      }
      out.line(row.dump());
    }
  }
  out.finish();
}

void write_scored(const std::filesystem::path& path,
                  std::span<const ScoredSession> scored, TableFormat format,
                  const nlohmann::json& config_echo) {
  ArtifactWriter out(path);
  out.config_echo(format, config_echo);
  if (format == TableFormat::kCsv) {
    out.line(join_csv(kScoredColumns));
    for (const ScoredSession& s : scored) {
      out.line(join_csv(std::vector<std::string>{
          s.id, s.device.tag, s.codec.tag, num(s.mos, "mos"),
          num(s.watts, "watts"), num(s.energy_joules, "energy_joules")}));
    }
  } else {
    for (const ScoredSession& s : scored) {
      out.line(json{{"id", s.id},
                    {"device", s.device.tag},
                    {"codec", s.codec.tag},
                    {"mos", json_num(s.mos, "mos")},
                    {"watts", json_num(s.watts, "watts")},
                    {"energy_joules",
                     json_num(s.energy_joules, "energy_joules")}}
                   .dump());
    }
  }
  out.finish();
}

void write_annotated(const std::filesystem::path& path,
                     std::span<const ScoredSession> scored,
                     std::span<const SessionFlags> flags, TableFormat format,
                     const nlohmann::json& config_echo) {
  if (flags.size() != scored.size()) {
    fail(ErrorCode::kValidation,
         "annotation flags do not match the session count");
  }
  ArtifactWriter out(path);
  out.config_echo(format, config_echo);
  if (format == TableFormat::kCsv) {
    std::vector<std::string> header = kScoredColumns;
    header.emplace_back("kept");
    header.emplace_back("efficient");
    out.line(join_csv(header));
    for (std::size_t i = 0; i < scored.size(); ++i) {
      const ScoredSession& s = scored[i];
      out.line(join_csv(std::vector<std::string>{
          s.id, s.device.tag, s.codec.tag, num(s.mos, "mos"),
          num(s.watts, "watts"), num(s.energy_joules, "energy_joules"),
          flags[i].kept ? "true" : "false",
          flags[i].efficient ? "true" : "false"}));
    }
  } else {
    for (std::size_t i = 0; i < scored.size(); ++i) {
      const ScoredSession& s = scored[i];
      out.line(json{{"id", s.id},
                    {"device", s.device.tag},
                    {"codec", s.codec.tag},
                    {"mos", json_num(s.mos, "mos")},
                    {"watts", json_num(s.watts, "watts")},
                    {"energy_joules",
                     json_num(s.energy_joules, "energy_joules")},
                    {"kept", flags[i].kept},
                    {"efficient", flags[i].efficient}}
                   .dump());
    }
  }
  out.finish();
}

void write_fronts(const std::filesystem::path& path, const FrontMap& fronts,
                  TableFormat format, const nlohmann::json& config_echo) {
  ArtifactWriter out(path);
  out.config_echo(format, config_echo);
  if (format == TableFormat::kCsv) {
    out.line("group_device,group_codec,session_id,mos,watts");
    for (const auto& [key, front] : fronts) {
      for (const ParetoPoint& p : front.points()) {
        out.line(join_csv(std::vector<std::string>{
            key.device, key.codec, p.session_id, num(p.mos, "mos"),
            num(p.watts, "watts")}));
      }
    }
  } else {
    for (const auto& [key, front] : fronts) {
      for (const ParetoPoint& p : front.points()) {
        out.line(json{{"group_device", key.device},
                      {"group_codec", key.codec},
                      {"session_id", p.session_id},
                      {"mos", json_num(p.mos, "mos")},
                      {"watts", json_num(p.watts, "watts")}}
                     .dump());
      }
    }
  }
  out.finish();
}

void write_sweep(const std::filesystem::path& path,
                 std::span<const CapSweepRow> rows, TableFormat format,
                 const nlohmann::json& config_echo) {
  ArtifactWriter out(path);
  out.config_echo(format, config_echo);
  if (format == TableFormat::kCsv) {
    out.line("cap,relative_saving,absolute_saving_watts,n_remapped,n_infeasible");
    for (const CapSweepRow& r : rows) {
      out.line(join_csv(std::vector<std::string>{
          num(r.cap, "cap"), num(r.relative_saving, "relative_saving"),
          num(r.absolute_saving_watts, "absolute_saving_watts"),
          std::to_string(r.n_remapped), std::to_string(r.n_infeasible)}));
    }
  } else {
    for (const CapSweepRow& r : rows) {
      out.line(json{{"cap", json_num(r.cap, "cap")},
                    {"relative_saving",
                     json_num(r.relative_saving, "relative_saving")},
                    {"absolute_saving_watts",
                     json_num(r.absolute_saving_watts, "absolute_saving_watts")},
                    {"n_remapped", r.n_remapped},
                    {"n_infeasible", r.n_infeasible}}
                   .dump());
    }
  }
  out.finish();
}

void write_per_session(const std::filesystem::path& path,
                       std::span<const PerSessionDelta> deltas,
                       TableFormat format, const nlohmann::json& config_echo) {
  ArtifactWriter out(path);
  out.config_echo(format, config_echo);
  if (format == TableFormat::kCsv) {
    out.line("id,old_watts,new_watts,old_mos,new_mos");
    for (const PerSessionDelta& d : deltas) {
      out.line(join_csv(std::vector<std::string>{
          d.id, num(d.old_watts, "old_watts"), num(d.new_watts, "new_watts"),
          num(d.old_mos, "old_mos"), num(d.new_mos, "new_mos")}));
    }
  } else {
    for (const PerSessionDelta& d : deltas) {
      out.line(json{{"id", d.id},
                    {"old_watts", json_num(d.old_watts, "old_watts")},
                    {"new_watts", json_num(d.new_watts, "new_watts")},
                    {"old_mos", json_num(d.old_mos, "old_mos")},
                    {"new_mos", json_num(d.new_mos, "new_mos")}}
                   .dump());
    }
  }
  out.finish();
}

void write_report(const std::filesystem::path& path,
                  std::span<const SavingsReport> reports, ReportFormat format,
                  const nlohmann::json& config_echo) {
  if (format == ReportFormat::kJson) {
    json doc;
    doc["config"] = config_echo.is_null() ? json::object() : config_echo;
    json list = json::array();
    for (const SavingsReport& r : reports) list.push_back(report_to_json(r));
    doc["reports"] = std::move(list);
    ArtifactWriter out(path);
    out.line(doc.dump(2));
    out.finish();
    return;
  }
  ArtifactWriter out(path);
  out.config_echo(TableFormat::kCsv, config_echo);
  out.line(join_csv(kReportCsvColumns));
  for (const SavingsReport& r : reports) {
    out.line(join_csv(std::vector<std::string>{
        r.policy, r.configuration, "total", "all",
        std::to_string(r.n_sessions), std::to_string(r.n_remapped),
        std::to_string(r.n_infeasible),
        num(r.baseline_mean_watts, "baseline_mean_watts"),
        num(r.optimized_mean_watts, "optimized_mean_watts"),
        num(r.absolute_saving_watts, "absolute_saving_watts"),
        num(r.relative_saving_ratio_of_means, "relative_saving_ratio_of_means"),
        num(r.relative_saving_mean_of_ratios, "relative_saving_mean_of_ratios"),
        num(r.baseline_mean_mos, "baseline_mean_mos"),
        num(r.optimized_mean_mos, "optimized_mean_mos")}));
    for (const SavingsBreakdownRow& b : r.breakdown) {
      out.line(join_csv(std::vector<std::string>{
          r.policy, r.configuration, "breakdown", b.label,
          std::to_string(b.n_sessions), "", "",
          num(b.baseline_mean_watts, "baseline_mean_watts"),
          num(b.optimized_mean_watts, "optimized_mean_watts"),
          num(b.absolute_saving_watts, "absolute_saving_watts"),
          num(b.relative_saving, "relative_saving"), "", "", ""}));
    }
  }
  out.finish();
}

ReportDocument read_report_json(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("reports")) {
    fail(ErrorCode::kValidation,
         "'" + path.string() + "' is not a report document");
  }
  ReportDocument result;
  result.config = doc.value("config", json::object());
  try {
    for (const json& r : doc.at("reports")) {
      result.reports.push_back(report_from_json(r));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kValidation,
         "'" + path.string() + "' is malformed: " + e.what());
  }
  return result;
}

ReportDocument read_report_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  ReportDocument result;
  std::string line;
  bool header_seen = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    if (line.rfind(kConfigCommentPrefix, 0) == 0) {
      result.config =
          json::parse(line.substr(kConfigCommentPrefix.size()), nullptr, false);
      continue;
    }
    if (line.front() == '#') continue;
    const auto cells = split_csv(line);
    if (!cells || cells->size() != kReportCsvColumns.size()) {
      fail(ErrorCode::kValidation, "'" + path.string() + "' line " +
                                       std::to_string(lineno) +
                                       " is not a report row");
    }
    if (!header_seen) {
      if (*cells != kReportCsvColumns) {
        fail(ErrorCode::kMalformedHeader,
             "'" + path.string() + "' has an unexpected report header");
      }
      header_seen = true;
      continue;
    }
    const std::vector<std::string>& c = *cells;
    if (c[2] == "total") {
      SavingsReport r;
      r.policy = c[0];
      r.configuration = c[1];
      r.n_sessions = need_size(c[4], "n_sessions");
      r.n_remapped = need_size(c[5], "n_remapped");
      r.n_infeasible = need_size(c[6], "n_infeasible");
      r.baseline_mean_watts = need_double(c[7], "baseline_mean_watts");
      r.optimized_mean_watts = need_double(c[8], "optimized_mean_watts");
      r.absolute_saving_watts = need_double(c[9], "absolute_saving_watts");
      r.relative_saving_ratio_of_means =
          need_double(c[10], "relative_saving_ratio_of_means");
      r.relative_saving_mean_of_ratios =
          need_double(c[11], "relative_saving_mean_of_ratios");
      r.baseline_mean_mos = need_double(c[12], "baseline_mean_mos");
      r.optimized_mean_mos = need_double(c[13], "optimized_mean_mos");
      result.reports.push_back(std::move(r));
    } else if (c[2] == "breakdown") {
      if (result.reports.empty()) {
        fail(ErrorCode::kValidation,
             "'" + path.string() + "' has a breakdown row before any total");
      }
      SavingsBreakdownRow b;
      b.label = c[3];
      b.n_sessions = need_size(c[4], "n_sessions");
      b.baseline_mean_watts = need_double(c[7], "baseline_mean_watts");
      b.optimized_mean_watts = need_double(c[8], "optimized_mean_watts");
      b.absolute_saving_watts = need_double(c[9], "absolute_saving_watts");
      b.relative_saving = need_double(c[10], "relative_saving");
      result.reports.back().breakdown.push_back(std::move(b));
    } else {
      fail(ErrorCode::kValidation,
           "'" + path.string() + "' has an unknown scope '" + c[2] + "'");
    }
  }
  if (!header_seen) {
    fail(ErrorCode::kMalformedHeader,
         "'" + path.string() + "' has no report header");
  }
  return result;
}

}  // namespace streamwatt
