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

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI/CLI.hpp>
#include <nlohmann/json.hpp>

#include "streamwatt/io.hpp"
#include "streamwatt/numeric.hpp"
#include "streamwatt/policy.hpp"
#include "streamwatt/scoring.hpp"
#include "streamwatt/synthetic.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace streamwatt;

constexpr std::size_t kMaxPrintedRejections = 10;

const std::vector<std::string> kAllPolicies = {"params", "codec", "device",
                                               "cap", "joint"};

struct CommonOptions {
  std::string input;
  std::string profiles_path;
  std::string qoe_config_path;
  std::string out_dir = ".";
  std::string format = "csv";
  int outlier_k = 5;
  double outlier_eps_mos = 0.1;
  double outlier_eps_watts = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> caps;
  std::vector<std::string> policies;
  int jobs = 1;
  std::uint64_t seed = 1;
  std::uint64_t synth_n = 10000;
  std::string synth_spec_path;
};

TableFormat table_format(const CommonOptions& opt) {
  // "json" asks for JSON everywhere; tables then use the line-oriented form.
  return opt.format == "csv" ? TableFormat::kCsv : TableFormat::kJsonl;
}

ReportFormat report_format(const CommonOptions& opt) {
  return opt.format == "csv" ? ReportFormat::kCsv : ReportFormat::kJson;
}

std::string table_extension(const CommonOptions& opt) {
  return opt.format == "csv" ? ".csv" : ".jsonl";
}

OutlierRule outlier_rule(const CommonOptions& opt) {
  OutlierRule rule;
  rule.k = opt.outlier_k;
  rule.mos_eps = opt.outlier_eps_mos;
  if (!std::isnan(opt.outlier_eps_watts)) {
    rule.watts_eps = opt.outlier_eps_watts;
  }
  return rule;
}

void print_rejections(const std::vector<RowRejection>& rejections) {
  for (std::size_t i = 0;
       i < rejections.size() && i < kMaxPrintedRejections; ++i) {
    std::cerr << "rejected line " << rejections[i].line;
    if (!rejections[i].field.empty()) {
      std::cerr << " (" << rejections[i].field << ")";
    }
    std::cerr << ": " << rejections[i].reason << "\n";
  }
  if (rejections.size() > kMaxPrintedRejections) {
    std::cerr << "... and " << rejections.size() - kMaxPrintedRejections
              << " more rejected rows\n";
  }
}

json config_echo(const std::string& command, const CommonOptions& opt,
                 const ProfileSet* profiles) {
  json echo;
  echo["command"] = command;
  if (!opt.input.empty()) echo["input"] = opt.input;
  if (!opt.profiles_path.empty()) echo["profiles"] = opt.profiles_path;
  echo["qoe_config"] =
      opt.qoe_config_path.empty() ? json(nullptr) : json(opt.qoe_config_path);
  echo["outlier"] = {
      {"k", opt.outlier_k},
      {"mos_eps", opt.outlier_eps_mos},
      {"watts_eps", std::isnan(opt.outlier_eps_watts)
                        ? json(nullptr)
                        : json(opt.outlier_eps_watts)}};
  echo["caps"] = opt.caps;
  echo["policies"] = opt.policies;
  echo["out_dir"] = opt.out_dir;
  // --jobs is an execution detail, not analysis configuration; leaving it out
  // keeps artifacts byte-identical across parallelism settings.
  echo["format"] = opt.format;
  if (command == "synth") {
    echo["seed"] = opt.seed;
    echo["n"] = opt.synth_n;
    if (!opt.synth_spec_path.empty()) echo["spec"] = opt.synth_spec_path;
  }
  if (profiles != nullptr) {
    json provenance = json::object();
    for (const DeviceCodecProfile& p : profiles->profiles()) {
      provenance["(" + p.device.tag + ", " + p.codec.tag + ")"] = p.provenance;
    }
    echo["profile_provenance"] = std::move(provenance);
  }
  return echo;
}

fs::path ensure_out_dir(const CommonOptions& opt) {
  fs::path dir(opt.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir)) {
    throw Error(ErrorCode::kUnwritablePath,
                "cannot create output directory '" + dir.string() + "'");
  }
  return dir;
}

QoeModelConfig load_qoe(const CommonOptions& opt) {
  if (opt.qoe_config_path.empty()) return QoeModelConfig{};
  return QoeModelConfig::load(opt.qoe_config_path);
}

/// Scored rows plus the raw sessions backing their feature pointers; the
/// sessions vector must stay alive as long as the rows are used.
struct ScoredInput {
  std::vector<Session> sessions;
  std::vector<ScoredSession> rows;
  std::vector<RowRejection> rejections;
  bool has_features = false;
};

ScoredInput load_scored_input(const CommonOptions& opt,
                              const ProfileSet* profiles,
                              const QoeModelConfig& qoe) {
  ScoredInput result;
  const InputKind kind = sniff_input_kind(opt.input);
  if (kind == InputKind::kRawDataset) {
    if (profiles == nullptr) {
      throw Error(ErrorCode::kUsage,
                  "--profiles is required when the input is a raw dataset");
    }
    Dataset dataset = parse_sessions(opt.input);
    result.sessions = std::move(dataset.sessions);
    result.rejections = std::move(dataset.rejections);
    result.rows = score_sessions(result.sessions, *profiles, qoe,
                                 dataset.external_mos, opt.jobs);
    result.has_features = true;
  } else {
    ScoredTable table = parse_scored(opt.input);
    result.rows = std::move(table.rows);
    result.rejections = std::move(table.rejections);
  }
  print_rejections(result.rejections);
  return result;
}

/// Per-device switch directions: for every device with at least two
/// profiles, from = the codec that costs the most over that device's
/// sessions, to = the one that costs the least.
std::map<DeviceClass, SwitchDirection> derive_codec_directions(
    const std::vector<ScoredSession>& rows, const ProfileSet& profiles) {
  std::map<DeviceClass, std::vector<std::size_t>> by_device;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    by_device[rows[i].device].push_back(i);
  }
  std::map<DeviceClass, SwitchDirection> directions;
  for (const auto& [device, indices] : by_device) {
    const Codec* cheapest = nullptr;
    const Codec* costliest = nullptr;
    double cheapest_mean = std::numeric_limits<double>::infinity();
    double costliest_mean = -std::numeric_limits<double>::infinity();
    for (const DeviceCodecProfile& profile : profiles.profiles()) {
      if (profile.device != device) continue;
      std::vector<double> watts;
      watts.reserve(indices.size());
      for (std::size_t idx : indices) {
        Session as_codec = *rows[idx].session;
        as_codec.codec = profile.codec;
        watts.push_back(estimate_with_profile(as_codec, profile).watts);
      }
      const double device_mean = mean(watts);
      if (device_mean < cheapest_mean) {
        cheapest_mean = device_mean;
        cheapest = &profile.codec;
      }
      if (device_mean > costliest_mean) {
        costliest_mean = device_mean;
        costliest = &profile.codec;
      }
    }
    if (cheapest != nullptr && costliest != nullptr &&
        !(*cheapest == *costliest)) {
      directions.emplace(device, SwitchDirection{*costliest, *cheapest});
    }
  }
  return directions;
}

/// Device-switch endpoints: among devices whose profiles cover every codec
/// in the dataset, from = the costliest fleet-wide, to = the cheapest.
std::optional<std::pair<DeviceClass, DeviceClass>> derive_device_direction(
    const std::vector<ScoredSession>& rows, const ProfileSet& profiles) {
  std::vector<Codec> codecs;
  std::vector<DeviceClass> devices;
  for (const ScoredSession& row : rows) {
    if (std::find(codecs.begin(), codecs.end(), row.codec) == codecs.end()) {
      codecs.push_back(row.codec);
    }
  }
  for (const DeviceCodecProfile& profile : profiles.profiles()) {
    if (std::find(devices.begin(), devices.end(), profile.device) ==
        devices.end()) {
      devices.push_back(profile.device);
    }
  }
  const DeviceClass* from = nullptr;
  const DeviceClass* to = nullptr;
  double from_mean = -std::numeric_limits<double>::infinity();
  double to_mean = std::numeric_limits<double>::infinity();
  for (const DeviceClass& device : devices) {
    const bool covered =
        std::all_of(codecs.begin(), codecs.end(), [&](const Codec& codec) {
          return profiles.find(device, codec) != nullptr;
        });
    if (!covered) continue;
    std::vector<double> watts;
    watts.reserve(rows.size());
    for (const ScoredSession& row : rows) {
      Session moved = *row.session;
      moved.device = device;
      watts.push_back(
          estimate_with_profile(moved, profiles.require(device, row.codec))
              .watts);
    }
    const double device_mean = mean(watts);
    if (device_mean > from_mean) {
      from_mean = device_mean;
      from = &device;
    }
    if (device_mean < to_mean) {
      to_mean = device_mean;
      to = &device;
    }
  }
  if (from == nullptr || to == nullptr || *from == *to) return std::nullopt;
  return std::make_pair(*from, *to);
}

std::string slug(std::string text) {
  for (char& c : text) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return text;
}

void print_report_line(const SavingsReport& r) {
  std::cout << r.policy << " [" << r.configuration << "]: " << r.n_sessions
            << " sessions, " << format_double(r.baseline_mean_watts) << " W -> "
            << format_double(r.optimized_mean_watts) << " W ("
            << format_double(100.0 * r.relative_saving_ratio_of_means)
            << "% saving, " << format_double(r.absolute_saving_watts)
            << " W absolute)\n";
}

// ---------------------------------------------------------------------------

int cmd_score(const CommonOptions& opt) {
  const ProfileSet profiles = ProfileSet::load(opt.profiles_path);
  const QoeModelConfig qoe = load_qoe(opt);
  Dataset dataset = parse_sessions(opt.input);
  print_rejections(dataset.rejections);
  const std::vector<ScoredSession> scored = score_sessions(
      dataset.sessions, profiles, qoe, dataset.external_mos, opt.jobs);

  const fs::path out = ensure_out_dir(opt) / ("scored" + table_extension(opt));
  write_scored(out, scored, table_format(opt),
               config_echo("score", opt, &profiles));

  std::vector<double> mos, watts;
  mos.reserve(scored.size());
  watts.reserve(scored.size());
  for (const ScoredSession& s : scored) {
    mos.push_back(s.mos);
    watts.push_back(s.watts);
  }
  std::cout << "scored " << scored.size() << " sessions ("
            << dataset.rejections.size() << " rows rejected); mean mos "
            << format_double(mean(mos)) << "; mean watts "
            << format_double(mean(watts)) << "; wrote " << out.string()
            << "\n";
  return 0;
}

int cmd_pareto(const CommonOptions& opt) {
  std::optional<ProfileSet> profiles;
  if (!opt.profiles_path.empty()) {
    profiles = ProfileSet::load(opt.profiles_path);
  }
  const QoeModelConfig qoe = load_qoe(opt);
  const ScoredInput input =
      load_scored_input(opt, profiles ? &*profiles : nullptr, qoe);

  const OutlierRule rule = outlier_rule(opt);
  std::vector<SessionFlags> flags(input.rows.size());
  FrontMap fronts;
  for (const auto& [key, indices] : group_indices(input.rows)) {
    std::vector<ParetoPoint> points;
    points.reserve(indices.size());
    for (std::size_t idx : indices) {
      points.push_back(ParetoPoint{input.rows[idx].id, input.rows[idx].mos,
                                   input.rows[idx].watts});
    }
    GroupAnalysis analysis = analyze_group(key, points, rule);
    if (analysis.outlier_fallback) {
      std::cerr << "group " << key.label()
                << ": outlier filter removed every point; retried with k = 0\n";
    }
    for (std::size_t k = 0; k < indices.size(); ++k) {
      flags[indices[k]] = {analysis.kept[k],
                           static_cast<bool>(analysis.efficient[k])};
    }
    fronts.emplace(key, std::move(analysis.front));
  }

  const json echo =
      config_echo("pareto", opt, profiles ? &*profiles : nullptr);
  const fs::path dir = ensure_out_dir(opt);
  const fs::path front_path = dir / ("fronts" + table_extension(opt));
  const fs::path annotated_path = dir / ("annotated" + table_extension(opt));
  write_fronts(front_path, fronts, table_format(opt), echo);
  write_annotated(annotated_path, input.rows, flags, table_format(opt), echo);

  std::cout << "analyzed " << input.rows.size() << " sessions in "
            << fronts.size() << " groups; wrote " << front_path.string()
            << " and " << annotated_path.string() << "\n";
  for (const auto& [key, front] : fronts) {
    std::cout << "  " << key.label() << ": " << front.points().size()
              << " efficient points, mos " << format_double(front.min_mos())
              << " to " << format_double(front.max_mos()) << "\n";
  }
  return 0;
}

int cmd_optimize(const CommonOptions& opt) {
  std::optional<ProfileSet> profiles;
  if (!opt.profiles_path.empty()) {
    profiles = ProfileSet::load(opt.profiles_path);
  }
  const QoeModelConfig qoe = load_qoe(opt);
  const ScoredInput input =
      load_scored_input(opt, profiles ? &*profiles : nullptr, qoe);

  std::vector<std::string> policies =
      opt.policies.empty() ? kAllPolicies : opt.policies;
  for (const std::string& policy : policies) {
    if (std::find(kAllPolicies.begin(), kAllPolicies.end(), policy) ==
        kAllPolicies.end()) {
      throw Error(ErrorCode::kUsage, "unknown policy '" + policy + "'");
    }
  }
  const bool feature_policies_requested =
      std::find(policies.begin(), policies.end(), "codec") != policies.end() ||
      std::find(policies.begin(), policies.end(), "device") != policies.end() ||
      std::find(policies.begin(), policies.end(), "joint") != policies.end();
  if (!input.has_features && feature_policies_requested) {
    if (!opt.policies.empty()) {
      throw Error(ErrorCode::kUsage,
                  "codec/device/joint need a raw dataset input; this input is "
                  "a pre-scored table");
    }
    // Default policy set on a pre-scored table: keep what is computable.
    std::erase(policies, "codec");
    std::erase(policies, "device");
    std::erase(policies, "joint");
    std::cerr << "input is a pre-scored table; limiting policies to params/cap\n";
  }
  if (feature_policies_requested && input.has_features && !profiles) {
    throw Error(ErrorCode::kUsage,
                "--profiles is required for codec/device/joint policies");
  }

  std::vector<double> caps = opt.caps;
  if (caps.empty()) caps = {3.0, 4.0};

  std::vector<GroupKey> fallback_groups;
  const FrontMap fronts =
      build_fronts(input.rows, outlier_rule(opt), &fallback_groups);
  for (const GroupKey& key : fallback_groups) {
    std::cerr << "group " << key.label()
              << ": outlier filter removed every point; retried with k = 0\n";
  }

  std::vector<SavingsReport> reports;
  for (const std::string& policy : policies) {
    if (policy == "params") {
      reports.push_back(optimize_params(input.rows, fronts));
    } else if (policy == "codec") {
      const auto directions = derive_codec_directions(input.rows, *profiles);
      if (directions.empty()) {
        std::cerr << "codec policy skipped: no device has two codec profiles\n";
        continue;
      }
      reports.push_back(switch_codec(input.rows, directions, *profiles, qoe));
    } else if (policy == "device") {
      const auto endpoints = derive_device_direction(input.rows, *profiles);
      if (!endpoints) {
        std::cerr << "device policy skipped: no usable device pair\n";
        continue;
      }
      reports.push_back(switch_device(input.rows, endpoints->first,
                                      endpoints->second, *profiles));
    } else if (policy == "cap") {
      for (double cap : caps) {
        reports.push_back(apply_cap(input.rows, fronts, cap));
      }
    } else if (policy == "joint") {
      reports.push_back(
          joint_optimize(input.rows, *profiles, qoe, fronts, std::nullopt));
      for (double cap : caps) {
        reports.push_back(
            joint_optimize(input.rows, *profiles, qoe, fronts, cap));
      }
    }
  }
  if (reports.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no policy produced a report");
  }
  reports = savings_summary(std::move(reports));

  const json echo =
      config_echo("optimize", opt, profiles ? &*profiles : nullptr);
  const fs::path dir = ensure_out_dir(opt);
  const bool json_reports = report_format(opt) == ReportFormat::kJson;
  const fs::path report_path =
      dir / (json_reports ? "reports.json" : "reports.csv");
  write_report(report_path, reports, report_format(opt), echo);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const fs::path deltas_path =
        dir / ("per_session_" + std::to_string(i) + "_" +
               slug(reports[i].policy + "_" + reports[i].configuration) +
               table_extension(opt));
    write_per_session(deltas_path, reports[i].per_session, table_format(opt),
                      echo);
  }

  for (const SavingsReport& r : reports) print_report_line(r);
  std::cout << "wrote " << report_path.string() << "\n";
  return 0;
}

int cmd_sweep(const CommonOptions& opt) {
  std::optional<ProfileSet> profiles;
  if (!opt.profiles_path.empty()) {
    profiles = ProfileSet::load(opt.profiles_path);
  }
  const QoeModelConfig qoe = load_qoe(opt);
  const ScoredInput input =
      load_scored_input(opt, profiles ? &*profiles : nullptr, qoe);

  std::vector<double> caps = opt.caps;
  if (caps.empty()) {
    // Default grid 1.0 to 5.0 in 0.1 steps; i/10.0 lands on the canonical
    // double for each decimal, so the column prints as 1, 1.1, ..., 5.
    for (int i = 10; i <= 50; ++i) caps.push_back(i / 10.0);
  }

  std::vector<GroupKey> fallback_groups;
  const FrontMap fronts =
      build_fronts(input.rows, outlier_rule(opt), &fallback_groups);
  for (const GroupKey& key : fallback_groups) {
    std::cerr << "group " << key.label()
              << ": outlier filter removed every point; retried with k = 0\n";
  }
  const std::vector<CapSweepRow> rows = cap_sweep(input.rows, fronts, caps);

  const fs::path out = ensure_out_dir(opt) / ("sweep" + table_extension(opt));
  write_sweep(out, rows, table_format(opt),
              config_echo("sweep", opt, profiles ? &*profiles : nullptr));
  std::cout << "swept " << rows.size() << " caps over " << input.rows.size()
            << " sessions; wrote " << out.string() << "\n";
  return 0;
}

int cmd_synth(const CommonOptions& opt) {
  SyntheticSpec spec;
  if (!opt.synth_spec_path.empty()) {
    spec = SyntheticSpec::load(opt.synth_spec_path);
  } else {
    spec = SyntheticSpec::paper_like(0, 0);
  }
  spec.n_sessions = static_cast<std::size_t>(opt.synth_n);
  spec.seed = opt.seed;

  const std::vector<Session> sessions = generate_synthetic(spec);
  const fs::path out =
      ensure_out_dir(opt) / ("synthetic" + table_extension(opt));
  json echo = config_echo("synth", opt, nullptr);
  echo["spec_effective"] = spec.to_json();
  write_dataset(out, sessions, {}, table_format(opt), echo);
  std::cout << "generated " << sessions.size() << " sessions (seed "
            << opt.seed << "); wrote " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Session-level streaming analytics: device power and QoE scoring, "
      "Pareto fronts, and power-saving policy evaluation"};
  app.require_subcommand(1);

  CommonOptions opt;
  const auto add_common = [&](CLI::App* cmd, bool needs_input) {
    auto* input = cmd->add_option("--input", opt.input,
                                  "Input dataset (raw or scored table)");
    if (needs_input) input->required();
    cmd->add_option("--profiles", opt.profiles_path,
                    "Power profile JSON (device x codec coefficients)");
    cmd->add_option("--qoe-config", opt.qoe_config_path,
                    "QoE model config JSON (defaults when omitted)");
    cmd->add_option("--out-dir", opt.out_dir, "Output directory")
        ->capture_default_str();
    cmd->add_option("--format", opt.format,
                    "Artifact format: csv tables + csv reports, or "
                    "jsonl/json tables + json reports")
        ->check(CLI::IsMember({"csv", "jsonl", "json"}))
        ->capture_default_str();
    cmd->add_option("--jobs", opt.jobs,
                    "Worker threads (0 = hardware concurrency)")
        ->check(CLI::Range(0, 4096))
        ->capture_default_str();
  };
  const auto add_outlier = [&](CLI::App* cmd) {
    cmd->add_option("--outlier-k", opt.outlier_k,
                    "Neighbors required to keep a point (0 disables)")
        ->check(CLI::Range(0, std::numeric_limits<int>::max()))
        ->capture_default_str();
    cmd->add_option("--outlier-eps-mos", opt.outlier_eps_mos,
                    "Neighborhood half-width on the MOS axis")
        ->capture_default_str();
    cmd->add_option("--outlier-eps-watts", opt.outlier_eps_watts,
                    "Neighborhood half-width in watts (default: 2% of the "
                    "group's power range)");
  };
  const auto add_caps = [&](CLI::App* cmd, const std::string& help) {
    cmd->add_option("--caps", opt.caps, help)->delimiter(',');
  };

  CLI::App* score = app.add_subcommand("score", "Attach MOS and watts");
  add_common(score, true);
  score->get_option("--profiles")->required();

  CLI::App* pareto =
      app.add_subcommand("pareto", "Fronts and efficiency annotation");
  add_common(pareto, true);
  add_outlier(pareto);

  CLI::App* optimize =
      app.add_subcommand("optimize", "Evaluate power-saving policies");
  add_common(optimize, true);
  add_outlier(optimize);
  add_caps(optimize, "MOS caps for cap/joint policies (default 3,4)");
  optimize->add_option("--policies", opt.policies,
                       "Subset of params,codec,device,cap,joint (default all)")
      ->delimiter(',');

  CLI::App* sweep = app.add_subcommand("sweep", "Savings vs MOS-cap curve");
  add_common(sweep, true);
  add_outlier(sweep);
  add_caps(sweep, "Cap grid (default 1.0..5.0 step 0.1)");

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  add_common(synth, false);
  synth->add_option("--seed", opt.seed, "RNG seed; fully determines output")
      ->capture_default_str();
  synth->add_option("--n", opt.synth_n, "Number of sessions")
      ->capture_default_str();
  synth->add_option("--spec", opt.synth_spec_path,
                    "Synthetic spec JSON (default: built-in paper-like mix)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorCode::kUsage);
  }

  try {
    if (score->parsed()) return cmd_score(opt);
    if (pareto->parsed()) return cmd_pareto(opt);
    if (optimize->parsed()) return cmd_optimize(opt);
    if (sweep->parsed()) return cmd_sweep(opt);
    if (synth->parsed()) return cmd_synth(opt);
    return static_cast<int>(ErrorCode::kUsage);
  } catch (const Error& e) {
    std::cerr << "error (" << error_code_name(e.code()) << "): " << e.what()
              << "\n";
    return e.exit_status();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorCode::kGeneric);
  }
}
