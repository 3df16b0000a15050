// Copyright 2026 ProvLet Authors
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

#include "provlet/query.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace provlet {

const char* to_string(ReportKind kind) {
  switch (kind) {
    case ReportKind::EventsPerYear: return "events_per_year";
    case ReportKind::ActiveUsersPerYear: return "active_users_per_year";
    case ReportKind::TypeHistogram: return "type_histogram";
    case ReportKind::ProjectDurations: return "project_durations";
    case ReportKind::Overhead: return "overhead";
  }
  return "?";
}

std::optional<ReportKind> report_kind_from_string(const std::string& s) {
  if (s == "events_per_year") return ReportKind::EventsPerYear;
  if (s == "active_users_per_year") return ReportKind::ActiveUsersPerYear;
  if (s == "type_histogram") return ReportKind::TypeHistogram;
  if (s == "project_durations") return ReportKind::ProjectDurations;
  if (s == "overhead") return ReportKind::Overhead;
  return std::nullopt;
}

std::map<int, std::size_t> events_per_year(
    std::span<const ProvRecord> records) {
  std::map<int, std::size_t> counts;
  for (const auto& r : records) counts[year_of(r.ts)] += 1;
  return counts;
}

std::map<int, std::size_t> active_users_per_year(
    std::span<const ProvRecord> records) {
  std::map<int, std::set<std::string>> users;
  for (const auto& r : records) users[year_of(r.ts)].insert(r.user_id);
  std::map<int, std::size_t> counts;
  for (const auto& [year, set] : users) counts[year] = set.size();
  return counts;
}

std::vector<std::pair<std::string, std::uint64_t>> type_histogram(
    std::span<const ProvRecord> records, std::optional<std::size_t> top_n) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& r : records) counts[r.event_type] += 1;
  std::vector<std::pair<std::string, std::uint64_t>> rows(counts.begin(),
                                                          counts.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (top_n && rows.size() > *top_n) rows.resize(*top_n);
  return rows;
}

std::vector<DurationStats> project_durations(const ResourceCatalog& catalog) {
  // children adjacency over (kind,id) keys
  std::unordered_map<std::string, std::vector<const CatalogNode*>> children;
  std::vector<const CatalogNode*> spaces;
  for (const auto& [key, node] : catalog.nodes()) {
    if (node.parent) {
      children[ResourceCatalog::key(node.parent->kind, node.parent->id)]
          .push_back(&node);
    }
    if (node.ref.kind == ResourceKind::Space) spaces.push_back(&node);
  }

  struct Group {
    std::int64_t min = 0, max = 0, sum = 0;
    std::size_t count = 0;
  };
  std::map<int, Group> groups;

  for (const CatalogNode* space : spaces) {
    TimestampMs latest = space->last_updated_at;
    std::vector<const CatalogNode*> stack{space};
    while (!stack.empty()) {
      const CatalogNode* node = stack.back();
      stack.pop_back();
      latest = std::max(latest, node->last_updated_at);
      auto it = children.find(
          ResourceCatalog::key(node->ref.kind, node->ref.id));
      if (it != children.end())
        stack.insert(stack.end(), it->second.begin(), it->second.end());
    }
    const std::int64_t days = (latest - space->created_at) / 86400000LL;
    Group& g = groups[year_of(space->created_at)];
    if (g.count == 0) {
      g.min = g.max = days;
    } else {
      g.min = std::min(g.min, days);
      g.max = std::max(g.max, days);
    }
    g.sum += days;
    g.count += 1;
  }

  std::vector<DurationStats> out;
  for (const auto& [year, g] : groups) {
    DurationStats stats;
    stats.start_year = year;
    stats.min_days = g.min;
    stats.max_days = g.max;
    stats.mean_days =
        std::round(10.0 * static_cast<double>(g.sum) / g.count) / 10.0;
    stats.project_count = g.count;
    out.push_back(stats);
  }
  return out;
}

OverheadResult overhead(std::uint64_t prov_bytes, std::uint64_t data_bytes) {
  if (data_bytes == 0) throw std::invalid_argument("ZeroDataBytes");
  OverheadResult r;
  r.ratio = static_cast<double>(prov_bytes) / static_cast<double>(data_bytes);
  r.percent = 100.0 * r.ratio;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", r.ratio);
  r.ratio_3sf = buf;
  std::snprintf(buf, sizeof(buf), "%.3g", r.percent);
  r.percent_3sf = buf;
  return r;
}

namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string fmt_mean(double mean) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", mean);
  return buf;
}

}  // namespace

Report build_report(std::span<const ProvRecord> records, ReportKind kind,
                    const ReportContext& ctx) {
  Report report;
  report.kind = kind;
  report.generated_at = ctx.generated_at;

  switch (kind) {
    case ReportKind::EventsPerYear: {
      report.header = {"year", "events"};
      for (const auto& [year, count] : events_per_year(records))
        report.rows.push_back({std::to_string(year), std::to_string(count)});
      break;
    }
    case ReportKind::ActiveUsersPerYear: {
      report.header = {"year", "active_users"};
      for (const auto& [year, count] : active_users_per_year(records))
        report.rows.push_back({std::to_string(year), std::to_string(count)});
      break;
    }
    case ReportKind::TypeHistogram: {
      report.header = {"event_type", "count"};
      for (const auto& [type, count] : type_histogram(records))
        report.rows.push_back({type, std::to_string(count)});
      break;
    }
    case ReportKind::ProjectDurations: {
      if (!ctx.catalog)
        throw std::invalid_argument("project_durations needs a catalog");
      report.header = {"start_year", "min_days", "max_days", "mean_days",
                       "projects"};
      for (const auto& stats : project_durations(*ctx.catalog)) {
        report.rows.push_back({std::to_string(stats.start_year),
                               std::to_string(stats.min_days),
                               std::to_string(stats.max_days),
                               fmt_mean(stats.mean_days),
                               std::to_string(stats.project_count)});
      }
      break;
    }
    case ReportKind::Overhead: {
      if (!ctx.prov_bytes || !ctx.data_bytes)
        throw std::invalid_argument("overhead needs prov_bytes and data_bytes");
      report.header = {"prov_bytes", "data_bytes", "ratio", "percent"};
      OverheadResult r = overhead(*ctx.prov_bytes, *ctx.data_bytes);
      report.rows.push_back({std::to_string(*ctx.prov_bytes),
                             std::to_string(*ctx.data_bytes), r.ratio_3sf,
                             r.percent_3sf});
      break;
    }
  }
  return report;
}

Report run_filtered_report(const BoundedStore& store, const QueryFilter& filter,
                           ReportKind kind, const ReportContext& ctx) {
  std::vector<ProvRecord> records = store.retrieve(filter);
  Report report = build_report(records, kind, ctx);
  if (filter.event_type) report.parameters["event_type"] = *filter.event_type;
  if (filter.user_id) report.parameters["user_id"] = *filter.user_id;
  if (filter.object_id) report.parameters["object_id"] = *filter.object_id;
  if (filter.ts_from)
    report.parameters["ts_from"] = format_rfc3339(*filter.ts_from);
  if (filter.ts_to) report.parameters["ts_to"] = format_rfc3339(*filter.ts_to);
  return report;
}

std::string report_to_csv(const Report& report) {
  std::string out;
  for (std::size_t i = 0; i < report.header.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(report.header[i]);
  }
  out += '\n';
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string report_to_json(const Report& report) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(report.kind);
  j["generated_at"] = format_rfc3339(report.generated_at);
  j["parameters"] = report.parameters;
  j["header"] = report.header;
  j["rows"] = report.rows;
  return j.dump();
}

}  // namespace provlet
