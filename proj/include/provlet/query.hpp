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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "provlet/model.hpp"
#include "provlet/store.hpp"

namespace provlet {

enum class ReportKind {
  EventsPerYear,
  ActiveUsersPerYear,
  TypeHistogram,
  ProjectDurations,
  Overhead,
};

const char* to_string(ReportKind kind);
std::optional<ReportKind> report_kind_from_string(const std::string& s);

// Tabular report payload. Rows are deterministically sorted (year ascending,
// or count descending with name tie-break).
struct Report {
  ReportKind kind = ReportKind::EventsPerYear;
  TimestampMs generated_at = 0;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::map<std::string, std::string> parameters;
};

std::string report_to_csv(const Report& report);
std::string report_to_json(const Report& report);

// Per start-year project (space) duration statistics.
struct DurationStats {
  int start_year = 0;
  std::int64_t min_days = 0;
  std::int64_t max_days = 0;
  double mean_days = 0.0;  // reported to 1 decimal
  std::size_t project_count = 0;
};

struct OverheadResult {
  double ratio = 0.0;
  double percent = 0.0;
  std::string ratio_3sf;    // e.g. "1.92e-05"
  std::string percent_3sf;  // e.g. "0.00192"
};

std::map<int, std::size_t> events_per_year(std::span<const ProvRecord> records);

std::map<int, std::size_t> active_users_per_year(
    std::span<const ProvRecord> records);

// Descending by count, name tie-break; top_n truncates.
std::vector<std::pair<std::string, std::uint64_t>> type_histogram(
    std::span<const ProvRecord> records,
    std::optional<std::size_t> top_n = std::nullopt);

// Per space: floor days from the space's creation to the latest
// last_updated_at over the space and all its descendants, grouped by the
// space's creation year. Sorted by year.
std::vector<DurationStats> project_durations(const ResourceCatalog& catalog);

// Throws std::invalid_argument on data_bytes == 0 (ZeroDataBytes).
OverheadResult overhead(std::uint64_t prov_bytes, std::uint64_t data_bytes);

// Inputs a report kind needs beyond the record stream.
struct ReportContext {
  const ResourceCatalog* catalog = nullptr;      // ProjectDurations
  std::optional<std::uint64_t> prov_bytes;       // Overhead
  std::optional<std::uint64_t> data_bytes;
  TimestampMs generated_at = 0;
};

// retrieve(store, filter) composed with the aggregation for `kind`.
Report run_filtered_report(const BoundedStore& store, const QueryFilter& filter,
                           ReportKind kind, const ReportContext& ctx);

// Same aggregations over an explicit record list (offline path).
Report build_report(std::span<const ProvRecord> records, ReportKind kind,
                    const ReportContext& ctx);

}  // namespace provlet
