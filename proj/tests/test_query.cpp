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

#include <algorithm>
#include <set>

#include <doctest.h>
#include <json.hpp>

#include "provlet/query.hpp"
#include "test_helpers.hpp"

using namespace provlet;
using provtest::Rng;
using provtest::make_record;

namespace {

std::vector<ProvRecord> random_corpus(Rng& rng, std::size_t n) {
  static const std::vector<std::string> kTypes = {
      "upload_file", "login", "view_file", "update_dataset_information",
      "create_space"};
  std::vector<ProvRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    TimestampMs ts = utc_millis(2015 + static_cast<int>(rng.below(6)), 1, 1) +
                     static_cast<TimestampMs>(rng.below(360ull * 86400000ull));
    out.push_back(make_record("r-" + std::to_string(i), ts,
                              "user" + std::to_string(rng.below(40)),
                              kTypes[rng.below(kTypes.size())]));
  }
  return out;
}

}  // namespace

TEST_CASE("aggregations equal naive implementations on random corpora") {
  Rng rng(314);
  for (int round = 0; round < 100; ++round) {
    auto records = random_corpus(rng, 50 + rng.below(500));

    std::map<int, std::size_t> naive_events;
    std::map<int, std::set<std::string>> naive_users;
    std::map<std::string, std::uint64_t> naive_hist;
    for (const auto& r : records) {
      naive_events[year_of(r.ts)] += 1;
      naive_users[year_of(r.ts)].insert(r.user_id);
      naive_hist[r.event_type] += 1;
    }

    CHECK(events_per_year(records) == naive_events);

    auto users = active_users_per_year(records);
    REQUIRE(users.size() == naive_users.size());
    for (const auto& [year, set] : naive_users)
      CHECK(users.at(year) == set.size());

    auto hist = type_histogram(records);
    REQUIRE(hist.size() == naive_hist.size());
    std::uint64_t prev = UINT64_MAX;
    std::string prev_name;
    for (const auto& [name, count] : hist) {
      CHECK(naive_hist.at(name) == count);
      // Sorted: count desc, name asc on ties.
      CHECK((count < prev || (count == prev && name > prev_name)));
      prev = count;
      prev_name = name;
    }

    auto top2 = type_histogram(records, 2);
    CHECK(top2.size() == std::min<std::size_t>(2, hist.size()));
    if (!top2.empty()) CHECK(top2[0] == hist[0]);
  }
}

TEST_CASE("project durations walk descendants and group by start year") {
  ResourceCatalog cat;
  auto add = [&](ResourceKind k, std::string id, std::string created,
                 std::string updated, std::optional<ResourceRef> parent) {
    CatalogNode n;
    n.ref = {k, std::move(id), std::nullopt};
    n.created_at = *parse_rfc3339(created);
    n.last_updated_at = *parse_rfc3339(updated);
    n.parent = std::move(parent);
    cat.add(std::move(n));
  };
  // Space s1 (2016): its own updates stop early but a deep file keeps going.
  add(ResourceKind::Space, "s1", "2016-01-10T00:00:00Z", "2016-02-01T00:00:00Z",
      std::nullopt);
  add(ResourceKind::Collection, "c1", "2016-01-11T00:00:00Z",
      "2016-03-01T00:00:00Z", ResourceRef{ResourceKind::Space, "s1", {}});
  add(ResourceKind::Dataset, "d1", "2016-01-12T00:00:00Z",
      "2016-03-01T00:00:00Z", ResourceRef{ResourceKind::Collection, "c1", {}});
  add(ResourceKind::File, "f1", "2016-01-12T00:00:00Z",
      "2018-01-10T00:00:00Z", ResourceRef{ResourceKind::Dataset, "d1", {}});
  // Space s2 (2016): 10 days.
  add(ResourceKind::Space, "s2", "2016-05-01T00:00:00Z",
      "2016-05-11T00:00:00Z", std::nullopt);
  // Space s3 (2019): 0 days.
  add(ResourceKind::Space, "s3", "2019-07-01T00:00:00Z",
      "2019-07-01T12:00:00Z", std::nullopt);

  auto stats = project_durations(cat);
  REQUIRE(stats.size() == 2);
  CHECK(stats[0].start_year == 2016);
  CHECK(stats[0].project_count == 2);
  // s1: 2016-01-10 -> 2018-01-10 = 731 days (2016 is a leap year).
  CHECK(stats[0].max_days == 731);
  CHECK(stats[0].min_days == 10);
  CHECK(stats[0].mean_days == doctest::Approx(370.5));
  CHECK(stats[1].start_year == 2019);
  CHECK(stats[1].project_count == 1);
  CHECK(stats[1].max_days == 0);
}

TEST_CASE("property: project durations equal a naive descendant walk") {
  Rng rng(808);
  for (int round = 0; round < 30; ++round) {
    ResourceCatalog cat;
    std::vector<CatalogNode> nodes;
    std::size_t spaces = 1 + rng.below(8);
    for (std::size_t s = 0; s < spaces; ++s) {
      CatalogNode sp;
      sp.ref = {ResourceKind::Space, "s" + std::to_string(s), std::nullopt};
      sp.created_at = static_cast<TimestampMs>(rng.below(1500000000000ull));
      sp.last_updated_at = sp.created_at + rng.below(200ull * 86400000ull);
      cat.add(sp);
      nodes.push_back(sp);
      std::size_t cols = rng.below(4);
      for (std::size_t c = 0; c < cols; ++c) {
        CatalogNode co;
        co.ref = {ResourceKind::Collection,
                  "c" + std::to_string(s) + "_" + std::to_string(c),
                  std::nullopt};
        co.created_at = sp.created_at + rng.below(50ull * 86400000ull);
        co.last_updated_at = co.created_at + rng.below(900ull * 86400000ull);
        co.parent = sp.ref;
        cat.add(co);
        nodes.push_back(co);
      }
    }
    auto stats = project_durations(cat);

    // Naive: group spaces by creation year, duration = floor days to the max
    // last_updated_at over the space subtree.
    std::map<int, std::vector<std::int64_t>> by_year;
    for (const auto& n : nodes) {
      if (n.ref.kind != ResourceKind::Space) continue;
      TimestampMs latest = n.last_updated_at;
      for (const auto& m : nodes) {
        if (m.parent && m.parent->id == n.ref.id)
          latest = std::max(latest, m.last_updated_at);
      }
      by_year[year_of(n.created_at)].push_back(
          (latest - n.created_at) / 86400000);
    }
    REQUIRE(stats.size() == by_year.size());
    for (const auto& st : stats) {
      auto& days = by_year.at(st.start_year);
      CHECK(st.project_count == days.size());
      CHECK(st.min_days == *std::min_element(days.begin(), days.end()));
      CHECK(st.max_days == *std::max_element(days.begin(), days.end()));
      double mean = 0;
      for (auto d : days) mean += static_cast<double>(d);
      mean /= static_cast<double>(days.size());
      // Reported to 1 decimal.
      CHECK(st.mean_days ==
            doctest::Approx(std::round(mean * 10) / 10).epsilon(1e-9));
    }
  }
}

TEST_CASE("overhead arithmetic and 3 s.f. rendering") {
  auto r = overhead(5700000ull, 297000000000ull);
  CHECK(r.ratio == doctest::Approx(1.9191919e-5));
  CHECK(r.percent == doctest::Approx(1.9191919e-3));
  CHECK(r.ratio_3sf == "1.92e-05");
  CHECK(r.percent_3sf == "0.00192");

  auto half = overhead(1, 2);
  CHECK(half.ratio == doctest::Approx(0.5));
  CHECK(half.ratio_3sf == "0.5");
  CHECK(half.percent_3sf == "50");

  CHECK_THROWS_AS(overhead(10, 0), std::invalid_argument);
  try {
    overhead(10, 0);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()) == "ZeroDataBytes");
  }
}

TEST_CASE("report documents: kinds, csv, and json") {
  CHECK(*report_kind_from_string("events_per_year") == ReportKind::EventsPerYear);
  CHECK(*report_kind_from_string("active_users_per_year") ==
        ReportKind::ActiveUsersPerYear);
  CHECK(*report_kind_from_string("type_histogram") == ReportKind::TypeHistogram);
  CHECK(*report_kind_from_string("project_durations") ==
        ReportKind::ProjectDurations);
  CHECK(*report_kind_from_string("overhead") == ReportKind::Overhead);
  CHECK(!report_kind_from_string("nope"));

  std::vector<ProvRecord> records = {
      make_record("a", *parse_rfc3339("2017-06-01T00:00:00Z"), "u1", "login"),
      make_record("b", *parse_rfc3339("2017-07-01T00:00:00Z"), "u2", "login"),
      make_record("c", *parse_rfc3339("2018-07-01T00:00:00Z"), "u1",
                  "upload_file"),
  };
  ReportContext ctx;
  ctx.generated_at = *parse_rfc3339("2020-01-01T00:00:00Z");

  Report rep = build_report(records, ReportKind::EventsPerYear, ctx);
  CHECK(report_to_csv(rep) == "year,events\n2017,2\n2018,1\n");
  auto j = nlohmann::json::parse(report_to_json(rep));
  CHECK(j["kind"] == "events_per_year");
  CHECK(j["generated_at"] == "2020-01-01T00:00:00Z");
  CHECK(j["rows"][0][0] == "2017");

  rep = build_report(records, ReportKind::ActiveUsersPerYear, ctx);
  CHECK(report_to_csv(rep) == "year,active_users\n2017,2\n2018,1\n");

  rep = build_report(records, ReportKind::TypeHistogram, ctx);
  CHECK(report_to_csv(rep) ==
        "event_type,count\nlogin,2\nupload_file,1\n");

  ctx.prov_bytes = 5700000;
  ctx.data_bytes = 297000000000ull;
  rep = build_report(records, ReportKind::Overhead, ctx);
  CHECK(report_to_csv(rep) ==
        "prov_bytes,data_bytes,ratio,percent\n"
        "5700000,297000000000,1.92e-05,0.00192\n");
}

TEST_CASE("run_filtered_report composes retrieve with aggregation") {
  StoreConfig cfg;
  cfg.pdb_bytes = 1 << 20;
  cfg.req_events.entries = {{"login", Priority::Hpr},
                            {"upload_file", Priority::Hpr}};
  BoundedStore store;
  store.append_record(cfg, make_record("a", *parse_rfc3339("2017-06-01T00:00:00Z"),
                                       "u1", "login"));
  store.append_record(cfg, make_record("b", *parse_rfc3339("2018-06-01T00:00:00Z"),
                                       "u2", "upload_file"));
  ReportContext ctx;
  QueryFilter filter;
  filter.user_id = "u2";
  Report rep = run_filtered_report(store, filter, ReportKind::EventsPerYear, ctx);
  CHECK(report_to_csv(rep) == "year,events\n2018,1\n");
  CHECK(rep.parameters.at("user_id") == "u2");
}
