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

#include <doctest.h>

#include "provlet/access.hpp"
#include "test_helpers.hpp"

using namespace provlet;
using provtest::Rng;
using provtest::make_record;

namespace {

AccessContext admin_ctx() { return {{"root", Role::Admin}}; }
AccessContext user_ctx(std::string id) {
  return {{std::move(id), Role::Regular}};
}

}  // namespace

TEST_CASE("visibility rules") {
  ProvRecord mine = make_record("a", 1, "alice", "login");
  ProvRecord theirs = make_record("b", 2, "bob", "login");
  ProvRecord ghost = make_record("c", 3, "unattributed", "network_packet");

  CHECK(admin_ctx().can_see(mine));
  CHECK(admin_ctx().can_see(ghost));
  CHECK(user_ctx("alice").can_see(mine));
  CHECK(!user_ctx("alice").can_see(theirs));
  CHECK(!user_ctx("alice").can_see(ghost));
  // Nobody can impersonate the reserved user to read network records.
  CHECK(!user_ctx("unattributed").can_see(ghost));

  std::vector<ProvRecord> all = {mine, theirs, ghost};
  CHECK(visible_records(admin_ctx(), all).size() == 3);
  auto alice_view = visible_records(user_ctx("alice"), all);
  REQUIRE(alice_view.size() == 1);
  CHECK(alice_view[0].id == "a");
}

TEST_CASE("scoped_filter pins regular users to their own records") {
  QueryFilter f;
  f.event_type = "login";
  QueryFilter scoped = scoped_filter(user_ctx("alice"), f);
  CHECK(scoped.user_id == "alice");
  CHECK(scoped.event_type == "login");

  // Asking for your own user id explicitly is fine.
  f.user_id = "alice";
  CHECK(scoped_filter(user_ctx("alice"), f).user_id == "alice");

  // Asking for someone else's records is a denial, not an empty result.
  f.user_id = "bob";
  CHECK_THROWS_AS(scoped_filter(user_ctx("alice"), f), Denied);

  // Admin filters pass through unchanged.
  QueryFilter open;
  CHECK(!scoped_filter(admin_ctx(), open).user_id);
  open.user_id = "bob";
  CHECK(scoped_filter(admin_ctx(), open).user_id == "bob");
}

TEST_CASE("report and admin surface authorization") {
  for (ReportKind kind :
       {ReportKind::EventsPerYear, ReportKind::ActiveUsersPerYear,
        ReportKind::TypeHistogram, ReportKind::ProjectDurations,
        ReportKind::Overhead}) {
    CHECK_NOTHROW(authorize_report(admin_ctx(), kind));
  }
  CHECK_NOTHROW(authorize_report(user_ctx("u"), ReportKind::EventsPerYear));
  CHECK_NOTHROW(authorize_report(user_ctx("u"), ReportKind::ActiveUsersPerYear));
  CHECK_NOTHROW(authorize_report(user_ctx("u"), ReportKind::TypeHistogram));
  CHECK_THROWS_AS(authorize_report(user_ctx("u"), ReportKind::ProjectDurations),
                  Denied);
  CHECK_THROWS_AS(authorize_report(user_ctx("u"), ReportKind::Overhead), Denied);

  CHECK_NOTHROW(authorize_admin(admin_ctx(), "config"));
  CHECK_THROWS_AS(authorize_admin(user_ctx("u"), "config"), Denied);
}

TEST_CASE("property: scoped retrieval never leaks another user's records") {
  Rng rng(4242);
  std::vector<std::string> users = {"alice", "bob", "carol", "dave",
                                    "unattributed"};
  std::vector<std::string> types = {"login", "upload_file", "network_packet"};
  std::vector<ProvRecord> all;
  for (int i = 0; i < 2000; ++i) {
    all.push_back(make_record("r-" + std::to_string(i),
                              static_cast<TimestampMs>(rng.below(1e9)),
                              users[rng.below(users.size())],
                              types[rng.below(types.size())]));
  }

  for (int round = 0; round < 1000; ++round) {
    std::string who = users[rng.below(4)];  // never the reserved user
    AccessContext ctx = user_ctx(who);

    QueryFilter f;
    if (rng.below(2)) f.event_type = types[rng.below(types.size())];
    if (rng.below(3) == 0) f.ts_from = rng.below(5e8);
    QueryFilter scoped = scoped_filter(ctx, f);

    for (const auto& r : all) {
      if (!scoped.matches(r)) continue;
      REQUIRE(r.user_id == who);  // zero tolerance for leakage
      REQUIRE(ctx.can_see(r));
    }
    // And the visible set is exactly the user's own records.
    for (const auto& r : visible_records(ctx, all))
      REQUIRE(r.user_id == who);
  }
}
