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

#include "provlet/access.hpp"

namespace provlet {

std::vector<ProvRecord> visible_records(const AccessContext& ctx,
                                        std::span<const ProvRecord> records) {
  std::vector<ProvRecord> out;
  for (const auto& r : records) {
    if (ctx.can_see(r)) out.push_back(r);
  }
  return out;
}

QueryFilter scoped_filter(const AccessContext& ctx, QueryFilter filter) {
  if (ctx.requester.role == Role::Admin) return filter;
  if (filter.user_id && *filter.user_id != ctx.requester.user_id)
    throw Denied("records of user " + *filter.user_id, ctx.requester.role);
  filter.user_id = ctx.requester.user_id;
  return filter;
}

void authorize_report(const AccessContext& ctx, ReportKind kind) {
  if (ctx.requester.role == Role::Admin) return;
  switch (kind) {
    case ReportKind::EventsPerYear:
    case ReportKind::ActiveUsersPerYear:
    case ReportKind::TypeHistogram:
      return;  // computed over the requester's visible records only
    case ReportKind::ProjectDurations:
    case ReportKind::Overhead:
      // Not scoped to a single user's transactions.
      throw Denied(std::string("report ") + to_string(kind),
                   ctx.requester.role);
  }
}

void authorize_admin(const AccessContext& ctx, const std::string& surface) {
  if (ctx.requester.role != Role::Admin)
    throw Denied(surface, ctx.requester.role);
}

}  // namespace provlet
