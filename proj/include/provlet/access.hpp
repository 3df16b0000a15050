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

#include <span>
#include <string>
#include <vector>

#include "provlet/model.hpp"
#include "provlet/query.hpp"
#include "provlet/store.hpp"

namespace provlet {

class Denied : public std::runtime_error {
 public:
  Denied(const std::string& surface, Role role)
      : std::runtime_error("access denied to " + surface + " for role " +
                           (role == Role::Admin ? "admin" : "regular")) {}
};

// Visibility scope of one requester. Admins see everything; regular users
// see exactly their own transactions. Network records attributed to the
// reserved unattributed user are admin-visible only.
struct AccessContext {
  UserInfo requester;

  bool can_see(const ProvRecord& r) const {
    if (requester.role == Role::Admin) return true;
    return requester.user_id != kUnattributedUser &&
           r.user_id == requester.user_id;
  }
};

std::vector<ProvRecord> visible_records(const AccessContext& ctx,
                                        std::span<const ProvRecord> records);

// Applies the scope at the retrieve layer: for regular users the filter is
// pinned to their own user id. Throws Denied when the requested filter can
// never intersect the requester's scope (asking for another user's records).
QueryFilter scoped_filter(const AccessContext& ctx, QueryFilter filter);

// Admins get every report kind; regular users only the aggregates that are
// computed over their own records. Throws Denied.
void authorize_report(const AccessContext& ctx, ReportKind kind);

// Config, alert, and capture-upload surfaces are admin only. Throws Denied.
void authorize_admin(const AccessContext& ctx, const std::string& surface);

}  // namespace provlet
