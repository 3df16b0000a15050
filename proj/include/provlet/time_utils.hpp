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
#include <optional>
#include <string>

namespace provlet {

// Milliseconds since the Unix epoch, UTC.
using TimestampMs = std::int64_t;

// Parses an RFC 3339 timestamp ("2018-03-01T10:00:00Z",
// "2018-03-01T10:00:00.123Z", or with a +hh:mm offset) to UTC millis.
// Returns nullopt on malformed input.
std::optional<TimestampMs> parse_rfc3339(const std::string& text);

// Canonical RFC 3339 rendering in UTC. Fractional seconds are emitted
// only when the millisecond part is nonzero, always as three digits.
std::string format_rfc3339(TimestampMs ts);

// Calendar year (UTC) containing ts.
int year_of(TimestampMs ts);

// Days since epoch, used as the per-day index bucket.
std::int64_t day_bucket(TimestampMs ts);

// UTC calendar date -> millis at midnight. Month 1..12, day 1..31.
TimestampMs utc_millis(int year, int month, int day, int hour = 0,
                       int minute = 0, int second = 0, int millis = 0);

// Wall clock, UTC millis.
TimestampMs now_utc_millis();

}  // namespace provlet
