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

#include "provlet/time_utils.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <cctype>

namespace provlet {
namespace {

constexpr std::int64_t kMillisPerDay = 86400000LL;

bool is_leap(int y) {
  return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(int y, int m) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[m - 1];
}

// Days from 1970-01-01 to year-month-day (proleptic Gregorian).
// Howard Hinnant's days_from_civil.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

}  // namespace

TimestampMs utc_millis(int year, int month, int day, int hour, int minute,
                       int second, int millis) {
  std::int64_t days = days_from_civil(year, month, day);
  return ((days * 24 + hour) * 60 + minute) * 60000LL + second * 1000LL +
         millis;
}

std::optional<TimestampMs> parse_rfc3339(const std::string& text) {
  // yyyy-mm-ddThh:mm:ss[.frac](Z|+hh:mm|-hh:mm)
  const char* s = text.c_str();
  int y, mo, d, h, mi, se;
  int n = 0;
  if (std::sscanf(s, "%4d-%2d-%2dT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &se,
                  &n) != 6 ||
      n != 19) {
    // Tolerate lowercase 't' and space separators.
    if (std::sscanf(s, "%4d-%2d-%2d%*1[tT ]%2d:%2d:%2d%n", &y, &mo, &d, &h,
                    &mi, &se, &n) != 6 ||
        n != 19) {
      return std::nullopt;
    }
  }
  if (mo < 1 || mo > 12 || d < 1 || d > days_in_month(y, mo)) return std::nullopt;
  if (h > 23 || mi > 59 || se > 60 || h < 0 || mi < 0 || se < 0)
    return std::nullopt;
  if (se == 60) se = 59;  // leap second, clamp

  std::size_t pos = 19;
  int frac_ms = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int digits = 0;
    std::int64_t frac = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      if (digits < 3) frac = frac * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) return std::nullopt;
    while (digits < 3 && digits > 0) {
      frac *= 10;
      ++digits;
    }
    frac_ms = static_cast<int>(frac);
  }

  std::int64_t offset_ms = 0;
  if (pos >= text.size()) return std::nullopt;
  char c = text[pos];
  if (c == 'Z' || c == 'z') {
    ++pos;
  } else if (c == '+' || c == '-') {
    int oh, om;
    int on = 0;
    if (std::sscanf(text.c_str() + pos, "%*1[+-]%2d:%2d%n", &oh, &om, &on) !=
            2 ||
        on != 6) {
      return std::nullopt;
    }
    offset_ms = (oh * 60LL + om) * 60000LL;
    if (c == '-') offset_ms = -offset_ms;
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != text.size()) return std::nullopt;

  return utc_millis(y, mo, d, h, mi, se, frac_ms) - offset_ms;
}

std::string format_rfc3339(TimestampMs ts) {
  std::int64_t days = ts / kMillisPerDay;
  std::int64_t rem = ts % kMillisPerDay;
  if (rem < 0) {
    rem += kMillisPerDay;
    --days;
  }
  int y, m, d;
  civil_from_days(days, y, m, d);
  int ms = static_cast<int>(rem % 1000);
  rem /= 1000;
  int se = static_cast<int>(rem % 60);
  rem /= 60;
  int mi = static_cast<int>(rem % 60);
  int h = static_cast<int>(rem / 60);
  char buf[40];
  if (ms != 0) {
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", y,
                  m, d, h, mi, se, ms);
  } else {
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                  h, mi, se);
  }
  return buf;
}

int year_of(TimestampMs ts) {
  std::int64_t days = ts / kMillisPerDay;
  if (ts % kMillisPerDay < 0) --days;
  int y, m, d;
  civil_from_days(days, y, m, d);
  return y;
}

TimestampMs now_utc_millis() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::int64_t day_bucket(TimestampMs ts) {
  std::int64_t days = ts / kMillisPerDay;
  if (ts % kMillisPerDay < 0) --days;
  return days;
}

}  // namespace provlet
