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

#include "provlet/store.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace provlet {

const char* to_string(AppendOutcome::Status s) {
  switch (s) {
    case AppendOutcome::Status::Filtered: return "filtered";
    case AppendOutcome::Status::Stored: return "stored";
    case AppendOutcome::Status::StoredWithEviction: return "stored_with_eviction";
    case AppendOutcome::Status::Ignored: return "ignored";
    case AppendOutcome::Status::RecordTooLarge: return "record_too_large";
    case AppendOutcome::Status::ArchiveError: return "archive_error";
  }
  return "?";
}

bool QueryFilter::matches(const ProvRecord& r) const {
  if (event_type && r.event_type != *event_type) return false;
  if (user_id && r.user_id != *user_id) return false;
  if (object_id && (!r.object || r.object->id != *object_id)) return false;
  if (ts_from && r.ts < *ts_from) return false;
  if (ts_to && r.ts > *ts_to) return false;
  return true;
}

EventTypeConfig review_events(
    const EventTypeConfig& cfg,
    const std::map<std::string, std::uint64_t>& type_counts,
    ReviewPolicy policy) {
  (void)policy;  // tercile_frequency is the only policy
  std::vector<std::pair<std::string, std::uint64_t>> order;
  order.reserve(cfg.entries.size());
  for (const auto& [type, prio] : cfg.entries) {
    auto it = type_counts.find(type);
    order.emplace_back(type, it == type_counts.end() ? 0 : it->second);
  }
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  const std::size_t n = order.size();
  const std::size_t tercile = (n + 2) / 3;  // ceil(n/3)
  EventTypeConfig revised;
  for (std::size_t i = 0; i < n; ++i) {
    Priority p;
    if (order[i].second == 0) {
      p = Priority::Lpr;
    } else if (i < tercile) {
      p = Priority::Hpr;
    } else if (i < 2 * tercile) {
      p = Priority::Mpr;
    } else {
      p = Priority::Lpr;
    }
    revised.entries.emplace(order[i].first, p);
  }
  return revised;
}

namespace {

RankKey make_rank(const ProvRecord& r, const EventTypeConfig& revised,
                  bool strict) {
  auto it = revised.entries.find(r.event_type);
  int priority;
  if (it != revised.entries.end()) {
    priority = static_cast<int>(it->second);
  } else if (strict) {
    throw UnknownType(r.event_type);
  } else {
    // Stored records whose type was since de-requested rank lowest.
    priority = static_cast<int>(Priority::Lpr);
  }
  return RankKey{priority, r.ts, r.id};
}

std::size_t line_cost(const std::string& line) {
  return line.size() + 1;  // trailing newline
}

}  // namespace

std::strong_ordering compare_rank(const ProvRecord& a, const ProvRecord& b,
                                  const EventTypeConfig& revised) {
  return make_rank(a, revised, /*strict=*/true) <=>
         make_rank(b, revised, /*strict=*/true);
}

RankKey BoundedStore::rank_of(const ProvRecord& r,
                              const EventTypeConfig& revised) const {
  return make_rank(r, revised, /*strict=*/false);
}

void BoundedStore::insert_entry(Entry entry) {
  const ProvRecord& r = entry.record;
  TsKey key{r.ts, r.id};
  by_ts_.insert(key);
  by_type_[r.event_type].insert(key);
  by_user_[r.user_id].insert(key);
  if (r.object) by_object_[r.object->id].insert(key);
  by_day_[day_bucket(r.ts)].insert(key);
  serialized_size_ += line_cost(entry.line);
  records_.emplace(r.id, std::move(entry));
}

void BoundedStore::remove_entry(const std::string& id) {
  auto it = records_.find(id);
  assert(it != records_.end());
  const ProvRecord& r = it->second.record;
  TsKey key{r.ts, r.id};
  by_ts_.erase(key);
  by_type_[r.event_type].erase(key);
  by_user_[r.user_id].erase(key);
  if (r.object) by_object_[r.object->id].erase(key);
  by_day_[day_bucket(r.ts)].erase(key);
  serialized_size_ -= line_cost(it->second.line);
  records_.erase(it);
}

void BoundedStore::push_alert(Alert alert) {
  alerts_.push_back(std::move(alert));
  if (alerts_.size() > kMaxAlerts) alerts_.pop_front();
}

std::vector<std::string> BoundedStore::lowest_ranked_records(
    const EventTypeConfig& revised, std::size_t needed_bytes) const {
  std::vector<std::pair<RankKey, const Entry*>> ranked;
  ranked.reserve(records_.size());
  for (const auto& [id, entry] : records_) {
    ranked.emplace_back(make_rank(entry.record, revised, false), &entry);
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::string> ids;
  std::size_t freed = 0;
  for (const auto& [rank, entry] : ranked) {
    if (freed >= needed_bytes) break;
    ids.push_back(entry->record.id);
    freed += line_cost(entry->line);
  }
  if (freed < needed_bytes) return {};  // cannot free enough
  return ids;
}

std::size_t BoundedStore::archive_records(const std::vector<std::string>& ids,
                                          bool archive_enabled) {
  if (archive_enabled && archive_) {
    std::vector<std::string> lines;
    lines.reserve(ids.size());
    for (const auto& id : ids) {
      auto it = records_.find(id);
      if (it == records_.end())
        throw std::invalid_argument("archive_records: unknown id " + id);
      lines.push_back(it->second.line);
    }
    archive_->append(lines);  // throws ArchiveWriteFailure; store unchanged
  }
  for (const auto& id : ids) remove_entry(id);
  return ids.size();
}

AppendOutcome BoundedStore::append_record(const StoreConfig& cfg,
                                          const ProvRecord& e) {
  if (records_.count(e.id))
    throw std::invalid_argument("duplicate record id " + e.id);

  if (!cfg.req_events.requested(e.event_type)) {
    return {AppendOutcome::Status::Filtered};
  }

  Entry entry{e, serialize_record(e)};
  const std::size_t cost = line_cost(entry.line);
  if (cost > cfg.pdb_bytes) {
    AppendOutcome out{AppendOutcome::Status::RecordTooLarge};
    out.error = "record line of " + std::to_string(cost) +
                " bytes exceeds pdb_bytes " + std::to_string(cfg.pdb_bytes);
    return out;
  }

  type_counts_[e.event_type] += 1;

  if (serialized_size_ + cost <= cfg.pdb_bytes) {
    insert_entry(std::move(entry));
    return {AppendOutcome::Status::Stored};
  }

  // Eviction path: alert, revise priorities, pick candidates, admit or ignore.
  EventTypeConfig revised =
      review_events(cfg.req_events, type_counts_, cfg.review_policy);

  Alert alert;
  alert.ts = e.ts;
  alert.kind = Alert::Kind::CapacityReached;
  alert.current_size = serialized_size_;
  alert.pdb_bytes = cfg.pdb_bytes;
  alert.record_id = e.id;
  {
    std::ostringstream detail;
    detail << "revised priorities:";
    for (const auto& [type, prio] : revised.entries)
      detail << " " << type << "=" << to_string(prio);
    alert.detail = detail.str();
  }

  const std::size_t needed = serialized_size_ + cost - cfg.pdb_bytes;
  std::vector<std::string> candidates =
      lowest_ranked_records(revised, needed);

  if (candidates.empty()) {
    alert.detail += "; ignored: store cannot free enough bytes";
    push_alert(std::move(alert));
    return {AppendOutcome::Status::Ignored};
  }

  const RankKey new_rank = make_rank(e, revised, false);
  // Candidates are sorted lowest first; the newcomer must outrank them all.
  const RankKey top_candidate_rank =
      make_rank(records_.at(candidates.back()).record, revised, false);
  if (!(new_rank > top_candidate_rank)) {
    alert.detail += "; ignored: newcomer does not outrank candidates";
    push_alert(std::move(alert));
    return {AppendOutcome::Status::Ignored};
  }

  const bool will_archive = cfg.archive_enabled && archive_ != nullptr;
  try {
    archive_records(candidates, cfg.archive_enabled);
  } catch (const ArchiveWriteFailure& f) {
    alert.detail += std::string("; archive write failed: ") + f.what();
    push_alert(std::move(alert));
    AppendOutcome out{AppendOutcome::Status::ArchiveError};
    out.error = f.what();
    return out;
  }
  push_alert(std::move(alert));
  insert_entry(std::move(entry));

  AppendOutcome out{AppendOutcome::Status::StoredWithEviction};
  out.evicted = std::move(candidates);
  out.archived = will_archive;
  return out;
}

std::vector<std::string> BoundedStore::enforce_cap(const StoreConfig& cfg) {
  if (serialized_size_ <= cfg.pdb_bytes) return {};
  EventTypeConfig revised =
      review_events(cfg.req_events, type_counts_, cfg.review_policy);
  const std::size_t needed = serialized_size_ - cfg.pdb_bytes;
  std::vector<std::string> candidates =
      lowest_ranked_records(revised, needed);

  Alert alert;
  alert.ts = by_ts_.empty() ? 0 : by_ts_.rbegin()->first;
  alert.current_size = serialized_size_;
  alert.pdb_bytes = cfg.pdb_bytes;
  alert.detail = "cap lowered below current size";
  push_alert(std::move(alert));

  archive_records(candidates, cfg.archive_enabled);
  return candidates;
}

std::vector<ProvRecord> BoundedStore::retrieve(const QueryFilter& filter) const {
  std::vector<ProvRecord> out;
  auto emit_if_match = [&](const TsKey& key) {
    const ProvRecord& r = records_.at(key.second).record;
    if (filter.matches(r)) out.push_back(r);
  };

  // Pick the narrowing index for the first filter field present; remaining
  // predicates are applied to the narrowed candidate set.
  if (filter.event_type) {
    auto it = by_type_.find(*filter.event_type);
    if (it != by_type_.end())
      for (const auto& key : it->second) emit_if_match(key);
  } else if (filter.user_id) {
    auto it = by_user_.find(*filter.user_id);
    if (it != by_user_.end())
      for (const auto& key : it->second) emit_if_match(key);
  } else if (filter.object_id) {
    auto it = by_object_.find(*filter.object_id);
    if (it != by_object_.end())
      for (const auto& key : it->second) emit_if_match(key);
  } else if (filter.ts_from || filter.ts_to) {
    if (!by_day_.empty()) {
      std::int64_t lo = filter.ts_from ? day_bucket(*filter.ts_from)
                                       : by_day_.begin()->first;
      std::int64_t hi = filter.ts_to ? day_bucket(*filter.ts_to)
                                     : by_day_.rbegin()->first;
      for (auto it = by_day_.lower_bound(lo);
           it != by_day_.end() && it->first <= hi; ++it) {
        for (const auto& key : it->second) emit_if_match(key);
      }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      return std::tie(a.ts, a.id) < std::tie(b.ts, b.id);
    });
    return out;
  } else {
    for (const auto& key : by_ts_) emit_if_match(key);
    return out;
  }

  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.ts, a.id) < std::tie(b.ts, b.id);
  });
  return out;
}

StoreStats BoundedStore::store_stats() const {
  StoreStats stats;
  stats.record_count = records_.size();
  stats.serialized_size = serialized_size_;
  stats.type_counts = type_counts_;
  stats.alert_count = alerts_.size();
  return stats;
}

std::vector<ProvRecord> BoundedStore::snapshot() const {
  std::vector<ProvRecord> out;
  out.reserve(records_.size());
  for (const auto& key : by_ts_) out.push_back(records_.at(key.second).record);
  return out;
}

std::string BoundedStore::serialized_image() const {
  std::string image;
  image.reserve(serialized_size_);
  for (const auto& key : by_ts_) {
    image += records_.at(key.second).line;
    image += '\n';
  }
  return image;
}

std::size_t BoundedStore::recompute_serialized_size() const {
  std::size_t total = 0;
  for (const auto& [id, entry] : records_) total += line_cost(entry.line);
  return total;
}

}  // namespace provlet
