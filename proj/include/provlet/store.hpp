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

#include <compare>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "provlet/model.hpp"

namespace provlet {

enum class ReviewPolicy { TercileFrequency };

struct StoreConfig {
  std::size_t pdb_bytes = 0;  // cap on serialized store size (PDB)
  EventTypeConfig req_events;
  bool archive_enabled = true;
  ReviewPolicy review_policy = ReviewPolicy::TercileFrequency;
};

struct Alert {
  TimestampMs ts = 0;
  enum class Kind { CapacityReached } kind = Kind::CapacityReached;
  std::size_t current_size = 0;
  std::size_t pdb_bytes = 0;
  std::string record_id;  // the append that hit the cap
  std::string detail;     // revised priorities, archive failures
};

// Eviction target ("second repository"). Append is all-or-nothing;
// implementations throw ArchiveWriteFailure.
class ArchiveSink {
 public:
  virtual ~ArchiveSink() = default;
  virtual void append(const std::vector<std::string>& lines) = 0;
};

class MemoryArchive : public ArchiveSink {
 public:
  void append(const std::vector<std::string>& lines) override {
    lines_.insert(lines_.end(), lines.begin(), lines.end());
  }
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  std::vector<std::string> lines_;
};

struct AppendOutcome {
  enum class Status {
    Filtered,            // type not in req-events; store untouched
    Stored,              // fit under the cap
    StoredWithEviction,  // lowest-ranked records made room
    Ignored,             // cap full and newcomer did not outrank candidates
    RecordTooLarge,      // single record exceeds pdb_bytes; never stored
    ArchiveError,        // eviction aborted by the archive sink
  };
  Status status = Status::Stored;
  std::vector<std::string> evicted;  // ids, lowest rank first
  bool archived = false;
  std::string error;
};

const char* to_string(AppendOutcome::Status s);

struct StoreStats {
  std::size_t record_count = 0;
  std::size_t serialized_size = 0;
  std::map<std::string, std::uint64_t> type_counts;
  std::size_t alert_count = 0;
};

struct QueryFilter {
  std::optional<std::string> event_type;
  std::optional<std::string> user_id;
  std::optional<std::string> object_id;
  std::optional<TimestampMs> ts_from;  // inclusive
  std::optional<TimestampMs> ts_to;    // inclusive

  bool empty() const {
    return !event_type && !user_id && !object_id && !ts_from && !ts_to;
  }
  bool matches(const ProvRecord& r) const;
};

// Ranking basis: revised priority first, then recency, then id.
struct RankKey {
  int priority = 0;
  TimestampMs ts = 0;
  std::string id;

  auto operator<=>(const RankKey&) const = default;
};

// Frequency-driven priority revision (new-re). Under the tercile policy the
// requested types are sorted by descending ingest count (name-ascending
// tie-break); the top ceil(n/3) become hpr, the next ceil(n/3) mpr, the rest
// lpr. Zero-count types are always lpr. The input config is not mutated.
EventTypeConfig review_events(
    const EventTypeConfig& cfg,
    const std::map<std::string, std::uint64_t>& type_counts,
    ReviewPolicy policy = ReviewPolicy::TercileFrequency);

// Total order over records under a revised config. Throws UnknownType when a
// record's type is absent from the config.
std::strong_ordering compare_rank(const ProvRecord& a, const ProvRecord& b,
                                  const EventTypeConfig& revised);

// The PDB-capped, rank-ordered provenance log. Not internally synchronized:
// callers follow a single-writer / snapshot-reader contract.
class BoundedStore {
 public:
  void set_archive(std::shared_ptr<ArchiveSink> sink) {
    archive_ = std::move(sink);
  }

  AppendOutcome append_record(const StoreConfig& cfg, const ProvRecord& e);

  // Minimal lowest-rank prefix whose combined line size >= needed_bytes,
  // lowest first. Empty when the whole store cannot free enough.
  std::vector<std::string> lowest_ranked_records(
      const EventTypeConfig& revised, std::size_t needed_bytes) const;

  // Moves the given live records to the archive (rank order) or drops them
  // when archiving is off. Returns the count moved. All-or-nothing on
  // archive failure.
  std::size_t archive_records(const std::vector<std::string>& ids,
                              bool archive_enabled);

  // Index-backed retrieval; equals a linear scan with the same predicate.
  std::vector<ProvRecord> retrieve(const QueryFilter& filter) const;

  StoreStats store_stats() const;

  // Re-runs eviction rounds until serialized_size <= pdb_bytes; used when an
  // admin lowers the cap. Returns evicted ids, lowest rank first.
  std::vector<std::string> enforce_cap(const StoreConfig& cfg);

  std::size_t size() const { return records_.size(); }
  std::size_t serialized_size() const { return serialized_size_; }
  bool contains(const std::string& id) const { return records_.count(id) != 0; }
  const std::deque<Alert>& alerts() const { return alerts_; }
  const std::map<std::string, std::uint64_t>& type_counts() const {
    return type_counts_;
  }

  // All live records in (ts, id) order.
  std::vector<ProvRecord> snapshot() const;

  // Serialized lines in (ts, id) order; the store's canonical byte image.
  std::string serialized_image() const;

  // Recomputes serialized_size from the live records (consistency checks).
  std::size_t recompute_serialized_size() const;

  RankKey rank_of(const ProvRecord& r, const EventTypeConfig& revised) const;

 private:
  struct Entry {
    ProvRecord record;
    std::string line;  // serialize_record(record)
  };
  using TsKey = std::pair<TimestampMs, std::string>;

  void insert_entry(Entry entry);
  void remove_entry(const std::string& id);
  void push_alert(Alert alert);

  std::unordered_map<std::string, Entry> records_;
  std::size_t serialized_size_ = 0;
  std::set<TsKey> by_ts_;
  std::unordered_map<std::string, std::set<TsKey>> by_type_;
  std::unordered_map<std::string, std::set<TsKey>> by_user_;
  std::unordered_map<std::string, std::set<TsKey>> by_object_;
  std::map<std::int64_t, std::set<TsKey>> by_day_;
  std::deque<Alert> alerts_;  // ring, last kMaxAlerts
  std::map<std::string, std::uint64_t> type_counts_;
  std::shared_ptr<ArchiveSink> archive_;

  static constexpr std::size_t kMaxAlerts = 1000;
};

}  // namespace provlet
