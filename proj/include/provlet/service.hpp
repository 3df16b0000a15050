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

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "provlet/journal.hpp"
#include "provlet/model.hpp"
#include "provlet/store.hpp"

namespace provlet {

// Env var naming the service configuration file.
inline const char* kConfigEnvVar = "PROVLET_CONFIG";

struct ServiceConfig {
  std::string listen_address = "127.0.0.1";
  int port = 8750;
  std::string primary_log_path;
  std::string archive_path;
  std::string alerts_path;
  std::string config_journal_path;
  std::string catalog_path;  // optional; enables project_durations reports
  StoreConfig store;
  std::map<std::string, std::string> ip_to_user;  // packet attribution
  std::map<std::string, UserInfo> tokens;         // bearer token -> principal
};

// Parses the JSON config document. Throws ParseError / std::runtime_error.
ServiceConfig parse_service_config(const std::string& json_text);
ServiceConfig load_service_config(const std::string& path);

// The ingest/query engine behind the HTTP surface: owns the store, the
// primary-log journal, alert and config journals, id allocation, and the
// idempotency map. All mutations funnel through the single writer lock;
// readers observe consistent snapshots. HTTP handlers (tools/) and the
// offline CLI both sit on top of this class.
class ServiceCore {
 public:
  explicit ServiceCore(ServiceConfig cfg);

  struct IngestResult {
    std::string id;
    AppendOutcome outcome;
    bool duplicate = false;  // id seen before; outcome echoes the original
  };

  // Journal-then-apply; the journal line is synced before the store mutates,
  // so a fresh replay of the primary log always reproduces this state.
  IngestResult ingest(ProvRecord record);

  struct CaptureSummary {
    std::size_t parsed = 0;  // ok + error items
    std::size_t decode_errors = 0;
    std::map<std::string, std::size_t> outcomes;
    std::vector<std::string> errors;  // per-packet messages
  };
  CaptureSummary ingest_capture(std::span<const std::uint8_t> data);

  struct ConfigUpdate {
    std::optional<std::size_t> pdb_bytes;
    std::optional<EventTypeConfig> req_events;
    std::optional<bool> archive_enabled;
  };
  // Atomic with respect to appends; shrinking the cap below the current
  // size evicts via the usual rank machinery. Returns evicted ids.
  std::vector<std::string> update_config(const ConfigUpdate& update);

  std::optional<UserInfo> authenticate(const std::string& bearer_token) const;

  // Read-side access under the reader lock.
  template <typename Fn>
  auto with_store(Fn&& fn) const {
    std::shared_lock lock(mutex_);
    return fn(store_);
  }

  StoreConfig store_config() const {
    std::shared_lock lock(mutex_);
    return cfg_.store;
  }
  const ServiceConfig& config() const { return cfg_; }
  const EventTypeRegistry& registry() const { return registry_; }
  const ResourceCatalog* catalog() const {
    return catalog_ ? catalog_.get() : nullptr;
  }

  void flush();

 private:
  void write_new_alerts_locked();

  ServiceConfig cfg_;
  EventTypeRegistry registry_;
  std::unique_ptr<ResourceCatalog> catalog_;
  BoundedStore store_;
  std::unique_ptr<LineLog> journal_;
  std::unique_ptr<LineLog> alerts_log_;
  std::unique_ptr<LineLog> config_log_;
  IdAllocator ids_;
  std::unordered_map<std::string, std::string> seen_;  // id -> outcome name
  std::size_t alerts_written_ = 0;
  mutable std::shared_mutex mutex_;
};

std::string alert_to_json(const Alert& alert);

}  // namespace provlet
