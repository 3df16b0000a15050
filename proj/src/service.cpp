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

#include "provlet/service.hpp"

#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "provlet/netparse.hpp"

namespace provlet {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

ServiceConfig parse_service_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), e.byte > 0 ? e.byte - 1 : 0);
  }
  ServiceConfig cfg;
  cfg.listen_address = j.value("listen", cfg.listen_address);
  cfg.port = j.value("port", cfg.port);
  cfg.primary_log_path = j.value("primary_log", "");
  cfg.archive_path = j.value("archive_log", "");
  cfg.alerts_path = j.value("alerts_log", "");
  cfg.config_journal_path = j.value("config_journal", "");
  cfg.catalog_path = j.value("catalog", "");
  cfg.store.pdb_bytes = j.value("pdb_bytes", std::size_t{0});
  cfg.store.archive_enabled = j.value("archive_enabled", true);
  if (cfg.store.pdb_bytes == 0)
    throw std::runtime_error("config: pdb_bytes must be > 0");

  if (j.contains("req_events")) {
    for (const auto& [type, prio] : j["req_events"].items()) {
      if (!valid_event_type_name(type))
        throw std::runtime_error("config: bad event type name " + type);
      auto p = priority_from_string(prio.get<std::string>());
      if (!p)
        throw std::runtime_error("config: bad priority for " + type +
                                 " (want hpr/mpr/lpr)");
      cfg.store.req_events.entries.emplace(type, *p);
    }
  }
  if (j.contains("ip_users")) {
    for (const auto& [ip, user] : j["ip_users"].items())
      cfg.ip_to_user.emplace(ip, user.get<std::string>());
  }
  if (j.contains("tokens")) {
    for (const auto& [token, spec] : j["tokens"].items()) {
      UserInfo user;
      user.user_id = spec.at("user").get<std::string>();
      std::string role = spec.value("role", "regular");
      if (role == "admin") {
        user.role = Role::Admin;
      } else if (role == "regular") {
        user.role = Role::Regular;
      } else {
        throw std::runtime_error("config: bad role " + role);
      }
      cfg.tokens.emplace(token, std::move(user));
    }
  }

  std::set<std::string> paths;
  for (const auto& p :
       {cfg.primary_log_path, cfg.archive_path, cfg.alerts_path,
        cfg.config_journal_path}) {
    if (p.empty()) continue;
    if (!paths.insert(p).second)
      throw std::runtime_error("config: store paths must be distinct: " + p);
  }
  return cfg;
}

ServiceConfig load_service_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_service_config(buf.str());
}

std::string alert_to_json(const Alert& alert) {
  ordered_json j;
  j["ts"] = format_rfc3339(alert.ts);
  j["kind"] = "capacity_reached";
  j["current_size"] = alert.current_size;
  j["pdb_bytes"] = alert.pdb_bytes;
  j["record_id"] = alert.record_id;
  j["detail"] = alert.detail;
  return j.dump();
}

ServiceCore::ServiceCore(ServiceConfig cfg) : cfg_(std::move(cfg)) {
  registry_ = default_event_registry();
  for (const auto& [type, prio] : cfg_.store.req_events.entries)
    registry_.insert(type);

  if (!cfg_.catalog_path.empty())
    catalog_ = std::make_unique<ResourceCatalog>(read_catalog(cfg_.catalog_path));

  if (!cfg_.archive_path.empty() && cfg_.store.archive_enabled)
    store_.set_archive(std::make_shared<FileArchive>(cfg_.archive_path));

  // Crash recovery: the primary log is the source of truth; replay it.
  if (!cfg_.primary_log_path.empty() &&
      std::filesystem::exists(cfg_.primary_log_path)) {
    for (const auto& r : read_record_log(cfg_.primary_log_path)) {
      ids_.advance_past(r.id);
      if (seen_.count(r.id)) continue;
      AppendOutcome outcome = store_.append_record(cfg_.store, r);
      seen_.emplace(r.id, to_string(outcome.status));
    }
  }
  alerts_written_ = store_.alerts().size();

  if (!cfg_.primary_log_path.empty())
    journal_ = std::make_unique<LineLog>(cfg_.primary_log_path);
  if (!cfg_.alerts_path.empty())
    alerts_log_ = std::make_unique<LineLog>(cfg_.alerts_path);
  if (!cfg_.config_journal_path.empty())
    config_log_ = std::make_unique<LineLog>(cfg_.config_journal_path);
}

std::optional<UserInfo> ServiceCore::authenticate(
    const std::string& bearer_token) const {
  auto it = cfg_.tokens.find(bearer_token);
  if (it == cfg_.tokens.end()) return std::nullopt;
  return it->second;
}

void ServiceCore::write_new_alerts_locked() {
  if (!alerts_log_) return;
  const auto& alerts = store_.alerts();
  // The ring may have dropped old entries; only count growth is written.
  while (alerts_written_ < alerts.size()) {
    alerts_log_->append(alert_to_json(alerts[alerts_written_]));
    ++alerts_written_;
  }
  alerts_log_->sync();
}

ServiceCore::IngestResult ServiceCore::ingest(ProvRecord record) {
  std::unique_lock lock(mutex_);
  if (record.id.empty()) record.id = ids_.next(record.source);

  if (auto it = seen_.find(record.id); it != seen_.end()) {
    IngestResult result;
    result.id = record.id;
    result.duplicate = true;
    result.outcome.status = AppendOutcome::Status::Stored;  // overwritten below
    // Echo the original outcome by name; evicted ids are not replayed.
    for (auto s :
         {AppendOutcome::Status::Filtered, AppendOutcome::Status::Stored,
          AppendOutcome::Status::StoredWithEviction,
          AppendOutcome::Status::Ignored, AppendOutcome::Status::RecordTooLarge,
          AppendOutcome::Status::ArchiveError}) {
      if (it->second == to_string(s)) result.outcome.status = s;
    }
    return result;
  }

  ids_.advance_past(record.id);
  if (journal_) {
    journal_->append(serialize_record(record));
    journal_->sync();
  }
  IngestResult result;
  result.id = record.id;
  result.outcome = store_.append_record(cfg_.store, record);
  seen_.emplace(record.id, to_string(result.outcome.status));
  write_new_alerts_locked();
  return result;
}

ServiceCore::CaptureSummary ServiceCore::ingest_capture(
    std::span<const std::uint8_t> data) {
  CaptureSummary summary;
  PcapReader reader(data);  // throws ParseError on bad magic / header
  while (auto item = reader.next()) {
    ++summary.parsed;
    if (!item->ok()) {
      ++summary.decode_errors;
      summary.errors.push_back("packet " + std::to_string(item->index) + ": " +
                               item->error().message);
      continue;
    }
    const DecodedPacket& pkt = item->packet();
    std::optional<std::string> attribution;
    if (auto it = cfg_.ip_to_user.find(pkt.src_ip); it != cfg_.ip_to_user.end())
      attribution = it->second;
    IngestResult r = ingest(to_prov_record(pkt, attribution));
    summary.outcomes[r.duplicate ? "duplicate"
                                 : to_string(r.outcome.status)] += 1;
  }
  return summary;
}

std::vector<std::string> ServiceCore::update_config(const ConfigUpdate& update) {
  std::unique_lock lock(mutex_);
  if (update.pdb_bytes) {
    if (*update.pdb_bytes == 0)
      throw std::invalid_argument("pdb_bytes must be > 0");
    cfg_.store.pdb_bytes = *update.pdb_bytes;
  }
  if (update.req_events) {
    cfg_.store.req_events = *update.req_events;
    for (const auto& [type, prio] : update.req_events->entries)
      registry_.insert(type);
  }
  if (update.archive_enabled) cfg_.store.archive_enabled = *update.archive_enabled;

  std::vector<std::string> evicted = store_.enforce_cap(cfg_.store);
  write_new_alerts_locked();

  if (config_log_) {
    ordered_json j;
    j["applied_at"] = format_rfc3339(now_utc_millis());
    j["pdb_bytes"] = cfg_.store.pdb_bytes;
    j["archive_enabled"] = cfg_.store.archive_enabled;
    ordered_json req;
    for (const auto& [type, prio] : cfg_.store.req_events.entries)
      req[type] = to_string(prio);
    j["req_events"] = std::move(req);
    j["evicted"] = evicted.size();
    config_log_->append(j.dump());
    config_log_->sync();
  }
  return evicted;
}

void ServiceCore::flush() {
  std::unique_lock lock(mutex_);
  if (journal_) journal_->sync();
  if (alerts_log_) alerts_log_->sync();
  if (config_log_) config_log_->sync();
}

}  // namespace provlet
