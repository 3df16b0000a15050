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

#include "provlet/http_server.hpp"

#include <httplib.h>

#include <json.hpp>

#include "provlet/access.hpp"
#include "provlet/query.hpp"

namespace provlet {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

void send_error(httplib::Response& res, int status, const std::string& what) {
  ordered_json j;
  j["error"] = what;
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

const char* validation_code_name(ValidationCode code) {
  switch (code) {
    case ValidationCode::MissingField: return "MissingField";
    case ValidationCode::BadTimestamp: return "BadTimestamp";
    case ValidationCode::UnknownEventType: return "UnknownEventType";
    case ValidationCode::BadObjectKind: return "BadObjectKind";
    case ValidationCode::BadField: return "BadField";
  }
  return "?";
}

}  // namespace

struct HttpServer::Impl {
  explicit Impl(ServiceCore& core) : core(core) {}

  ServiceCore& core;
  httplib::Server server;

  std::optional<UserInfo> auth(const httplib::Request& req,
                               httplib::Response& res) {
    std::string header = req.get_header_value("Authorization");
    const std::string prefix = "Bearer ";
    if (header.rfind(prefix, 0) != 0) {
      send_error(res, 401, "missing bearer token");
      return std::nullopt;
    }
    auto user = core.authenticate(header.substr(prefix.size()));
    if (!user) send_error(res, 401, "unknown token");
    return user;
  }

  // Filter params shared by /v1/records and /v1/reports. Returns false after
  // sending a 422 for unparseable timestamps.
  bool parse_filter(const httplib::Request& req, httplib::Response& res,
                    QueryFilter& filter) {
    if (req.has_param("event_type")) filter.event_type = req.get_param_value("event_type");
    if (req.has_param("user")) filter.user_id = req.get_param_value("user");
    if (req.has_param("object")) filter.object_id = req.get_param_value("object");
    for (auto [name, target] :
         {std::pair{"from", &filter.ts_from}, std::pair{"to", &filter.ts_to}}) {
      if (!req.has_param(name)) continue;
      auto ts = parse_rfc3339(req.get_param_value(name));
      if (!ts) {
        send_error(res, 422, std::string("bad timestamp in '") + name + "'");
        return false;
      }
      *target = *ts;
    }
    if (req.has_param("year")) {
      int year = 0;
      try {
        year = std::stoi(req.get_param_value("year"));
      } catch (const std::exception&) {
        send_error(res, 422, "bad year");
        return false;
      }
      filter.ts_from = utc_millis(year, 1, 1);
      filter.ts_to = utc_millis(year + 1, 1, 1) - 1;
    }
    return true;
  }

  void routes();
};

void HttpServer::Impl::routes() {
  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });

  server.Post("/v1/events", [this](const httplib::Request& req,
                                   httplib::Response& res) {
    auto user = auth(req, res);
    if (!user) return;
    ValidationResult validated = validate_record(req.body, core.registry());
    if (!validated.ok()) {
      ordered_json j;
      j["errors"] = json::array();
      for (const auto& e : validated.errors) {
        j["errors"].push_back({{"code", validation_code_name(e.code)},
                               {"field", e.field},
                               {"message", e.message}});
      }
      res.status = 400;
      res.set_content(j.dump(), "application/json");
      return;
    }
    ServiceCore::IngestResult r = core.ingest(std::move(*validated.record));
    ordered_json j;
    j["id"] = r.id;
    j["outcome"] = to_string(r.outcome.status);
    if (r.duplicate) j["duplicate"] = true;
    if (!r.outcome.evicted.empty()) j["evicted"] = r.outcome.evicted;
    switch (r.outcome.status) {
      case AppendOutcome::Status::RecordTooLarge:
        res.status = 413;
        break;
      case AppendOutcome::Status::ArchiveError:
        res.status = 500;
        j["error"] = r.outcome.error;
        break;
      default:
        res.status = 200;
    }
    res.set_content(j.dump(), "application/json");
  });

  server.Post("/v1/captures", [this](const httplib::Request& req,
                                     httplib::Response& res) {
    auto user = auth(req, res);
    if (!user) return;
    try {
      authorize_admin({*user}, "captures");
    } catch (const Denied& e) {
      return send_error(res, 403, e.what());
    }
    if (req.body.empty()) return send_error(res, 400, "empty capture upload");
    try {
      auto summary = core.ingest_capture(std::span<const std::uint8_t>(
          reinterpret_cast<const std::uint8_t*>(req.body.data()),
          req.body.size()));
      ordered_json j;
      j["parsed"] = summary.parsed;
      j["decode_errors"] = summary.decode_errors;
      j["outcomes"] = summary.outcomes;
      j["errors"] = summary.errors;
      res.set_content(j.dump(), "application/json");
    } catch (const ParseError& e) {
      send_error(res, 400, e.what());
    }
  });

  server.Get("/v1/records", [this](const httplib::Request& req,
                                   httplib::Response& res) {
    auto user = auth(req, res);
    if (!user) return;
    QueryFilter filter;
    if (!parse_filter(req, res, filter)) return;
    AccessContext ctx{*user};
    try {
      filter = scoped_filter(ctx, filter);
    } catch (const Denied& e) {
      return send_error(res, 403, e.what());
    }
    std::size_t page = 0, page_size = 100;
    try {
      if (req.has_param("page")) page = std::stoul(req.get_param_value("page"));
      if (req.has_param("page_size"))
        page_size = std::stoul(req.get_param_value("page_size"));
    } catch (const std::exception&) {
      return send_error(res, 422, "bad pagination parameter");
    }
    auto records = core.with_store(
        [&](const BoundedStore& store) { return store.retrieve(filter); });
    // Unattributed network records stay admin-only even under a user filter.
    if (user->role != Role::Admin) {
      std::erase_if(records,
                    [&](const ProvRecord& r) { return !ctx.can_see(r); });
    }
    ordered_json j;
    j["total"] = records.size();
    j["page"] = page;
    j["page_size"] = page_size;
    j["records"] = json::array();
    std::size_t begin = page * page_size;
    for (std::size_t i = begin; i < records.size() && i < begin + page_size; ++i)
      j["records"].push_back(ordered_json::parse(serialize_record(records[i])));
    res.set_content(j.dump(), "application/json");
  });

  server.Get("/v1/reports/([a-z_]+)", [this](const httplib::Request& req,
                                             httplib::Response& res) {
    auto user = auth(req, res);
    if (!user) return;
    auto kind = report_kind_from_string(req.matches[1]);
    if (!kind) return send_error(res, 422, "unknown report kind");
    AccessContext ctx{*user};
    QueryFilter filter;
    if (!parse_filter(req, res, filter)) return;
    try {
      authorize_report(ctx, *kind);
      filter = scoped_filter(ctx, filter);
    } catch (const Denied& e) {
      return send_error(res, 403, e.what());
    }
    ReportContext rctx;
    rctx.generated_at = now_utc_millis();
    rctx.catalog = core.catalog();
    if (*kind == ReportKind::ProjectDurations && !rctx.catalog)
      return send_error(res, 422, "no catalog configured");
    if (*kind == ReportKind::Overhead) {
      rctx.prov_bytes = core.with_store(
          [](const BoundedStore& s) { return s.serialized_size(); });
      if (req.has_param("prov_bytes"))
        rctx.prov_bytes = std::stoull(req.get_param_value("prov_bytes"));
      if (!req.has_param("data_bytes"))
        return send_error(res, 422, "overhead needs data_bytes");
      rctx.data_bytes = std::stoull(req.get_param_value("data_bytes"));
      if (*rctx.data_bytes == 0) return send_error(res, 422, "ZeroDataBytes");
    }
    Report report = core.with_store([&](const BoundedStore& store) {
      return run_filtered_report(store, filter, *kind, rctx);
    });
    res.set_content(report_to_json(report), "application/json");
  });

  server.Put("/v1/config", [this](const httplib::Request& req,
                                  httplib::Response& res) {
    auto user = auth(req, res);
    if (!user) return;
    try {
      authorize_admin({*user}, "config");
    } catch (const Denied& e) {
      return send_error(res, 403, e.what());
    }
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object())
      return send_error(res, 422, "body is not a JSON object");
    ServiceCore::ConfigUpdate update;
    if (body.contains("pdb_bytes")) {
      if (!body["pdb_bytes"].is_number_unsigned() ||
          body["pdb_bytes"].get<std::size_t>() == 0)
        return send_error(res, 422, "pdb_bytes must be a positive integer");
      update.pdb_bytes = body["pdb_bytes"].get<std::size_t>();
    }
    if (body.contains("req_events")) {
      EventTypeConfig req_events;
      for (const auto& [type, prio] : body["req_events"].items()) {
        if (!valid_event_type_name(type))
          return send_error(res, 422, "bad event type name " + type);
        if (!prio.is_string())
          return send_error(res, 422, "priority must be a string");
        auto p = priority_from_string(prio.get<std::string>());
        if (!p)
          return send_error(res, 422,
                            "bad priority for " + type + " (want hpr/mpr/lpr)");
        req_events.entries.emplace(type, *p);
      }
      update.req_events = std::move(req_events);
    }
    if (body.contains("archive_enabled"))
      update.archive_enabled = body["archive_enabled"].get<bool>();

    std::vector<std::string> evicted = core.update_config(update);
    StoreConfig applied = core.store_config();
    ordered_json j;
    j["pdb_bytes"] = applied.pdb_bytes;
    j["archive_enabled"] = applied.archive_enabled;
    ordered_json req_events_json;
    for (const auto& [type, prio] : applied.req_events.entries)
      req_events_json[type] = to_string(prio);
    j["req_events"] = std::move(req_events_json);
    j["evicted"] = evicted;
    res.set_content(j.dump(), "application/json");
  });

  server.Get("/v1/alerts", [this](const httplib::Request& req,
                                  httplib::Response& res) {
    auto user = auth(req, res);
    if (!user) return;
    try {
      authorize_admin({*user}, "alerts");
    } catch (const Denied& e) {
      return send_error(res, 403, e.what());
    }
    ordered_json j;
    j["alerts"] = json::array();
    core.with_store([&](const BoundedStore& store) {
      for (const auto& alert : store.alerts())
        j["alerts"].push_back(ordered_json::parse(alert_to_json(alert)));
      return 0;
    });
    res.set_content(j.dump(), "application/json");
  });

  server.Get("/v1/stats", [this](const httplib::Request& req,
                                 httplib::Response& res) {
    auto user = auth(req, res);
    if (!user) return;
    try {
      authorize_admin({*user}, "stats");
    } catch (const Denied& e) {
      return send_error(res, 403, e.what());
    }
    StoreStats stats = core.with_store(
        [](const BoundedStore& store) { return store.store_stats(); });
    ordered_json j;
    j["record_count"] = stats.record_count;
    j["serialized_size"] = stats.serialized_size;
    j["alert_count"] = stats.alert_count;
    j["type_counts"] = stats.type_counts;
    res.set_content(j.dump(), "application/json");
  });
}

HttpServer::HttpServer(ServiceCore& core) : impl_(std::make_unique<Impl>(core)) {
  impl_->routes();
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace provlet
