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

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "provlet/corpus.hpp"
#include "provlet/http_server.hpp"
#include "provlet/journal.hpp"
#include "provlet/netparse.hpp"
#include "provlet/query.hpp"
#include "provlet/service.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace provlet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInternalError = 2;

HttpServer* g_server = nullptr;
ServiceCore* g_core = nullptr;

void handle_signal(int) {
  if (g_core) g_core->flush();
  if (g_server) g_server->stop();
}

CorpusProfile load_profile(const std::string& path) {
  if (path.empty() || path == "default") return {};
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile " + path);
  json j = json::parse(in);
  CorpusProfile p;
  p.spaces = j.value("spaces", p.spaces);
  p.collections = j.value("collections", p.collections);
  p.datasets = j.value("datasets", p.datasets);
  p.files = j.value("files", p.files);
  p.users = j.value("users", p.users);
  p.start_year = j.value("start_year", p.start_year);
  p.end_year = j.value("end_year", p.end_year);
  p.extra_events = j.value("extra_events", p.extra_events);
  p.update_dataset_share =
      j.value("update_dataset_share", p.update_dataset_share);
  if (j.contains("year_weights"))
    p.year_weights = j["year_weights"].get<std::vector<double>>();
  return p;
}

QueryFilter parse_filters(const std::vector<std::string>& kvs) {
  QueryFilter filter;
  for (const auto& kv : kvs) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--filter wants key=value, got: " + kv);
    std::string key = kv.substr(0, eq);
    std::string value = kv.substr(eq + 1);
    if (key == "event_type") {
      filter.event_type = value;
    } else if (key == "user") {
      filter.user_id = value;
    } else if (key == "object") {
      filter.object_id = value;
    } else if (key == "from" || key == "to") {
      auto ts = parse_rfc3339(value);
      if (!ts) throw std::runtime_error("bad timestamp in --filter " + kv);
      (key == "from" ? filter.ts_from : filter.ts_to) = *ts;
    } else if (key == "year") {
      int year = std::stoi(value);
      filter.ts_from = utc_millis(year, 1, 1);
      filter.ts_to = utc_millis(year + 1, 1, 1) - 1;
    } else {
      throw std::runtime_error("unknown filter key: " + key);
    }
  }
  return filter;
}

std::string compact_timestamp(TimestampMs ts) {
  std::string s = format_rfc3339(ts);
  std::string out;
  for (char c : s)
    if (c != '-' && c != ':' && c != '.') out += c;
  return out;
}

int cmd_gen_corpus(std::uint64_t seed, const std::string& profile_path,
                   const std::string& out_dir) {
  CorpusProfile profile = load_profile(profile_path);
  Corpus corpus = gen_corpus(seed, profile);
  fs::create_directories(out_dir);
  write_catalog(out_dir + "/catalog.jsonl", corpus.catalog);
  write_record_log(out_dir + "/events.log", corpus.events);
  {
    ordered_json users = ordered_json::array();
    for (const auto& u : corpus.users) {
      users.push_back({{"user", u.user_id},
                       {"role", u.role == Role::Admin ? "admin" : "regular"}});
    }
    std::ofstream out(out_dir + "/users.json", std::ios::trunc);
    out << users.dump(2) << '\n';
  }
  ordered_json summary;
  summary["spaces"] = corpus.catalog.count(ResourceKind::Space);
  summary["collections"] = corpus.catalog.count(ResourceKind::Collection);
  summary["datasets"] = corpus.catalog.count(ResourceKind::Dataset);
  summary["files"] = corpus.catalog.count(ResourceKind::File);
  summary["users"] = corpus.users.size();
  summary["events"] = corpus.events.size();
  std::cout << summary.dump() << '\n';
  return kExitOk;
}

int cmd_replay(const std::string& config_path, const std::string& log_path,
               const std::string& out_path) {
  ServiceConfig cfg = load_service_config(config_path);
  std::shared_ptr<ArchiveSink> archive;
  if (!cfg.archive_path.empty() && cfg.store.archive_enabled)
    archive = std::make_shared<FileArchive>(cfg.archive_path);
  ReplayResult result = replay_log_file(log_path, cfg.store, archive);

  if (result.store.serialized_size() > cfg.store.pdb_bytes ||
      result.store.serialized_size() != result.store.recompute_serialized_size())
    return kExitInternalError;

  if (!out_path.empty())
    write_record_log(out_path, result.store.snapshot());

  StoreStats stats = result.store.store_stats();
  ordered_json j;
  j["lines"] = result.lines;
  j["outcomes"] = result.outcomes;
  j["record_count"] = stats.record_count;
  j["serialized_size"] = stats.serialized_size;
  j["alert_count"] = stats.alert_count;
  std::cout << j.dump() << '\n';
  return kExitOk;
}

int cmd_ingest_pcap(const std::string& in_path, const std::string& out_path,
                    const std::string& config_path) {
  std::map<std::string, std::string> ip_to_user;
  if (!config_path.empty())
    ip_to_user = load_service_config(config_path).ip_to_user;

  std::ifstream in(in_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open capture " + in_path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string bytes = buf.str();

  std::vector<PcapItem> items = parse_pcap(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));

  IdAllocator ids;
  std::vector<ProvRecord> records;
  std::size_t errors = 0;
  for (const auto& item : items) {
    if (!item.ok()) {
      ++errors;
      std::cerr << "packet " << item.index << ": " << item.error().message
                << '\n';
      continue;
    }
    std::optional<std::string> attribution;
    if (auto it = ip_to_user.find(item.packet().src_ip); it != ip_to_user.end())
      attribution = it->second;
    records.push_back(to_prov_record(item.packet(), attribution,
                                     ids.next(RecordSource::Network)));
  }
  write_record_log(out_path, records);

  ordered_json j;
  j["parsed"] = items.size();
  j["decoded"] = records.size();
  j["decode_errors"] = errors;
  std::cout << j.dump() << '\n';
  return kExitOk;
}

int cmd_report(const std::string& kind_name, const std::string& log_path,
               const std::string& catalog_path, const std::string& out_path,
               const std::vector<std::string>& filters,
               std::uint64_t prov_bytes_arg, std::uint64_t data_bytes_arg) {
  QueryFilter filter = parse_filters(filters);

  std::vector<ProvRecord> records;
  std::size_t log_bytes = 0;
  if (!log_path.empty()) {
    for (auto& r : read_record_log(log_path)) {
      log_bytes += serialize_record(r).size() + 1;
      if (filter.matches(r)) records.push_back(std::move(r));
    }
  }
  std::optional<ResourceCatalog> catalog;
  if (!catalog_path.empty()) catalog = read_catalog(catalog_path);

  // corpus_summary is a CLI-level convenience over catalog + log.
  if (kind_name == "corpus_summary") {
    if (!catalog) throw std::runtime_error("corpus_summary needs --catalog");
    std::set<std::string> users;
    for (const auto& r : records) users.insert(r.user_id);
    std::string csv = "spaces,collections,datasets,files,users\n";
    csv += std::to_string(catalog->count(ResourceKind::Space)) + "," +
           std::to_string(catalog->count(ResourceKind::Collection)) + "," +
           std::to_string(catalog->count(ResourceKind::Dataset)) + "," +
           std::to_string(catalog->count(ResourceKind::File)) + "," +
           std::to_string(users.size()) + "\n";
    if (!out_path.empty()) {
      std::ofstream out(out_path, std::ios::trunc);
      out << csv;
    }
    std::cout << csv;
    return kExitOk;
  }

  auto kind = report_kind_from_string(kind_name);
  if (!kind) throw std::runtime_error("unknown report kind " + kind_name);

  ReportContext ctx;
  ctx.generated_at = now_utc_millis();
  if (catalog) ctx.catalog = &*catalog;
  if (*kind == ReportKind::Overhead) {
    ctx.prov_bytes = prov_bytes_arg ? prov_bytes_arg : log_bytes;
    if (data_bytes_arg == 0)
      throw std::runtime_error("overhead needs --data-bytes");
    ctx.data_bytes = data_bytes_arg;
  }

  Report report = build_report(records, *kind, ctx);
  std::string path = out_path.empty()
                         ? kind_name + "-" +
                               compact_timestamp(ctx.generated_at) + ".csv"
                         : out_path;
  {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write report " + path);
    out << report_to_csv(report);
  }
  std::cout << report_to_json(report) << '\n';
  return kExitOk;
}

int cmd_validate(const std::string& log_path, const std::string& catalog_path) {
  int problems = 0;
  if (!log_path.empty()) {
    EventTypeRegistry registry = default_event_registry();
    std::size_t count = 0;
    for (const auto& r : read_record_log(log_path)) {
      ++count;
      ValidationResult check =
          validate_record(serialize_record(r), registry);
      if (!check.ok()) {
        for (const auto& e : check.errors)
          std::cerr << log_path << ": record " << r.id << ": " << e.field
                    << ": " << e.message << '\n';
        ++problems;
      }
    }
    std::cout << "records: " << count << '\n';
  }
  if (!catalog_path.empty()) {
    // read_catalog already enforces the forest invariants.
    ResourceCatalog catalog = read_catalog(catalog_path);
    std::cout << "catalog nodes: " << catalog.size() << '\n';
  }
  return problems == 0 ? kExitOk : kExitInputError;
}

int cmd_serve(const std::string& config_path) {
  std::string path = config_path;
  if (path.empty()) {
    const char* env = std::getenv(kConfigEnvVar);
    if (env) path = env;
  }
  if (path.empty())
    throw std::runtime_error("no config: pass --config or set PROVLET_CONFIG");

  ServiceCore core(load_service_config(path));
  HttpServer server(core);
  int port = server.bind(core.config().listen_address, core.config().port);
  if (port < 0)
    throw std::runtime_error("cannot bind " + core.config().listen_address +
                             ":" + std::to_string(core.config().port));
  g_core = &core;
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  std::cout << "listening on " << core.config().listen_address << ":" << port
            << std::endl;
  server.listen();
  core.flush();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"provenance store, analytics, and service for long-tail lab data"};
  app.require_subcommand(1);

  std::uint64_t seed = 42;
  std::string profile_path, out_path, config_path, log_path, catalog_path;
  std::string in_path, kind;
  std::vector<std::string> filters;
  std::uint64_t prov_bytes = 0, data_bytes = 0;

  auto* gen = app.add_subcommand("gen-corpus", "generate a synthetic corpus");
  gen->add_option("--seed", seed, "rng seed");
  gen->add_option("--profile", profile_path, "profile json ('default' ok)");
  gen->add_option("--out", out_path, "output directory")->required();

  auto* replay = app.add_subcommand("replay", "rebuild a store from a log");
  replay->add_option("--config", config_path, "service config json")->required();
  replay->add_option("--log", log_path, "event log to replay")->required();
  replay->add_option("--out", out_path, "write surviving records here");

  auto* pcap = app.add_subcommand("ingest-pcap", "capture file -> record log");
  pcap->add_option("--in", in_path, "capture file")->required();
  pcap->add_option("--out", out_path, "output record log")->required();
  pcap->add_option("--config", config_path, "config with ip_users table");

  auto* report = app.add_subcommand("report", "run an aggregation report");
  report->add_option("--kind", kind, "report kind")->required();
  report->add_option("--log", log_path, "event log");
  report->add_option("--catalog", catalog_path, "catalog file");
  report->add_option("--out", out_path, "csv output path");
  report->add_option("--filter", filters, "key=value, repeatable");
  report->add_option("--prov-bytes", prov_bytes, "overhead numerator");
  report->add_option("--data-bytes", data_bytes, "overhead denominator");

  auto* validate = app.add_subcommand("validate", "check logs and catalogs");
  validate->add_option("--log", log_path, "event log");
  validate->add_option("--catalog", catalog_path, "catalog file");

  auto* serve = app.add_subcommand("serve", "run the ingest/query service");
  serve->add_option("--config", config_path,
                    "service config json (or PROVLET_CONFIG)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_corpus(seed, profile_path, out_path);
    if (replay->parsed()) return cmd_replay(config_path, log_path, out_path);
    if (pcap->parsed()) return cmd_ingest_pcap(in_path, out_path, config_path);
    if (report->parsed())
      return cmd_report(kind, log_path, catalog_path, out_path, filters,
                        prov_bytes, data_bytes);
    if (validate->parsed()) return cmd_validate(log_path, catalog_path);
    if (serve->parsed()) return cmd_serve(config_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInternalError;
}
