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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "provlet/access.hpp"
#include "provlet/corpus.hpp"
#include "provlet/journal.hpp"
#include "provlet/netparse.hpp"
#include "provlet/query.hpp"
#include "provlet/store.hpp"

namespace py = pybind11;
using namespace provlet;

namespace {

EventTypeConfig to_config(const std::map<std::string, Priority>& entries) {
  EventTypeConfig cfg;
  cfg.entries = entries;
  return cfg;
}

ReportKind parse_kind(const std::string& name) {
  auto kind = report_kind_from_string(name);
  if (!kind) throw py::value_error("unknown report kind: " + name);
  return *kind;
}

Report make_report(const std::vector<ProvRecord>& records,
                   const std::string& kind, const ResourceCatalog* catalog,
                   std::optional<std::uint64_t> prov_bytes,
                   std::optional<std::uint64_t> data_bytes,
                   TimestampMs generated_at) {
  ReportContext ctx;
  ctx.catalog = catalog;
  ctx.prov_bytes = prov_bytes;
  ctx.data_bytes = data_bytes;
  ctx.generated_at = generated_at;
  return build_report(records, parse_kind(kind), ctx);
}

py::dict packet_to_dict(const DecodedPacket& p) {
  py::dict d;
  d["ts"] = p.ts;
  d["src_ip"] = p.src_ip;
  d["dst_ip"] = p.dst_ip;
  d["src_port"] = p.src_port;
  d["dst_port"] = p.dst_port;
  d["protocol"] = p.protocol_name();
  d["ip_proto"] = p.ip_proto;
  d["length"] = p.length;
  d["extra"] = p.extra;
  return d;
}

std::span<const std::uint8_t> as_span(const py::bytes& data) {
  std::string_view view = data;
  return {reinterpret_cast<const std::uint8_t*>(view.data()), view.size()};
}

}  // namespace

PYBIND11_MODULE(_provlet, m) {
  m.doc() = "provenance store, analytics, and capture parsing";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<CatalogError>(m, "CatalogError", PyExc_ValueError);
  py::register_exception<UnknownType>(m, "UnknownType", PyExc_KeyError);
  py::register_exception<Denied>(m, "Denied", PyExc_PermissionError);

  py::enum_<Priority>(m, "Priority")
      .value("LPR", Priority::Lpr)
      .value("MPR", Priority::Mpr)
      .value("HPR", Priority::Hpr);

  py::enum_<Role>(m, "Role")
      .value("ADMIN", Role::Admin)
      .value("REGULAR", Role::Regular);

  py::enum_<RecordSource>(m, "RecordSource")
      .value("APP", RecordSource::App)
      .value("NETWORK", RecordSource::Network);

  py::enum_<ResourceKind>(m, "ResourceKind")
      .value("SPACE", ResourceKind::Space)
      .value("COLLECTION", ResourceKind::Collection)
      .value("DATASET", ResourceKind::Dataset)
      .value("FILE", ResourceKind::File)
      .value("USER", ResourceKind::User);

  py::class_<ResourceRef>(m, "ResourceRef")
      .def(py::init([](ResourceKind kind, std::string id,
                       std::optional<std::string> name) {
             return ResourceRef{kind, std::move(id), std::move(name)};
           }),
           py::arg("kind"), py::arg("id"), py::arg("name") = py::none())
      .def_readwrite("kind", &ResourceRef::kind)
      .def_readwrite("id", &ResourceRef::id)
      .def_readwrite("name", &ResourceRef::display_name)
      .def("__eq__", [](const ResourceRef& a, const ResourceRef& b) {
        return a == b;
      });

  py::class_<ProvRecord>(m, "ProvRecord")
      .def(py::init([](std::string id, TimestampMs ts, std::string user,
                       std::string event_type,
                       std::optional<ResourceRef> object,
                       std::map<std::string, AttrValue> attrs,
                       RecordSource source) {
             ProvRecord r;
             r.id = std::move(id);
             r.ts = ts;
             r.user_id = std::move(user);
             r.event_type = std::move(event_type);
             r.object = std::move(object);
             r.attrs = std::move(attrs);
             r.source = source;
             return r;
           }),
           py::arg("id") = "", py::arg("ts") = 0, py::arg("user") = "",
           py::arg("event_type") = "", py::arg("object") = py::none(),
           py::arg("attrs") = std::map<std::string, AttrValue>{},
           py::arg("source") = RecordSource::App)
      .def_readwrite("id", &ProvRecord::id)
      .def_readwrite("ts", &ProvRecord::ts)
      .def_readwrite("user", &ProvRecord::user_id)
      .def_readwrite("event_type", &ProvRecord::event_type)
      .def_readwrite("object", &ProvRecord::object)
      .def_readwrite("attrs", &ProvRecord::attrs)
      .def_readwrite("source", &ProvRecord::source)
      .def("__eq__", [](const ProvRecord& a, const ProvRecord& b) {
        return a == b;
      })
      .def("__repr__", &serialize_record);

  m.def("serialize_record", &serialize_record, py::arg("record"));
  m.def("deserialize_record", &deserialize_record, py::arg("line"));
  m.def("parse_rfc3339", [](const std::string& text) {
    return parse_rfc3339(text);
  });
  m.def("format_rfc3339", &format_rfc3339, py::arg("ts"));
  m.def("default_event_registry", [] {
    return default_event_registry();
  });

  m.def(
      "validate_record",
      [](const std::string& raw_json) {
        ValidationResult res = validate_record(raw_json,
                                               default_event_registry());
        py::list errors;
        for (const auto& e : res.errors) {
          py::dict d;
          d["field"] = e.field;
          d["message"] = e.message;
          errors.append(d);
        }
        return py::make_tuple(res.record, errors);
      },
      py::arg("raw_json"),
      "Returns (record, errors); record is None when errors is non-empty.");

  py::class_<StoreConfig>(m, "StoreConfig")
      .def(py::init([](std::size_t pdb_bytes,
                       std::map<std::string, Priority> req_events,
                       bool archive_enabled) {
             StoreConfig cfg;
             cfg.pdb_bytes = pdb_bytes;
             cfg.req_events = to_config(req_events);
             cfg.archive_enabled = archive_enabled;
             return cfg;
           }),
           py::arg("pdb_bytes"),
           py::arg("req_events") = std::map<std::string, Priority>{},
           py::arg("archive_enabled") = true)
      .def_readwrite("pdb_bytes", &StoreConfig::pdb_bytes)
      .def_readwrite("archive_enabled", &StoreConfig::archive_enabled)
      .def_property(
          "req_events",
          [](const StoreConfig& cfg) { return cfg.req_events.entries; },
          [](StoreConfig& cfg, std::map<std::string, Priority> entries) {
            cfg.req_events = to_config(std::move(entries));
          });

  py::class_<QueryFilter>(m, "QueryFilter")
      .def(py::init([](std::optional<std::string> event_type,
                       std::optional<std::string> user,
                       std::optional<std::string> object,
                       std::optional<TimestampMs> ts_from,
                       std::optional<TimestampMs> ts_to) {
             QueryFilter f;
             f.event_type = std::move(event_type);
             f.user_id = std::move(user);
             f.object_id = std::move(object);
             f.ts_from = ts_from;
             f.ts_to = ts_to;
             return f;
           }),
           py::arg("event_type") = py::none(), py::arg("user") = py::none(),
           py::arg("object") = py::none(), py::arg("ts_from") = py::none(),
           py::arg("ts_to") = py::none())
      .def("matches", &QueryFilter::matches, py::arg("record"));

  py::class_<Alert>(m, "Alert")
      .def_readonly("ts", &Alert::ts)
      .def_readonly("current_size", &Alert::current_size)
      .def_readonly("pdb_bytes", &Alert::pdb_bytes)
      .def_readonly("record_id", &Alert::record_id)
      .def_readonly("detail", &Alert::detail);

  py::class_<BoundedStore>(m, "BoundedStore")
      .def(py::init<>())
      .def(
          "append_record",
          [](BoundedStore& store, const StoreConfig& cfg,
             const ProvRecord& record) {
            AppendOutcome out = store.append_record(cfg, record);
            py::dict d;
            d["status"] = std::string(to_string(out.status));
            d["evicted"] = out.evicted;
            d["archived"] = out.archived;
            if (!out.error.empty()) d["error"] = out.error;
            return d;
          },
          py::arg("config"), py::arg("record"))
      .def("retrieve", &BoundedStore::retrieve,
           py::arg("filter") = QueryFilter{})
      .def("enforce_cap", &BoundedStore::enforce_cap, py::arg("config"))
      .def("snapshot", &BoundedStore::snapshot)
      .def("serialized_image", &BoundedStore::serialized_image)
      .def("contains", &BoundedStore::contains, py::arg("record_id"))
      .def("alerts",
           [](const BoundedStore& store) {
             return std::vector<Alert>(store.alerts().begin(),
                                       store.alerts().end());
           })
      .def("type_counts", &BoundedStore::type_counts)
      .def_property_readonly("size", &BoundedStore::size)
      .def_property_readonly("serialized_size", &BoundedStore::serialized_size);

  m.def(
      "review_events",
      [](const std::map<std::string, Priority>& req_events,
         const std::map<std::string, std::uint64_t>& type_counts) {
        return review_events(to_config(req_events), type_counts).entries;
      },
      py::arg("req_events"), py::arg("type_counts"));

  // Aggregations.
  m.def("events_per_year", [](const std::vector<ProvRecord>& records) {
    return events_per_year(records);
  });
  m.def("active_users_per_year", [](const std::vector<ProvRecord>& records) {
    return active_users_per_year(records);
  });
  m.def(
      "type_histogram",
      [](const std::vector<ProvRecord>& records,
         std::optional<std::size_t> top_n) {
        return type_histogram(records, top_n);
      },
      py::arg("records"), py::arg("top_n") = py::none());
  m.def(
      "overhead",
      [](std::uint64_t prov_bytes, std::uint64_t data_bytes) {
        OverheadResult r = overhead(prov_bytes, data_bytes);
        py::dict d;
        d["ratio"] = r.ratio;
        d["percent"] = r.percent;
        d["ratio_3sf"] = r.ratio_3sf;
        d["percent_3sf"] = r.percent_3sf;
        return d;
      },
      py::arg("prov_bytes"), py::arg("data_bytes"));

  m.def(
      "report_csv",
      [](const std::vector<ProvRecord>& records, const std::string& kind,
         const ResourceCatalog* catalog,
         std::optional<std::uint64_t> prov_bytes,
         std::optional<std::uint64_t> data_bytes, TimestampMs generated_at) {
        return report_to_csv(make_report(records, kind, catalog, prov_bytes,
                                         data_bytes, generated_at));
      },
      py::arg("records"), py::arg("kind"), py::arg("catalog") = nullptr,
      py::arg("prov_bytes") = py::none(), py::arg("data_bytes") = py::none(),
      py::arg("generated_at") = 0);
  m.def(
      "report_json",
      [](const std::vector<ProvRecord>& records, const std::string& kind,
         const ResourceCatalog* catalog,
         std::optional<std::uint64_t> prov_bytes,
         std::optional<std::uint64_t> data_bytes, TimestampMs generated_at) {
        return report_to_json(make_report(records, kind, catalog, prov_bytes,
                                          data_bytes, generated_at));
      },
      py::arg("records"), py::arg("kind"), py::arg("catalog") = nullptr,
      py::arg("prov_bytes") = py::none(), py::arg("data_bytes") = py::none(),
      py::arg("generated_at") = 0);

  // Catalog.
  py::class_<ResourceCatalog>(m, "ResourceCatalog")
      .def(py::init<>())
      .def(
          "add",
          [](ResourceCatalog& cat, const ResourceRef& ref,
             TimestampMs created_at, TimestampMs last_updated_at,
             std::optional<ResourceRef> parent) {
            CatalogNode node;
            node.ref = ref;
            node.created_at = created_at;
            node.last_updated_at = last_updated_at;
            node.parent = std::move(parent);
            cat.add(std::move(node));
          },
          py::arg("ref"), py::arg("created_at"), py::arg("last_updated_at"),
          py::arg("parent") = py::none())
      .def("contains", &ResourceCatalog::contains, py::arg("ref"))
      .def("resource_chain", &ResourceCatalog::resource_chain, py::arg("ref"))
      .def("validate", &ResourceCatalog::validate)
      .def("count", &ResourceCatalog::count, py::arg("kind"))
      .def_property_readonly("size", &ResourceCatalog::size);

  m.def(
      "project_durations",
      [](const ResourceCatalog& catalog) {
        py::list out;
        for (const auto& s : project_durations(catalog)) {
          py::dict d;
          d["start_year"] = s.start_year;
          d["min_days"] = s.min_days;
          d["max_days"] = s.max_days;
          d["mean_days"] = s.mean_days;
          d["projects"] = s.project_count;
          out.append(d);
        }
        return out;
      },
      py::arg("catalog"));

  // Corpus.
  py::class_<CorpusProfile>(m, "CorpusProfile")
      .def(py::init<>())
      .def_readwrite("spaces", &CorpusProfile::spaces)
      .def_readwrite("collections", &CorpusProfile::collections)
      .def_readwrite("datasets", &CorpusProfile::datasets)
      .def_readwrite("files", &CorpusProfile::files)
      .def_readwrite("users", &CorpusProfile::users)
      .def_readwrite("start_year", &CorpusProfile::start_year)
      .def_readwrite("end_year", &CorpusProfile::end_year)
      .def_readwrite("extra_events", &CorpusProfile::extra_events)
      .def_readwrite("update_dataset_share",
                     &CorpusProfile::update_dataset_share)
      .def_readwrite("year_weights", &CorpusProfile::year_weights);

  py::class_<UserInfo>(m, "UserInfo")
      .def_readonly("user_id", &UserInfo::user_id)
      .def_readonly("role", &UserInfo::role);

  py::class_<Corpus>(m, "Corpus")
      .def_readonly("catalog", &Corpus::catalog)
      .def_readonly("events", &Corpus::events)
      .def_readonly("users", &Corpus::users);

  m.def("gen_corpus", &gen_corpus, py::arg("seed"),
        py::arg("profile") = CorpusProfile{});

  // Capture parsing.
  m.def(
      "parse_pcap",
      [](const py::bytes& data) {
        py::list out;
        for (const auto& item : parse_pcap(as_span(data))) {
          py::dict d;
          d["index"] = item.index;
          if (item.ok()) {
            d["packet"] = packet_to_dict(item.packet());
          } else {
            d["error"] = item.error().message;
          }
          out.append(d);
        }
        return out;
      },
      py::arg("data"));
  m.def(
      "pcap_to_records",
      [](const py::bytes& data,
         const std::map<std::string, std::string>& ip_to_user) {
        IdAllocator ids;
        std::vector<ProvRecord> records;
        for (const auto& item : parse_pcap(as_span(data))) {
          if (!item.ok()) continue;
          std::optional<std::string> attribution;
          if (auto it = ip_to_user.find(item.packet().src_ip);
              it != ip_to_user.end())
            attribution = it->second;
          records.push_back(to_prov_record(item.packet(), attribution,
                                           ids.next(RecordSource::Network)));
        }
        return records;
      },
      py::arg("data"),
      py::arg("ip_to_user") = std::map<std::string, std::string>{});

  // Journals and replay.
  m.def("read_record_log", &read_record_log, py::arg("path"));
  m.def("write_record_log", &write_record_log, py::arg("path"),
        py::arg("records"));
  m.def("read_catalog", &read_catalog, py::arg("path"));
  m.def("write_catalog", &write_catalog, py::arg("path"), py::arg("catalog"));
  m.def(
      "replay_log_file",
      [](const std::string& path, const StoreConfig& cfg) {
        ReplayResult result = replay_log_file(path, cfg);
        py::dict d;
        d["lines"] = result.lines;
        d["outcomes"] = result.outcomes;
        d["record_count"] = result.store.size();
        d["serialized_size"] = result.store.serialized_size();
        d["records"] = result.store.snapshot();
        return d;
      },
      py::arg("path"), py::arg("config"));

  // Access control.
  m.def(
      "visible_records",
      [](const std::string& user, Role role,
         const std::vector<ProvRecord>& records) {
        return visible_records(AccessContext{{user, role}}, records);
      },
      py::arg("user"), py::arg("role"), py::arg("records"));
  m.def(
      "scoped_filter",
      [](const std::string& user, Role role, const QueryFilter& filter) {
        return scoped_filter(AccessContext{{user, role}}, filter);
      },
      py::arg("user"), py::arg("role"), py::arg("filter") = QueryFilter{});
}
