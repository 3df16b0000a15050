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

#include "provlet/model.hpp"

#include <arpa/inet.h>

#include <cstdio>
#include <cstdlib>

#include <json.hpp>

namespace provlet {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Enums
// ---------------------------------------------------------------------------

const char* to_string(ResourceKind kind) {
  switch (kind) {
    case ResourceKind::Space: return "space";
    case ResourceKind::Collection: return "collection";
    case ResourceKind::Dataset: return "dataset";
    case ResourceKind::File: return "file";
    case ResourceKind::User: return "user";
  }
  return "?";
}

std::optional<ResourceKind> resource_kind_from_string(const std::string& s) {
  if (s == "space") return ResourceKind::Space;
  if (s == "collection") return ResourceKind::Collection;
  if (s == "dataset") return ResourceKind::Dataset;
  if (s == "file") return ResourceKind::File;
  if (s == "user") return ResourceKind::User;
  return std::nullopt;
}

const char* to_string(Priority p) {
  switch (p) {
    case Priority::Hpr: return "hpr";
    case Priority::Mpr: return "mpr";
    case Priority::Lpr: return "lpr";
  }
  return "?";
}

std::optional<Priority> priority_from_string(const std::string& s) {
  if (s == "hpr") return Priority::Hpr;
  if (s == "mpr") return Priority::Mpr;
  if (s == "lpr") return Priority::Lpr;
  return std::nullopt;
}

const char* to_string(RecordSource s) {
  return s == RecordSource::App ? "app" : "network";
}

bool valid_event_type_name(const std::string& name) {
  if (name.empty()) return false;
  if (name[0] < 'a' || name[0] > 'z') return false;
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

EventTypeRegistry default_event_registry() {
  EventTypeRegistry reg;
  static const char* kVerbs[] = {"create", "update",   "delete", "view",
                                 "download", "share", "move"};
  static const char* kKinds[] = {"space", "collection", "dataset", "file"};
  for (const char* verb : kVerbs) {
    for (const char* kind : kKinds) {
      reg.insert(std::string(verb) + "_" + kind);
    }
  }
  reg.insert("update_dataset_information");
  reg.insert("upload_file");
  reg.insert("login");
  reg.insert("logout");
  reg.insert(kNetworkPacketType);
  return reg;  // 33 types
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

std::string ResourceCatalog::key(ResourceKind kind, const std::string& id) {
  return std::string(to_string(kind)) + "/" + id;
}

void ResourceCatalog::add(CatalogNode node) {
  const std::string k = key(node.ref.kind, node.ref.id);
  if (node.ref.id.empty()) throw CatalogError("empty resource id");
  if (node.ref.kind == ResourceKind::User)
    throw CatalogError("user nodes do not belong in the resource catalog");
  if (nodes_.count(k)) throw CatalogError("duplicate resource " + k);
  if (node.created_at > node.last_updated_at)
    throw CatalogError("created_at after last_updated_at for " + k);

  if (node.ref.kind == ResourceKind::Space) {
    if (node.parent) throw CatalogError("space " + node.ref.id + " has a parent");
  } else {
    if (!node.parent)
      throw CatalogError(k + " has no parent");
    ResourceKind pk = node.parent->kind;
    bool ok = false;
    switch (node.ref.kind) {
      case ResourceKind::Collection:
        ok = pk == ResourceKind::Collection || pk == ResourceKind::Space;
        break;
      case ResourceKind::Dataset:
        ok = pk == ResourceKind::Collection;
        break;
      case ResourceKind::File:
        ok = pk == ResourceKind::Dataset;
        break;
      default:
        break;
    }
    if (!ok)
      throw CatalogError(k + ": invalid parent kind " +
                         to_string(pk));
  }
  nodes_.emplace(k, std::move(node));
}

const CatalogNode* ResourceCatalog::find(ResourceKind kind,
                                         const std::string& id) const {
  auto it = nodes_.find(key(kind, id));
  return it == nodes_.end() ? nullptr : &it->second;
}

bool ResourceCatalog::contains(const ResourceRef& ref) const {
  return nodes_.count(key(ref.kind, ref.id)) != 0;
}

std::size_t ResourceCatalog::count(ResourceKind kind) const {
  std::size_t n = 0;
  for (const auto& [k, node] : nodes_) {
    if (node.ref.kind == kind) ++n;
  }
  return n;
}

std::vector<ResourceRef> ResourceCatalog::resource_chain(
    const ResourceRef& ref) const {
  const CatalogNode* node = find(ref.kind, ref.id);
  if (!node) throw UnknownResource(key(ref.kind, ref.id));
  std::vector<ResourceRef> chain;
  std::size_t steps = 0;
  while (true) {
    chain.push_back(node->ref);
    if (!node->parent) break;
    const CatalogNode* parent = find(node->parent->kind, node->parent->id);
    if (!parent)
      throw BrokenChain(node->ref.id, node->parent->id);
    node = parent;
    if (++steps > nodes_.size())
      throw CatalogError("parent cycle involving " + node->ref.id);
  }
  return chain;
}

std::vector<std::string> ResourceCatalog::validate() const {
  std::vector<std::string> problems;
  for (const auto& [k, node] : nodes_) {
    try {
      auto chain = resource_chain(node.ref);
      if (chain.back().kind != ResourceKind::Space)
        problems.push_back(k + ": chain does not end at a space");
    } catch (const std::exception& e) {
      problems.push_back(k + ": " + e.what());
    }
  }
  return problems;
}

std::string serialize_catalog_node(const CatalogNode& node) {
  ordered_json j;
  j["kind"] = to_string(node.ref.kind);
  j["id"] = node.ref.id;
  if (node.ref.display_name) j["name"] = *node.ref.display_name;
  j["created"] = format_rfc3339(node.created_at);
  j["updated"] = format_rfc3339(node.last_updated_at);
  if (node.parent) {
    j["parent_kind"] = to_string(node.parent->kind);
    j["parent_id"] = node.parent->id;
  }
  return j.dump();
}

CatalogNode deserialize_catalog_node(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), e.byte > 0 ? e.byte - 1 : 0);
  }
  if (!j.is_object()) throw ParseError("catalog line is not an object", 0);
  CatalogNode node;
  auto kind = resource_kind_from_string(j.value("kind", ""));
  if (!kind) throw ParseError("bad catalog kind", 0);
  node.ref.kind = *kind;
  node.ref.id = j.value("id", "");
  if (node.ref.id.empty()) throw ParseError("missing catalog id", 0);
  if (j.contains("name")) node.ref.display_name = j["name"].get<std::string>();
  auto created = parse_rfc3339(j.value("created", ""));
  auto updated = parse_rfc3339(j.value("updated", ""));
  if (!created || !updated) throw ParseError("bad catalog timestamp", 0);
  node.created_at = *created;
  node.last_updated_at = *updated;
  if (j.contains("parent_id")) {
    ResourceRef parent;
    auto pk = resource_kind_from_string(j.value("parent_kind", ""));
    if (!pk) throw ParseError("bad catalog parent kind", 0);
    parent.kind = *pk;
    parent.id = j["parent_id"].get<std::string>();
    node.parent = parent;
  }
  return node;
}

// ---------------------------------------------------------------------------
// Record serialization
// ---------------------------------------------------------------------------

namespace {

ordered_json attr_to_json(const AttrValue& v) {
  return std::visit([](const auto& x) { return ordered_json(x); }, v);
}

std::optional<AttrValue> attr_from_json(const json& j) {
  if (j.is_string()) return AttrValue(j.get<std::string>());
  if (j.is_boolean()) return AttrValue(j.get<bool>());
  if (j.is_number_integer() || j.is_number_unsigned())
    return AttrValue(j.get<std::int64_t>());
  if (j.is_number_float()) return AttrValue(j.get<double>());
  return std::nullopt;
}

bool parses_as_ip(const std::string& s) {
  unsigned char buf[16];
  return inet_pton(AF_INET, s.c_str(), buf) == 1 ||
         inet_pton(AF_INET6, s.c_str(), buf) == 1;
}

}  // namespace

std::string serialize_record(const ProvRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["ts"] = format_rfc3339(r.ts);
  j["user"] = r.user_id;
  if (r.object) {
    ordered_json obj;
    obj["kind"] = to_string(r.object->kind);
    obj["id"] = r.object->id;
    if (r.object->display_name) obj["name"] = *r.object->display_name;
    j["object"] = std::move(obj);
  }
  j["type"] = r.event_type;
  if (!r.attrs.empty()) {
    ordered_json attrs;
    for (const auto& [k, v] : r.attrs) attrs[k] = attr_to_json(v);
    j["attrs"] = std::move(attrs);
  }
  j["source"] = to_string(r.source);
  return j.dump();
}

ProvRecord deserialize_record(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), e.byte > 0 ? e.byte - 1 : 0);
  }
  if (!j.is_object()) throw ParseError("record line is not an object", 0);

  ProvRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    auto ts = parse_rfc3339(j.at("ts").get<std::string>());
    if (!ts) throw ParseError("bad ts", 0);
    r.ts = *ts;
    r.user_id = j.at("user").get<std::string>();
    r.event_type = j.at("type").get<std::string>();
    if (j.contains("object")) {
      const json& obj = j["object"];
      ResourceRef ref;
      auto kind = resource_kind_from_string(obj.at("kind").get<std::string>());
      if (!kind) throw ParseError("bad object kind", 0);
      ref.kind = *kind;
      ref.id = obj.at("id").get<std::string>();
      if (obj.contains("name")) ref.display_name = obj["name"].get<std::string>();
      r.object = std::move(ref);
    }
    if (j.contains("attrs")) {
      for (const auto& [k, v] : j["attrs"].items()) {
        auto attr = attr_from_json(v);
        if (!attr) throw ParseError("non-scalar attr " + k, 0);
        r.attrs.emplace(k, std::move(*attr));
      }
    }
    std::string source = j.value("source", "app");
    if (source == "network") {
      r.source = RecordSource::Network;
    } else if (source == "app") {
      r.source = RecordSource::App;
    } else {
      throw ParseError("bad source " + source, 0);
    }
  } catch (const json::exception& e) {
    throw ParseError(e.what(), 0);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

ValidationResult validate_record(const std::string& raw_json,
                                 const EventTypeRegistry& registry) {
  ValidationResult result;
  auto fail = [&result](ValidationCode code, std::string field,
                        std::string message) {
    result.errors.push_back({code, std::move(field), std::move(message)});
  };

  json j = json::parse(raw_json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    fail(ValidationCode::BadField, "", "body is not a JSON object");
    return result;
  }

  ProvRecord r;

  if (j.contains("id")) {
    if (!j["id"].is_string() || j["id"].get<std::string>().empty()) {
      fail(ValidationCode::BadField, "id", "id must be a non-empty string");
    } else {
      r.id = j["id"].get<std::string>();
    }
  }
  // id may be absent: ingest assigns one before the store sees the record.

  if (!j.contains("ts")) {
    fail(ValidationCode::BadTimestamp, "ts", "ts absent");
  } else if (!j["ts"].is_string()) {
    fail(ValidationCode::BadTimestamp, "ts", "ts must be an RFC 3339 string");
  } else {
    auto ts = parse_rfc3339(j["ts"].get<std::string>());
    if (!ts) {
      fail(ValidationCode::BadTimestamp, "ts",
           "not a valid RFC 3339 timestamp: " + j["ts"].get<std::string>());
    } else {
      r.ts = *ts;
    }
  }

  if (!j.contains("user")) {
    fail(ValidationCode::MissingField, "user", "user absent");
  } else if (!j["user"].is_string() || j["user"].get<std::string>().empty()) {
    fail(ValidationCode::BadField, "user", "user must be a non-empty string");
  } else {
    r.user_id = j["user"].get<std::string>();
  }

  if (!j.contains("type")) {
    fail(ValidationCode::MissingField, "type", "type absent");
  } else if (!j["type"].is_string()) {
    fail(ValidationCode::BadField, "type", "type must be a string");
  } else {
    r.event_type = j["type"].get<std::string>();
    if (!valid_event_type_name(r.event_type)) {
      fail(ValidationCode::BadField, "type",
           "type must match [a-z][a-z0-9_]*: " + r.event_type);
    } else if (!registry.count(r.event_type)) {
      fail(ValidationCode::UnknownEventType, "type",
           "unregistered event type: " + r.event_type);
    }
  }

  if (j.contains("object")) {
    const json& obj = j["object"];
    if (!obj.is_object()) {
      fail(ValidationCode::BadField, "object", "object must be a map");
    } else {
      ResourceRef ref;
      std::string kind_str = obj.value("kind", "");
      auto kind = resource_kind_from_string(kind_str);
      if (!kind) {
        fail(ValidationCode::BadObjectKind, "object.kind",
             "not one of space/collection/dataset/file/user: " + kind_str);
      } else {
        ref.kind = *kind;
      }
      if (!obj.contains("id") || !obj["id"].is_string() ||
          obj["id"].get<std::string>().empty()) {
        fail(ValidationCode::BadField, "object.id",
             "object.id must be a non-empty string");
      } else {
        ref.id = obj["id"].get<std::string>();
      }
      if (obj.contains("name") && obj["name"].is_string())
        ref.display_name = obj["name"].get<std::string>();
      r.object = std::move(ref);
    }
  }

  if (j.contains("attrs")) {
    if (!j["attrs"].is_object()) {
      fail(ValidationCode::BadField, "attrs", "attrs must be a map");
    } else {
      for (const auto& [k, v] : j["attrs"].items()) {
        auto attr = attr_from_json(v);
        if (!attr) {
          fail(ValidationCode::BadField, "attrs." + k,
               "attr values must be scalars");
        } else {
          r.attrs.emplace(k, std::move(*attr));
        }
      }
    }
  }

  std::string source = j.value("source", "app");
  if (source == "network") {
    r.source = RecordSource::Network;
  } else if (source != "app") {
    fail(ValidationCode::BadField, "source", "source must be app or network");
  }

  if (r.source == RecordSource::Network) {
    auto require_attr = [&](const std::string& key) -> const AttrValue* {
      auto it = r.attrs.find(key);
      if (it == r.attrs.end()) {
        fail(ValidationCode::MissingField, "attrs." + key,
             key + " required for network records");
        return nullptr;
      }
      return &it->second;
    };
    if (const AttrValue* v = require_attr("src_ip")) {
      const auto* s = std::get_if<std::string>(v);
      if (!s || !parses_as_ip(*s))
        fail(ValidationCode::BadField, "attrs.src_ip",
             "src_ip must parse as an IP address");
    }
    if (const AttrValue* v = require_attr("dst")) {
      const auto* s = std::get_if<std::string>(v);
      if (!s || s->empty())
        fail(ValidationCode::BadField, "attrs.dst",
             "dst must be a non-empty string");
    }
    if (const AttrValue* v = require_attr("protocol")) {
      const auto* s = std::get_if<std::string>(v);
      if (!s || s->empty())
        fail(ValidationCode::BadField, "attrs.protocol",
             "protocol must be a non-empty string");
    }
    if (const AttrValue* v = require_attr("length")) {
      const auto* n = std::get_if<std::int64_t>(v);
      if (!n || *n < 0)
        fail(ValidationCode::BadField, "attrs.length",
             "length must be a non-negative integer");
    }
  }

  if (result.errors.empty()) result.record = std::move(r);
  return result;
}

std::string IdAllocator::next(RecordSource source) {
  char buf[24];
  if (source == RecordSource::App) {
    std::snprintf(buf, sizeof(buf), "a-%06llu",
                  static_cast<unsigned long long>(++app_));
  } else {
    std::snprintf(buf, sizeof(buf), "n-%06llu",
                  static_cast<unsigned long long>(++net_));
  }
  return buf;
}

void IdAllocator::advance_past(const std::string& id) {
  if (id.size() < 3 || id[1] != '-') return;
  char* end = nullptr;
  unsigned long long n = std::strtoull(id.c_str() + 2, &end, 10);
  if (end == id.c_str() + 2) return;
  if (id[0] == 'a' && n > app_) app_ = n;
  if (id[0] == 'n' && n > net_) net_ = n;
}

}  // namespace provlet
