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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "provlet/errors.hpp"
#include "provlet/time_utils.hpp"

namespace provlet {

// ---------------------------------------------------------------------------
// Resource hierarchy
// ---------------------------------------------------------------------------

enum class ResourceKind { Space, Collection, Dataset, File, User };

const char* to_string(ResourceKind kind);
std::optional<ResourceKind> resource_kind_from_string(const std::string& s);

struct ResourceRef {
  ResourceKind kind = ResourceKind::File;
  std::string id;
  std::optional<std::string> display_name;

  bool operator==(const ResourceRef& other) const {
    return kind == other.kind && id == other.id &&
           display_name == other.display_name;
  }
};

struct CatalogNode {
  ResourceRef ref;
  TimestampMs created_at = 0;
  TimestampMs last_updated_at = 0;
  std::optional<ResourceRef> parent;
};

// The space -> collection(*) -> dataset -> file forest. Nodes are keyed by
// (kind, id). Insertion tolerates dangling parents so catalogs can be loaded
// from disk in any order; validate() checks the full forest invariants.
class ResourceCatalog {
 public:
  // Throws CatalogError on a locally-invalid node (bad kind/parent-kind
  // pairing, created_at > last_updated_at, duplicate id within kind).
  void add(CatalogNode node);

  const CatalogNode* find(ResourceKind kind, const std::string& id) const;
  bool contains(const ResourceRef& ref) const;

  // [ref, parent, ..., space]. Throws UnknownResource / BrokenChain.
  std::vector<ResourceRef> resource_chain(const ResourceRef& ref) const;

  // Full invariant check: every non-space node has a present parent, no
  // cycles. Returns human-readable violations, empty when valid.
  std::vector<std::string> validate() const;

  std::size_t size() const { return nodes_.size(); }
  std::size_t count(ResourceKind kind) const;

  // Deterministic iteration (sorted by kind then id).
  const std::map<std::string, CatalogNode>& nodes() const { return nodes_; }

  static std::string key(ResourceKind kind, const std::string& id);

 private:
  std::map<std::string, CatalogNode> nodes_;
};

// One catalog node per line, canonical key order; inverse of
// deserialize_catalog_node. Whole-catalog helpers live in journal.hpp.
std::string serialize_catalog_node(const CatalogNode& node);
CatalogNode deserialize_catalog_node(const std::string& line);

// ---------------------------------------------------------------------------
// Users, event taxonomy, priorities
// ---------------------------------------------------------------------------

enum class Role { Admin, Regular };

struct UserInfo {
  std::string user_id;
  Role role = Role::Regular;
};

// User id reserved for network records with no IP attribution.
inline const std::string kUnattributedUser = "unattributed";

// Event type names are lowercase snake case: [a-z][a-z0-9_]*
bool valid_event_type_name(const std::string& name);

enum class Priority : int { Lpr = 1, Mpr = 2, Hpr = 3 };

const char* to_string(Priority p);
std::optional<Priority> priority_from_string(const std::string& s);

// req-events: the admin's requested types with priorities. The sole filter
// deciding recordability; absent types are never recorded.
struct EventTypeConfig {
  std::map<std::string, Priority> entries;

  bool requested(const std::string& type) const {
    return entries.count(type) != 0;
  }
};

// All event types known to the deployment (validation registry).
using EventTypeRegistry = std::set<std::string>;

// The default 33-type registry. "update_dataset_information" is included
// verbatim; "network_packet" is the type of all network-stream records.
EventTypeRegistry default_event_registry();

inline const std::string kNetworkPacketType = "network_packet";

// ---------------------------------------------------------------------------
// Provenance records
// ---------------------------------------------------------------------------

using AttrValue = std::variant<std::string, std::int64_t, double, bool>;

enum class RecordSource { App, Network };

const char* to_string(RecordSource s);

struct ProvRecord {
  std::string id;
  TimestampMs ts = 0;
  std::string user_id;
  std::optional<ResourceRef> object;
  std::string event_type;
  std::map<std::string, AttrValue> attrs;
  RecordSource source = RecordSource::App;

  bool operator==(const ProvRecord& other) const = default;
};

enum class ValidationCode {
  MissingField,
  BadTimestamp,
  UnknownEventType,
  BadObjectKind,
  BadField,
};

struct ValidationError {
  ValidationCode code;
  std::string field;
  std::string message;
};

struct ValidationResult {
  std::optional<ProvRecord> record;  // set iff errors empty
  std::vector<ValidationError> errors;

  bool ok() const { return errors.empty(); }
};

// Validates a parsed key/value document against the record schema and the
// type registry. The id field may be absent; ingest assigns one before the
// record reaches the store.
ValidationResult validate_record(const std::string& raw_json,
                                 const EventTypeRegistry& registry);

// Canonical one-line form: UTF-8 JSON, key order
// (id, ts, user, object, type, attrs, source), attrs keys sorted,
// timestamps RFC 3339. Deterministic byte-for-byte.
std::string serialize_record(const ProvRecord& r);

// Inverse of serialize_record. Throws ParseError with a byte offset.
ProvRecord deserialize_record(const std::string& line);

// Assigns ingest-order ids: "a-000017" for app, "n-000042" for network.
class IdAllocator {
 public:
  std::string next(RecordSource source);

  // Moves the counters past an already-used id (journal replay at startup).
  void advance_past(const std::string& id);

 private:
  std::uint64_t app_ = 0;
  std::uint64_t net_ = 0;
};

}  // namespace provlet
