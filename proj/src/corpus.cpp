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

#include "provlet/corpus.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <stdexcept>

namespace provlet {
namespace {

// splitmix64: tiny, stable across platforms (std:: distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n)
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  double unit() { return (next() >> 11) * (1.0 / 9007199254740992.0); }

  std::size_t weighted(const std::vector<double>& weights, std::size_t from,
                       std::size_t to) {
    double total = 0;
    for (std::size_t i = from; i < to; ++i) total += weights[i];
    double x = unit() * total;
    for (std::size_t i = from; i < to; ++i) {
      x -= weights[i];
      if (x <= 0) return i;
    }
    return to - 1;
  }

 private:
  std::uint64_t state_;
};

std::string padded_id(const char* prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%05zu", prefix, n);
  return buf;
}

struct Entity {
  ResourceRef ref;
  TimestampMs created_at;
  TimestampMs last_updated_at;
  std::optional<ResourceRef> parent;
};

// Index of a uniformly chosen entity already created at ts, assuming the
// vector is sorted by created_at. Returns npos when none qualify.
std::size_t pick_created_before(const std::vector<Entity>& entities,
                                TimestampMs ts, Rng& rng) {
  auto it = std::upper_bound(
      entities.begin(), entities.end(), ts,
      [](TimestampMs t, const Entity& e) { return t < e.created_at; });
  std::size_t n = static_cast<std::size_t>(it - entities.begin());
  if (n == 0) return static_cast<std::size_t>(-1);
  return rng.below(n);
}

}  // namespace

Corpus gen_corpus(std::uint64_t seed, const CorpusProfile& profile) {
  const int years = profile.end_year - profile.start_year + 1;
  if (static_cast<int>(profile.year_weights.size()) != years)
    throw std::invalid_argument("year_weights must cover start..end year");
  if (profile.spaces == 0 || profile.users == 0)
    throw std::invalid_argument("profile needs at least one space and user");
  if ((profile.datasets > 0 && profile.collections == 0) ||
      (profile.files > 0 && profile.datasets == 0))
    throw std::invalid_argument("hierarchy levels cannot skip a parent level");

  Rng rng(seed * 0x2545f4914f6cdd1dULL + 1);
  const TimestampMs window_start = utc_millis(profile.start_year, 1, 1);
  const TimestampMs window_end =
      utc_millis(profile.end_year, 12, 31, 23, 59, 59);

  auto sample_ts_in_year = [&](int year) {
    TimestampMs y0 = utc_millis(year, 1, 1);
    TimestampMs y1 = utc_millis(year + 1, 1, 1);
    return y0 + static_cast<TimestampMs>(
                    rng.below(static_cast<std::uint64_t>(y1 - y0)));
  };
  auto sample_ts_after = [&](TimestampMs floor_ts) {
    int min_year = std::max(year_of(floor_ts), profile.start_year);
    int idx = static_cast<int>(
        rng.weighted(profile.year_weights,
                     static_cast<std::size_t>(min_year - profile.start_year),
                     static_cast<std::size_t>(years)));
    TimestampMs ts = sample_ts_in_year(profile.start_year + idx);
    return std::max(ts, floor_ts);
  };

  Corpus corpus;
  for (std::size_t i = 0; i < profile.users; ++i) {
    corpus.users.push_back({padded_id("u", i + 1),
                            i == 0 ? Role::Admin : Role::Regular});
  }
  auto random_user = [&]() -> const std::string& {
    return corpus.users[rng.below(corpus.users.size())].user_id;
  };

  // --- entities, sorted by created_at within each level ---
  std::vector<Entity> spaces, collections, datasets, files;

  for (std::size_t i = 0; i < profile.spaces; ++i) {
    Entity e;
    e.ref = {ResourceKind::Space, padded_id("s", i + 1), std::nullopt};
    // The first space opens the window so every later timestamp has a home.
    e.created_at = i == 0 ? window_start + 86400000
                          : sample_ts_after(window_start);
    e.last_updated_at = e.created_at;
    spaces.push_back(std::move(e));
  }
  std::sort(spaces.begin(), spaces.end(),
            [](const Entity& a, const Entity& b) {
              return std::tie(a.created_at, a.ref.id) <
                     std::tie(b.created_at, b.ref.id);
            });

  for (std::size_t i = 0; i < profile.collections; ++i) {
    Entity e;
    e.ref = {ResourceKind::Collection, padded_id("c", i + 1), std::nullopt};
    // ~20% nest under an earlier collection, the rest sit under a space.
    TimestampMs probe = sample_ts_after(spaces.front().created_at);
    bool nested = !collections.empty() && rng.below(5) == 0;
    const std::vector<Entity>& pool = nested ? collections : spaces;
    std::size_t pi = pick_created_before(pool, probe, rng);
    if (pi == static_cast<std::size_t>(-1)) {
      pi = 0;
      probe = std::max(probe, pool[0].created_at);
    }
    e.parent = pool[pi].ref;
    e.created_at = std::max(probe, pool[pi].created_at);
    e.last_updated_at = e.created_at;
    collections.push_back(std::move(e));
    std::sort(collections.begin(), collections.end(),
              [](const Entity& a, const Entity& b) {
                return std::tie(a.created_at, a.ref.id) <
                       std::tie(b.created_at, b.ref.id);
              });
  }

  auto attach_level = [&](std::vector<Entity>& out, std::size_t count,
                          const char* prefix, ResourceKind kind,
                          const std::vector<Entity>& parents) {
    for (std::size_t i = 0; i < count; ++i) {
      Entity e;
      e.ref = {kind, padded_id(prefix, i + 1), std::nullopt};
      TimestampMs probe = sample_ts_after(parents.front().created_at);
      std::size_t pi = pick_created_before(parents, probe, rng);
      if (pi == static_cast<std::size_t>(-1)) {
        pi = 0;
        probe = std::max(probe, parents[0].created_at);
      }
      e.parent = parents[pi].ref;
      e.created_at = std::max(probe, parents[pi].created_at);
      e.last_updated_at = e.created_at;
      out.push_back(std::move(e));
    }
    std::sort(out.begin(), out.end(), [](const Entity& a, const Entity& b) {
      return std::tie(a.created_at, a.ref.id) <
             std::tie(b.created_at, b.ref.id);
    });
  };
  if (profile.datasets > 0)
    attach_level(datasets, profile.datasets, "d", ResourceKind::Dataset,
                 collections);
  if (profile.files > 0)
    attach_level(files, profile.files, "f", ResourceKind::File, datasets);

  // --- events ---
  struct PendingEvent {
    TimestampMs ts;
    std::uint64_t seq;  // generation order, tie-break for stable sort
    std::string user;
    std::string type;
    std::optional<ResourceRef> object;
    bool network = false;
  };
  std::vector<PendingEvent> pending;
  std::uint64_t seq = 0;

  auto creation_events = [&](const std::vector<Entity>& entities,
                             const std::string& type) {
    for (const auto& e : entities) {
      pending.push_back(
          {e.created_at, seq++, random_user(), type, e.ref, false});
    }
  };
  creation_events(spaces, "create_space");
  creation_events(collections, "create_collection");
  creation_events(datasets, "create_dataset");
  creation_events(files, "upload_file");

  // Extra events: exact per-type counts (largest-remainder apportionment)
  // so the histogram shape is deterministic, not sampled.
  EventTypeRegistry registry = default_event_registry();
  std::vector<std::string> other_types;
  std::vector<double> other_weights;
  for (const auto& type : registry) {
    if (type == "update_dataset_information" || type == "create_space" ||
        type == "create_collection" || type == "create_dataset" ||
        type == "upload_file")
      continue;
    other_types.push_back(type);
    // Views and downloads dominate the remainder, like real access logs.
    double w = 1.0;
    if (type.rfind("view_", 0) == 0) w = 4.0;
    if (type.rfind("download_", 0) == 0) w = 3.0;
    if (type == "login" || type == "logout") w = 2.0;
    if (type == kNetworkPacketType) w = 2.0;
    other_weights.push_back(w);
  }

  const std::size_t update_count = static_cast<std::size_t>(
      static_cast<double>(profile.extra_events) * profile.update_dataset_share);
  const std::size_t rest = profile.extra_events - update_count;
  std::vector<std::size_t> per_type(other_types.size(), 0);
  {
    double total_w = 0;
    for (double w : other_weights) total_w += w;
    std::size_t assigned = 0;
    std::vector<std::pair<double, std::size_t>> remainders;
    for (std::size_t i = 0; i < other_types.size(); ++i) {
      double exact = rest * other_weights[i] / total_w;
      per_type[i] = static_cast<std::size_t>(exact);
      assigned += per_type[i];
      remainders.emplace_back(exact - per_type[i], i);
    }
    std::sort(remainders.rbegin(), remainders.rend());
    for (std::size_t i = 0; assigned < rest; ++i, ++assigned)
      per_type[remainders[i % remainders.size()].second] += 1;
    // Every registered type appears at least once.
    for (auto& n : per_type)
      if (n == 0) n = 1;
  }

  auto object_for_type = [&](const std::string& type, TimestampMs& ts)
      -> std::optional<ResourceRef> {
    const std::vector<Entity>* pool = nullptr;
    if (type.ends_with("_space")) pool = &spaces;
    else if (type.ends_with("_collection")) pool = &collections;
    else if (type == "update_dataset_information" ||
             type.ends_with("_dataset"))
      pool = &datasets;
    else if (type.ends_with("_file")) pool = &files;
    if (!pool || pool->empty()) return std::nullopt;
    std::size_t i = pick_created_before(*pool, ts, rng);
    if (i == static_cast<std::size_t>(-1)) {
      i = 0;
      ts = std::max(ts, (*pool)[0].created_at);
    }
    return (*pool)[i].ref;
  };

  std::size_t user_rr = 0;  // round-robin head so all users appear
  auto emit_extra = [&](const std::string& type, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      PendingEvent ev;
      ev.ts = sample_ts_after(window_start);
      ev.seq = seq++;
      ev.user = user_rr < corpus.users.size()
                    ? corpus.users[user_rr++].user_id
                    : random_user();
      ev.type = type;
      ev.object = object_for_type(type, ev.ts);
      ev.network = type == kNetworkPacketType;
      ev.ts = std::min(ev.ts, window_end);
      pending.push_back(std::move(ev));
    }
  };
  emit_extra("update_dataset_information", update_count);
  for (std::size_t i = 0; i < other_types.size(); ++i)
    emit_extra(other_types[i], per_type[i]);

  std::sort(pending.begin(), pending.end(),
            [](const PendingEvent& a, const PendingEvent& b) {
              return std::tie(a.ts, a.seq) < std::tie(b.ts, b.seq);
            });

  // Bump last_updated_at from the event stream.
  std::map<std::string, Entity*> by_key;
  for (auto* level : {&spaces, &collections, &datasets, &files})
    for (auto& e : *level)
      by_key[ResourceCatalog::key(e.ref.kind, e.ref.id)] = &e;

  IdAllocator ids;
  for (auto& ev : pending) {
    ProvRecord r;
    r.ts = ev.ts;
    r.user_id = ev.user;
    r.event_type = ev.type;
    r.object = ev.object;
    if (ev.network) {
      r.source = RecordSource::Network;
      r.attrs.emplace("src_ip",
                      "10.0." + std::to_string(rng.below(16)) + "." +
                          std::to_string(1 + rng.below(254)));
      r.attrs.emplace("dst", "192.17.0.1:443");
      r.attrs.emplace("protocol", std::string("TCP"));
      r.attrs.emplace("length",
                      static_cast<std::int64_t>(64 + rng.below(1400)));
    }
    r.id = ids.next(r.source);
    if (r.object) {
      auto it = by_key.find(
          ResourceCatalog::key(r.object->kind, r.object->id));
      if (it != by_key.end())
        it->second->last_updated_at =
            std::max(it->second->last_updated_at, r.ts);
    }
    corpus.events.push_back(std::move(r));
  }

  // Parents must never look stale relative to their children.
  for (auto* level : {&files, &datasets, &collections}) {
    for (const auto& e : *level) {
      auto it = by_key.find(
          ResourceCatalog::key(e.parent->kind, e.parent->id));
      if (it != by_key.end())
        it->second->last_updated_at =
            std::max(it->second->last_updated_at, e.last_updated_at);
    }
  }

  // Build the catalog parents-first.
  for (auto* level : {&spaces, &collections, &datasets, &files}) {
    for (const auto& e : *level) {
      CatalogNode node;
      node.ref = e.ref;
      node.created_at = e.created_at;
      node.last_updated_at = e.last_updated_at;
      node.parent = e.parent;
      corpus.catalog.add(node);
    }
  }
  assert(corpus.catalog.validate().empty());
  return corpus;
}

}  // namespace provlet
