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
#include <string>
#include <vector>

#include "provlet/model.hpp"

namespace provlet {

// Entity counts and activity shape for the synthetic six-year corpus. The
// default profile reproduces the reference deployment's cardinalities:
// 150 spaces, 730 collections, 2425 datasets, 24259 files, 192 users,
// 2015-2020 with activity peaking in 2018, and update_dataset_information
// as the most frequent of the 33 event types.
struct CorpusProfile {
  std::size_t spaces = 150;
  std::size_t collections = 730;
  std::size_t datasets = 2425;
  std::size_t files = 24259;
  std::size_t users = 192;
  int start_year = 2015;
  int end_year = 2020;
  // Events beyond the per-entity creation events.
  std::size_t extra_events = 40000;
  // Share of extra events that are update_dataset_information. At the
  // default sizes this puts it above upload_file (one per file) in the
  // histogram.
  double update_dataset_share = 0.65;
  // Relative yearly activity, start_year..end_year. Default peaks in 2018.
  std::vector<double> year_weights = {0.08, 0.13, 0.17, 0.30, 0.18, 0.14};
};

struct Corpus {
  ResourceCatalog catalog;
  std::vector<ProvRecord> events;  // ts order, ids assigned in ingest order
  std::vector<UserInfo> users;
};

// Deterministic for a fixed (seed, profile): identical output bytes on
// every platform.
Corpus gen_corpus(std::uint64_t seed, const CorpusProfile& profile = {});

}  // namespace provlet
