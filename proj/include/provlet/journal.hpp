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
#include <string>
#include <vector>

#include "provlet/model.hpp"
#include "provlet/store.hpp"

namespace provlet {

// Append-only newline-delimited log file, fsynced per batch.
class LineLog {
 public:
  explicit LineLog(std::string path);
  ~LineLog();

  LineLog(const LineLog&) = delete;
  LineLog& operator=(const LineLog&) = delete;

  void append(const std::string& line);
  void sync();

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  int fd_ = -1;
  bool dirty_ = false;
};

// Archive sink backed by a LineLog. Writes the whole batch then syncs;
// throws ArchiveWriteFailure before any line is considered archived.
class FileArchive : public ArchiveSink {
 public:
  explicit FileArchive(std::string path);
  void append(const std::vector<std::string>& lines) override;

 private:
  LineLog log_;
};

// Reads a newline-delimited record log. Throws ParseError whose message
// carries the 1-based line number.
std::vector<ProvRecord> read_record_log(const std::string& path);

ResourceCatalog read_catalog(const std::string& path);
void write_catalog(const std::string& path, const ResourceCatalog& catalog);
void write_record_log(const std::string& path,
                      const std::vector<ProvRecord>& records);

struct ReplayResult {
  BoundedStore store;
  std::map<std::string, std::size_t> outcomes;  // outcome name -> count
  std::size_t lines = 0;
};

// Rebuilds store state by re-running append_record over a journal in file
// order. Deterministic: a fresh replay of a service's primary log equals the
// state the service held. Duplicate ids (a crash between journal sync and
// ack) are skipped idempotently.
ReplayResult replay_log(const std::vector<ProvRecord>& records,
                        const StoreConfig& cfg,
                        std::shared_ptr<ArchiveSink> archive = nullptr);

ReplayResult replay_log_file(const std::string& path, const StoreConfig& cfg,
                             std::shared_ptr<ArchiveSink> archive = nullptr);

}  // namespace provlet
