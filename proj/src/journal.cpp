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

#include "provlet/journal.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "provlet/errors.hpp"

namespace provlet {

LineLog::LineLog(std::string path) : path_(std::move(path)) {
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd_ < 0)
    throw std::runtime_error("cannot open log " + path_ + ": " +
                             std::strerror(errno));
}

LineLog::~LineLog() {
  if (fd_ >= 0) {
    if (dirty_) ::fsync(fd_);
    ::close(fd_);
  }
}

void LineLog::append(const std::string& line) {
  std::string buf = line;
  buf += '\n';
  const char* p = buf.data();
  std::size_t left = buf.size();
  while (left > 0) {
    ssize_t n = ::write(fd_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error("write failed on " + path_ + ": " +
                               std::strerror(errno));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  dirty_ = true;
}

void LineLog::sync() {
  if (!dirty_) return;
  if (::fsync(fd_) != 0)
    throw std::runtime_error("fsync failed on " + path_ + ": " +
                             std::strerror(errno));
  dirty_ = false;
}

FileArchive::FileArchive(std::string path) : log_(std::move(path)) {}

void FileArchive::append(const std::vector<std::string>& lines) {
  try {
    for (const auto& line : lines) log_.append(line);
    log_.sync();
  } catch (const std::exception& e) {
    throw ArchiveWriteFailure(e.what());
  }
}

std::vector<ProvRecord> read_record_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open log " + path);
  std::vector<ProvRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      records.push_back(deserialize_record(line));
    } catch (const ParseError& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what(),
                       e.byte_offset());
    }
  }
  return records;
}

ResourceCatalog read_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open catalog " + path);
  ResourceCatalog catalog;
  std::string line;
  std::size_t lineno = 0;
  // Dangling parents are tolerated during the pass (any file order) and
  // checked by validate() at the end.
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      catalog.add(deserialize_catalog_node(line));
    } catch (const std::exception& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what(),
                       0);
    }
  }
  auto problems = catalog.validate();
  if (!problems.empty())
    throw CatalogError(path + ": invalid catalog: " + problems.front() +
                       (problems.size() > 1
                            ? " (+" + std::to_string(problems.size() - 1) +
                                  " more)"
                            : ""));
  return catalog;
}

void write_catalog(const std::string& path, const ResourceCatalog& catalog) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write catalog " + path);
  for (const auto& [key, node] : catalog.nodes())
    out << serialize_catalog_node(node) << '\n';
}

void write_record_log(const std::string& path,
                      const std::vector<ProvRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write log " + path);
  for (const auto& r : records) out << serialize_record(r) << '\n';
}

ReplayResult replay_log(const std::vector<ProvRecord>& records,
                        const StoreConfig& cfg,
                        std::shared_ptr<ArchiveSink> archive) {
  ReplayResult result;
  if (archive) result.store.set_archive(std::move(archive));
  std::set<std::string> seen;
  for (const auto& r : records) {
    ++result.lines;
    if (!seen.insert(r.id).second) {
      result.outcomes["duplicate"] += 1;
      continue;
    }
    AppendOutcome outcome = result.store.append_record(cfg, r);
    result.outcomes[to_string(outcome.status)] += 1;
  }
  return result;
}

ReplayResult replay_log_file(const std::string& path, const StoreConfig& cfg,
                             std::shared_ptr<ArchiveSink> archive) {
  return replay_log(read_record_log(path), cfg, std::move(archive));
}

}  // namespace provlet
