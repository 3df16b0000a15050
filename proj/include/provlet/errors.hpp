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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace provlet {

// Malformed textual input (record line, catalog line, config document).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t byte_offset)
      : std::runtime_error(std::move(message)), byte_offset_(byte_offset) {}

  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class UnknownResource : public std::runtime_error {
 public:
  explicit UnknownResource(const std::string& id)
      : std::runtime_error("unknown resource: " + id) {}
};

// A parent edge points at a node absent from the catalog.
class BrokenChain : public std::runtime_error {
 public:
  BrokenChain(const std::string& node_id, const std::string& parent_id)
      : std::runtime_error("broken chain: node " + node_id +
                           " references missing parent " + parent_id) {}
};

class CatalogError : public std::runtime_error {
 public:
  explicit CatalogError(const std::string& what) : std::runtime_error(what) {}
};

class UnknownType : public std::runtime_error {
 public:
  explicit UnknownType(const std::string& type)
      : std::runtime_error("event type not in revised config: " + type) {}
};

class ArchiveWriteFailure : public std::runtime_error {
 public:
  explicit ArchiveWriteFailure(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace provlet
