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

#include <memory>
#include <string>

#include "provlet/service.hpp"

namespace provlet {

// HTTP surface over a ServiceCore:
//   POST /v1/events            ingest one app-stream record
//   POST /v1/captures          upload a capture file (admin)
//   GET  /v1/records           filtered, paginated raw records
//   GET  /v1/reports/{kind}    aggregated report
//   PUT  /v1/config            adjust pdb_bytes / req-events (admin)
//   GET  /v1/alerts            capacity alerts (admin)
//   GET  /v1/stats             store statistics (admin)
//   GET  /healthz              liveness, unauthenticated
// Auth: "Authorization: Bearer <token>" resolved via the config token table.
class HttpServer {
 public:
  explicit HttpServer(ServiceCore& core);
  ~HttpServer();

  // port 0 binds an ephemeral port; returns the bound port or -1.
  int bind(const std::string& host, int port);
  void listen();  // blocking; call after bind
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace provlet
