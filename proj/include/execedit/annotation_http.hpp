// Copyright 2026 The ExecEdit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <memory>
#include <string>

#include "execedit/annotation.hpp"

namespace httplib {
class Server;
}

namespace execedit {

// JSON-over-HTTP front end for AnnotationService:
//   POST /sessions                     SessionRequest -> session payload
//   GET  /sessions/{id}/next           {"done": false, "item": {...}} | {"done": true}
//   POST /sessions/{id}/annotations    AnnotationRecord -> {"record_id", "revision"}
//   GET  /export?filter=annotator:a,mode:edit_quality   JSONL
// Errors are {"error": <code>, "message": ...} with 400/404/422.
class AnnotationHttpServer {
 public:
  explicit AnnotationHttpServer(AnnotationService& service, std::string static_dir = {});
  ~AnnotationHttpServer();

  // Returns the bound port (an ephemeral one when port == 0); -1 on failure.
  int Bind(const std::string& host, int port);
  void Serve();  // blocks until Stop()
  void Stop();

 private:
  AnnotationService& service_;
  std::unique_ptr<httplib::Server> server_;
};

// Parses "annotator:a,mode:edit_quality,target:t" into a filter.
ExportFilter ParseExportFilter(const std::string& spec);

}  // namespace execedit
