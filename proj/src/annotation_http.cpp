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

#include "execedit/annotation_http.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "execedit/error.hpp"
#include "execedit/text.hpp"

namespace execedit {
namespace {

constexpr const char* kJson = "application/json";

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownSession:
    case ErrorCode::kUnknownItem:
      return 404;
    case ErrorCode::kGatingViolation:
    case ErrorCode::kEmptySource:
      return 422;
    default:
      return 400;
  }
}

void SendError(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  res.status = status;
  res.set_content(Json{{"error", code}, {"message", message}}.dump(), kJson);
}

// Runs a handler body, mapping failures to JSON error responses.
template <typename F>
void Guarded(httplib::Response& res, F body) {
  try {
    body();
  } catch (const Error& e) {
    SendError(res, StatusFor(e.code()), ErrorCodeName(e.code()), e.what());
  } catch (const Json::exception& e) {
    SendError(res, 400, "BadRequest", e.what());
  }
}

}  // namespace

ExportFilter ParseExportFilter(const std::string& spec) {
  ExportFilter filter;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t end = spec.find(',', pos);
    if (end == std::string::npos) end = spec.size();
    const std::string part = Trim(spec.substr(pos, end - pos));
    pos = end + 1;
    if (part.empty()) continue;
    const std::size_t colon = part.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "filter term '" + part + "' is not key:value");
    }
    const std::string key = part.substr(0, colon);
    const std::string value = part.substr(colon + 1);
    if (key == "annotator") {
      filter.annotator_id = value;
    } else if (key == "mode" || key == "kind") {
      filter.kind = FromString<AnnotationKind>(value);
    } else if (key == "target") {
      filter.target_id = value;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown filter key '" + key + "'");
    }
  }
  return filter;
}

AnnotationHttpServer::AnnotationHttpServer(AnnotationService& service, std::string static_dir)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  httplib::Server& srv = *server_;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  srv.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  srv.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    Guarded(res, [&] {
      const SessionRequest request = Json::parse(req.body).get<SessionRequest>();
      res.status = 201;
      res.set_content(SessionPayload(service_.CreateSession(request)).dump(), kJson);
    });
  });

  srv.Get(R"(/sessions/([^/]+)/next)", [this](const httplib::Request& req, httplib::Response& res) {
    Guarded(res, [&] {
      const auto item = service_.NextItem(req.matches[1]);
      Json body{{"done", !item.has_value()}};
      if (item) body["item"] = *item;
      res.set_content(body.dump(), kJson);
    });
  });

  srv.Post(R"(/sessions/([^/]+)/annotations)",
           [this](const httplib::Request& req, httplib::Response& res) {
             Guarded(res, [&] {
               const std::string session_id = req.matches[1];
               Json body = Json::parse(req.body);
               if (!body.is_object()) throw Error(ErrorCode::kInvalidArgument, "body must be an object");
               if (!body.contains("annotator_id") || !body.contains("kind")) {
                 const AnnotationSession s = service_.GetSession(session_id);
                 if (!body.contains("annotator_id")) body["annotator_id"] = s.annotator_id;
                 if (!body.contains("kind")) body["kind"] = ToString(s.mode);
               }
               const StoredRecord stored =
                   service_.Submit(session_id, body.get<AnnotationRecord>());
               res.status = 201;
               res.set_content(
                   Json{{"record_id", stored.record_id}, {"revision", stored.revision}}.dump(), kJson);
             });
           });

  srv.Get("/export", [this](const httplib::Request& req, httplib::Response& res) {
    Guarded(res, [&] {
      const ExportFilter filter =
          ParseExportFilter(req.has_param("filter") ? req.get_param_value("filter") : "");
      res.set_content(service_.ExportJsonl(filter), "application/x-ndjson");
    });
  });

  if (!static_dir.empty() && !srv.set_mount_point("/", static_dir)) {
    spdlog::warn("static directory {} not mounted", static_dir);
  }
}

AnnotationHttpServer::~AnnotationHttpServer() { Stop(); }

int AnnotationHttpServer::Bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

void AnnotationHttpServer::Serve() { server_->listen_after_bind(); }

void AnnotationHttpServer::Stop() {
  if (server_) server_->stop();
}

}  // namespace execedit
