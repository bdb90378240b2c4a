// Copyright 2026 The mktts Authors. All Rights Reserved.
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

#include "mktts/service/http.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "mktts/service/service.hpp"

namespace mktts::service {

using nlohmann::json;

namespace {

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotFound: return 404;
    case ErrorKind::Invalid: return 400;
    case ErrorKind::Conflict:
    case ErrorKind::OutOfOrder:
    case ErrorKind::AlreadyRated:
    case ErrorKind::Done: return 409;
  }
  return 500;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump() + "\n", "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& msg) {
  send_json(res, status, {{"error", code}, {"message", msg}});
}

template <class Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const DefinitionError& e) {
    send_json(res, 400, {{"error", "validation"}, {"problems", e.problems()}});
  } catch (const ServiceError& e) {
    send_error(res, status_for(e.kind()), error_code(e.kind()), e.what());
  } catch (const json::exception& e) {
    send_error(res, 400, "invalid", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "internal", e.what());
  }
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ServiceError(ErrorKind::Invalid, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

void register_routes(httplib::Server& server, Service& service) {
  server.Post("/tests", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto r = service.create_test(parse_body(req), service.root());
      send_json(res, r.created ? 201 : 200, {{"test_id", r.test_id}, {"created", r.created}});
    });
  });

  server.Post(R"(/tests/([^/]+)/sessions)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      std::optional<std::uint64_t> seed;
      if (body.contains("seed")) {
        if (!body["seed"].is_number_integer() || body["seed"].get<std::int64_t>() < 0) {
          throw ServiceError(ErrorKind::Invalid, "seed must be a non-negative integer");
        }
        seed = body["seed"].get<std::uint64_t>();
      }
      const std::string name = body.value("listener", "");
      const auto st = service.start_session(req.matches[1], name, seed);
      send_json(res, 201,
                {{"session_id", st.session_id},
                 {"listener_id", st.listener_id},
                 {"page_count", st.pages.size()}});
    });
  });

  server.Get(R"(/sessions/([^/]+)/next)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, service.next_page(req.matches[1])); });
  });

  server.Post(R"(/sessions/([^/]+)/pages/(\d+)/ratings)",
              [&](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                  const std::size_t page = std::stoul(req.matches[2]);
                  send_json(res, 200, service.submit_rating(req.matches[1], page, parse_body(req)));
                });
              });

  server.Get(R"(/tests/([^/]+)/export)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      if (req.get_param_value("format") == "csv") {
        res.set_content(stats::write_csv(service.export_records(id)), "text/csv");
      } else {
        res.set_content(service.export_jsonl(id), "application/x-ndjson");
      }
    });
  });

  server.Get(R"(/audio/([0-9a-f]{64})\.wav)", [&](const httplib::Request& req, httplib::Response& res) {
    const auto path = service.audio_path(req.matches[1]);
    if (!path) return send_error(res, 404, "not_found", "unknown audio");
    std::ifstream in(*path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    res.set_header("Cache-Control", "public, max-age=31536000, immutable");
    res.set_content(ss.str(), "audio/wav");
  });
}

bool serve(Service& service, const std::string& host, int port) {
  httplib::Server server;
  register_routes(server, service);
  return server.listen(host, port);
}

}  // namespace mktts::service
