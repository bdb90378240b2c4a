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

#pragma once

#include <string>

namespace httplib {
class Server;
}

namespace mktts::service {

class Service;

// Routes:
//   POST /tests                                 definition JSON
//   POST /tests/{id}/sessions                   {"listener": name, "seed": n}
//   GET  /sessions/{id}/next
//   POST /sessions/{id}/pages/{page}/ratings    {"ratings": {handle: value}}
//   GET  /tests/{id}/export[?format=csv]
//   GET  /audio/{hash}.wav
void register_routes(httplib::Server& server, Service& service);

// Blocks until the server stops.
bool serve(Service& service, const std::string& host, int port);

}  // namespace mktts::service
