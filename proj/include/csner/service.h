// Copyright 2026 The csner Authors.
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

#ifndef CSNER_SERVICE_H_
#define CSNER_SERVICE_H_

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "json.hpp"

#include "csner/corpus.h"
#include "csner/model.h"

namespace httplib {
class Server;
}

namespace csner {

// {"tokens":[...],"entities":[{"type","start","end","surface"}]}; `end` is
// exclusive and `surface` joins the span's tokens with single spaces.
nlohmann::ordered_json Annotate(const TaggerModel &model, std::string_view text);

struct ServiceResponse {
  int status = 200;
  std::string body;  // JSON
};

// HTTP front end over immutable models, one per corpus part. A request for a
// part without its own model is served by the title model, or by the only
// model loaded.
class TaggingService {
 public:
  TaggingService();
  ~TaggingService();
  TaggingService(const TaggingService &) = delete;
  TaggingService &operator=(const TaggingService &) = delete;

  void AddModel(Part part, TaggerModel model);

  // Request handlers independent of the transport.
  ServiceResponse HandleAnnotate(const std::string &body) const;
  ServiceResponse HandleHealth() const;

  // Binds and serves until Stop; returns false when the port cannot be bound.
  // Port 0 picks a free port, reported by port() once bound.
  bool Listen(const std::string &host, int port);
  // Binds without serving; follow with Serve on another thread.
  bool Bind(const std::string &host, int port);
  void Serve();
  void Stop();
  int port() const { return port_; }

 private:
  const TaggerModel *ModelFor(Part part) const;
  void Route();

  std::map<Part, std::unique_ptr<TaggerModel>> models_;
  std::unique_ptr<httplib::Server> server_;
  int port_ = -1;
};

}  // namespace csner

#endif  // CSNER_SERVICE_H_
