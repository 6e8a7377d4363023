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

#include "csner/service.h"

#include "httplib.h"

#include "csner/error.h"
#include "csner/serialize.h"

namespace csner {
namespace {

ServiceResponse ErrorResponse(int status, const std::string &error, const std::string &message) {
  nlohmann::ordered_json j;
  j["error"] = error;
  j["message"] = message;
  return {status, j.dump()};
}

bool Blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

}  // namespace

nlohmann::ordered_json Annotate(const TaggerModel &model, std::string_view text) {
  std::vector<std::string> tokens = Tokenize(text);
  std::vector<Tag> tags = model.Predict(tokens);
  nlohmann::ordered_json out;
  out["tokens"] = tokens;
  out["entities"] = nlohmann::ordered_json::array();
  for (const EntitySpan &span : DecodeBio(tags, true)) {
    std::string surface;
    for (int i = span.start; i < span.end; ++i) {
      if (i > span.start) surface += ' ';
      surface += tokens[i];
    }
    nlohmann::ordered_json e;
    e["type"] = model.schema().type_name(span.type);
    e["start"] = span.start;
    e["end"] = span.end;
    e["surface"] = surface;
    out["entities"].push_back(std::move(e));
  }
  return out;
}

TaggingService::TaggingService() = default;
TaggingService::~TaggingService() { Stop(); }

void TaggingService::AddModel(Part part, TaggerModel model) {
  models_[part] = std::make_unique<TaggerModel>(std::move(model));
}

const TaggerModel *TaggingService::ModelFor(Part part) const {
  auto it = models_.find(part);
  if (it != models_.end()) return it->second.get();
  it = models_.find(Part::kTitle);
  if (it != models_.end()) return it->second.get();
  return models_.empty() ? nullptr : models_.begin()->second.get();
}

ServiceResponse TaggingService::HandleAnnotate(const std::string &body) const {
  nlohmann::json request = nlohmann::json::parse(body, nullptr, false);
  if (request.is_discarded() || !request.is_object()) {
    return ErrorResponse(400, "MalformedJson", "request body is not a JSON object");
  }
  auto text = request.find("text");
  if (text == request.end() || !text->is_string()) {
    return ErrorResponse(400, "MissingText", "field \"text\" must be a string");
  }
  const std::string &s = text->get_ref<const std::string &>();
  if (Blank(s)) return ErrorResponse(400, "EmptyText", "field \"text\" is empty");
  Part part = Part::kTitle;
  auto p = request.find("part");
  if (p != request.end()) {
    if (!p->is_string()) return ErrorResponse(400, "BadConfig", "field \"part\" must be a string");
    try {
      part = ParsePart(p->get_ref<const std::string &>());
    } catch (const Error &e) {
      return ErrorResponse(400, e.name(), e.what());
    }
  }
  const TaggerModel *model = ModelFor(part);
  if (model == nullptr) return ErrorResponse(503, "NoModel", "no model loaded");
  return {200, Annotate(*model, s).dump()};
}

ServiceResponse TaggingService::HandleHealth() const {
  const TaggerModel *model = ModelFor(Part::kTitle);
  nlohmann::ordered_json j;
  j["status"] = model != nullptr ? "ok" : "no model";
  j["model_version"] = kModelFormatVersion;
  j["schema"] = model != nullptr ? model->schema().types() : std::vector<std::string>{};
  nlohmann::ordered_json parts = nlohmann::ordered_json::array();
  for (const auto &[part, m] : models_) parts.push_back(PartName(part));
  j["parts"] = parts;
  return {model != nullptr ? 200 : 503, j.dump()};
}

void TaggingService::Route() {
  server_ = std::make_unique<httplib::Server>();
  server_->Post("/annotate", [this](const httplib::Request &req, httplib::Response &res) {
    ServiceResponse r = HandleAnnotate(req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  });
  server_->Get("/health", [this](const httplib::Request &, httplib::Response &res) {
    ServiceResponse r = HandleHealth();
    res.status = r.status;
    res.set_content(r.body, "application/json");
  });
}

bool TaggingService::Bind(const std::string &host, int port) {
  Route();
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
    return port_ > 0;
  }
  if (!server_->bind_to_port(host, port)) return false;
  port_ = port;
  return true;
}

void TaggingService::Serve() {
  if (server_) server_->listen_after_bind();
}

bool TaggingService::Listen(const std::string &host, int port) {
  if (!Bind(host, port)) return false;
  Serve();
  return true;
}

void TaggingService::Stop() {
  if (server_) server_->stop();
}

}  // namespace csner
