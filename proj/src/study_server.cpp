// Copyright 2026 The salbias Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "salbias/study_server.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "salbias/error.hpp"

namespace salbias {

using nlohmann::json;

namespace {

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownSession:
        case ErrorCode::UnknownImage: return 404;
        case ErrorCode::StudyExhausted:
        case ErrorCode::DuplicateResponse:
        case ErrorCode::TaskOrderViolation: return 409;
        case ErrorCode::SchemaViolation:
        case ErrorCode::ImageNotInSession: return 422;
        default: return 500;
    }
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
    send_json(res, status, {{"error", code}, {"message", message}});
}

void send_error(httplib::Response& res, const Error& e) {
    send_error(res, http_status(e.code()), to_string(e.code()), e.what());
}

std::string content_type_for(const fs::path& p) {
    auto ext = p.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".png") return "image/png";
    if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
    return "application/octet-stream";
}

}  // namespace

StudyServer::StudyServer(Study& study, const Corpus& corpus)
    : study_(study), corpus_(corpus), server_(std::make_unique<httplib::Server>()) {
    auto& srv = *server_;

    srv.Get(R"(/api/study/([^/]+)/session)", [this](const httplib::Request& req, httplib::Response& res) {
        if (req.matches[1] != study_.config().study_id)
            return send_error(res, 404, "UnknownStudy", req.matches[1]);
        const auto participant = req.get_param_value("participant");
        if (participant.empty()) return send_error(res, 400, "BadRequest", "participant query parameter required");
        try {
            send_json(res, 200, to_json(study_.next_session(participant)));
        } catch (const Error& e) {
            send_error(res, e);
        }
    });

    srv.Get(R"(/api/study/([^/]+)/progress)", [this](const httplib::Request& req, httplib::Response& res) {
        if (req.matches[1] != study_.config().study_id)
            return send_error(res, 404, "UnknownStudy", req.matches[1]);
        json reviews = json::object();
        for (const auto& [id, n] : study_.progress()) reviews[id] = n;
        send_json(res, 200,
                  {{"study_id", study_.config().study_id},
                   {"target_reviews", study_.config().target_reviews},
                   {"reviews", reviews}});
    });

    srv.Get(R"(/api/image/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        const ImageRecord* rec = study_.has_image(id) ? corpus_.find(id) : nullptr;
        if (rec == nullptr) return send_error(res, 404, "UnknownImage", id);
        std::ifstream in(rec->image_path, std::ios::binary);
        if (!in) return send_error(res, 404, "MissingFile", rec->image_path.string());
        std::stringstream buf;
        buf << in.rdbuf();
        res.set_content(buf.str(), content_type_for(rec->image_path));
    });

    srv.Post(R"(/api/session/([^/]+)/response)", [this](const httplib::Request& req, httplib::Response& res) {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::parse_error& e) {
            return send_error(res, 400, "BadRequest", e.what());
        }
        try {
            Submission submission = Submission::Both;
            if (body.is_object()) {
                if (const auto t = body.find("task"); t != body.end()) {
                    if (*t == "saliency") submission = Submission::SaliencyOnly;
                    else if (*t == "manipulation") submission = Submission::ManipulationOnly;
                    else if (*t != "both") throw Error(ErrorCode::SchemaViolation, "unknown task " + t->dump());
                }
            }
            const auto ack = study_.record_response(req.matches[1], response_from_json(body), submission);
            send_json(res, 200,
                      {{"session_id", ack.session_id},
                       {"image_id", ack.image_id},
                       {"status", to_string(ack.phase)},
                       {"session_progress", ack.session_progress},
                       {"session_state", to_string(ack.session_state)}});
        } catch (const Error& e) {
            send_error(res, e);
        }
    });
}

StudyServer::~StudyServer() = default;

int StudyServer::bind(const std::string& host, int port) {
    if (port == 0) return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

bool StudyServer::listen_after_bind() { return server_->listen_after_bind(); }

void StudyServer::stop() { server_->stop(); }

}  // namespace salbias
