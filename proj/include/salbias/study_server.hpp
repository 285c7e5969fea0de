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

#pragma once

#include <memory>
#include <string>

#include "salbias/corpus.hpp"
#include "salbias/study.hpp"

namespace httplib {
class Server;
}

namespace salbias {

/// HTTP front end for a Study:
///   GET  /api/study/{id}/session?participant=P
///   GET  /api/image/{id}
///   POST /api/session/{sid}/response
///   GET  /api/study/{id}/progress
class StudyServer {
public:
    StudyServer(Study& study, const Corpus& corpus);
    ~StudyServer();

    /// Binds (port 0 picks a free port) and returns the bound port, or -1.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    bool listen_after_bind();
    void stop();

private:
    Study& study_;
    const Corpus& corpus_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace salbias
