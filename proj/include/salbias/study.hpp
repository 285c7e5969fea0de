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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "salbias/annotation.hpp"

namespace salbias {

struct StudyConfig {
    std::string study_id = "study";
    int images_per_session = 10;
    int target_reviews = 5;
    std::uint64_t shuffle_seed = 0;
};

struct StudyImage {
    std::string id;
    int width = 0;
    int height = 0;
};

enum class SessionState { Open, Complete, Abandoned };
std::string_view to_string(SessionState s) noexcept;

/// Per-image progress inside a session. Saliency boxes must be submitted
/// before the manipulation answer is accepted.
enum class ImagePhase { AwaitingSaliency, AwaitingManipulation, Stored };
std::string_view to_string(ImagePhase p) noexcept;

struct Session {
    std::string session_id;
    std::string participant_id;
    std::vector<std::string> image_ids;
    SessionState state = SessionState::Open;
    std::vector<ImagePhase> phases;

    std::size_t stored_count() const;
};

nlohmann::json to_json(const Session& s);

/// Which part of the two-task answer a submission carries.
enum class Submission { Both, SaliencyOnly, ManipulationOnly };

struct Acknowledgment {
    std::string session_id;
    std::string image_id;
    ImagePhase phase = ImagePhase::Stored;
    std::size_t session_progress = 0;
    SessionState session_state = SessionState::Open;
};

/// Annotation study state. Every state change is appended to a journal and
/// fsync'ed before it is acknowledged; constructing a Study replays the
/// journal, dropping a torn trailing record.
class Study {
public:
    Study(StudyConfig config, std::vector<StudyImage> images, std::filesystem::path journal);
    ~Study();
    Study(const Study&) = delete;
    Study& operator=(const Study&) = delete;

    const StudyConfig& config() const noexcept { return config_; }

    /// Returns the participant's open session if any; otherwise assembles a
    /// new one from the images with the fewest reviews (seeded tie-break).
    /// Throws StudyExhausted.
    Session next_session(const std::string& participant_id);

    /// Throws UnknownSession, ImageNotInSession, DuplicateResponse,
    /// SchemaViolation, TaskOrderViolation.
    Acknowledgment record_response(const std::string& session_id, StudyResponse response,
                                   Submission submission = Submission::Both);

    void abandon_session(const std::string& session_id);

    Session session(const std::string& session_id) const;
    std::map<std::string, int> progress() const;
    std::vector<StudyResponse> responses() const;
    const std::vector<StudyImage>& images() const noexcept { return images_; }
    bool has_image(std::string_view image_id) const;

private:
    struct SessionRecord {
        Session session;
        std::vector<std::vector<BoundingBox>> pending_saliency;
    };

    void replay();
    void apply(const nlohmann::json& entry);
    void append(const nlohmann::json& entry);
    std::size_t image_index(std::string_view id) const;

    StudyConfig config_;
    std::vector<StudyImage> images_;
    std::unordered_map<std::string, std::size_t> image_index_;
    std::filesystem::path journal_path_;
    int journal_fd_ = -1;

    mutable std::shared_mutex mutex_;
    std::vector<int> completed_;
    std::vector<int> in_flight_;
    std::map<std::string, SessionRecord> sessions_;
    std::unordered_map<std::string, std::string> open_session_of_;
    std::vector<StudyResponse> responses_;
    std::uint64_t session_counter_ = 0;
};

}  // namespace salbias
