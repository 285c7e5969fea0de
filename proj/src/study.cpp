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

#include "salbias/study.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "salbias/error.hpp"

namespace salbias {

using nlohmann::json;

std::string_view to_string(SessionState s) noexcept {
    switch (s) {
        case SessionState::Open: return "open";
        case SessionState::Complete: return "complete";
        case SessionState::Abandoned: return "abandoned";
    }
    return "open";
}

std::string_view to_string(ImagePhase p) noexcept {
    switch (p) {
        case ImagePhase::AwaitingSaliency: return "awaiting-saliency";
        case ImagePhase::AwaitingManipulation: return "awaiting-manipulation";
        case ImagePhase::Stored: return "stored";
    }
    return "awaiting-saliency";
}

std::size_t Session::stored_count() const {
    return static_cast<std::size_t>(std::count(phases.begin(), phases.end(), ImagePhase::Stored));
}

json to_json(const Session& s) {
    json images = json::array();
    for (std::size_t i = 0; i < s.image_ids.size(); ++i)
        images.push_back({{"image_id", s.image_ids[i]}, {"status", to_string(s.phases[i])}});
    return json{{"session_id", s.session_id},
                {"participant_id", s.participant_id},
                {"state", to_string(s.state)},
                {"images", images},
                {"progress", s.stored_count()}};
}

namespace {

std::string utc_now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Portable Fisher-Yates; std::shuffle's draw sequence is library-specific.
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

}  // namespace

Study::Study(StudyConfig config, std::vector<StudyImage> images, std::filesystem::path journal)
    : config_(std::move(config)), images_(std::move(images)), journal_path_(std::move(journal)) {
    if (config_.images_per_session < 1 || config_.target_reviews < 1)
        throw Error(ErrorCode::OutOfRange, "images_per_session and target_reviews must be >= 1");
    for (std::size_t i = 0; i < images_.size(); ++i)
        if (!image_index_.emplace(images_[i].id, i).second) throw Error(ErrorCode::DuplicateId, images_[i].id);
    completed_.assign(images_.size(), 0);
    in_flight_.assign(images_.size(), 0);

    std::error_code ec;
    if (journal_path_.has_parent_path()) std::filesystem::create_directories(journal_path_.parent_path(), ec);
    replay();
    journal_fd_ = ::open(journal_path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (journal_fd_ < 0) throw Error(ErrorCode::UnwritablePath, journal_path_.string() + ": " + std::strerror(errno));
}

Study::~Study() {
    if (journal_fd_ >= 0) ::close(journal_fd_);
}

std::size_t Study::image_index(std::string_view id) const {
    const auto it = image_index_.find(std::string(id));
    if (it == image_index_.end()) throw Error(ErrorCode::UnknownImage, std::string(id));
    return it->second;
}

bool Study::has_image(std::string_view image_id) const {
    return image_index_.count(std::string(image_id)) != 0;
}

void Study::replay() {
    std::ifstream in(journal_path_, std::ios::binary);
    if (!in) return;
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string data = buf.str();

    std::size_t good_end = 0;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < data.size()) {
        const auto nl = data.find('\n', pos);
        ++line_no;
        if (nl == std::string::npos) break;  // torn tail: never acknowledged
        const std::string_view line(data.data() + pos, nl - pos);
        if (!line.empty()) {
            json entry;
            try {
                entry = json::parse(line);
            } catch (const json::parse_error& e) {
                if (nl + 1 >= data.size()) break;  // torn last record
                throw Error(ErrorCode::ParseError,
                            fmt::format("{}:{}: corrupt journal entry: {}", journal_path_.string(), line_no, e.what()));
            }
            apply(entry);
        }
        pos = nl + 1;
        good_end = pos;
    }
    if (good_end < data.size()) std::filesystem::resize_file(journal_path_, good_end);
}

void Study::apply(const json& entry) {
    const std::string type = entry.at("type").get<std::string>();
    if (type == "session") {
        SessionRecord rec;
        rec.session.session_id = entry.at("session_id").get<std::string>();
        rec.session.participant_id = entry.at("participant_id").get<std::string>();
        rec.session.image_ids = entry.at("images").get<std::vector<std::string>>();
        rec.session.phases.assign(rec.session.image_ids.size(), ImagePhase::AwaitingSaliency);
        rec.pending_saliency.resize(rec.session.image_ids.size());
        for (const auto& id : rec.session.image_ids) ++in_flight_[image_index(id)];
        open_session_of_[rec.session.participant_id] = rec.session.session_id;
        sessions_.emplace(rec.session.session_id, std::move(rec));
        ++session_counter_;
    } else if (type == "response") {
        StudyResponse r = response_from_json(entry.at("record"));
        auto& rec = sessions_.at(entry.at("session_id").get<std::string>());
        auto& s = rec.session;
        const auto it = std::find(s.image_ids.begin(), s.image_ids.end(), r.image_id);
        const auto slot = static_cast<std::size_t>(it - s.image_ids.begin());
        s.phases.at(slot) = ImagePhase::Stored;
        rec.pending_saliency[slot].clear();
        const std::size_t img = image_index(r.image_id);
        --in_flight_[img];
        ++completed_[img];
        responses_.push_back(std::move(r));
        if (s.stored_count() == s.image_ids.size()) {
            s.state = SessionState::Complete;
            open_session_of_.erase(s.participant_id);
        }
    } else if (type == "abandon") {
        auto& s = sessions_.at(entry.at("session_id").get<std::string>()).session;
        for (std::size_t i = 0; i < s.image_ids.size(); ++i)
            if (s.phases[i] != ImagePhase::Stored) --in_flight_[image_index(s.image_ids[i])];
        s.state = SessionState::Abandoned;
        open_session_of_.erase(s.participant_id);
    } else {
        throw Error(ErrorCode::ParseError, "unknown journal entry type " + type);
    }
}

void Study::append(const json& entry) {
    const std::string line = entry.dump() + '\n';
    std::size_t done = 0;
    while (done < line.size()) {
        const ssize_t n = ::write(journal_fd_, line.data() + done, line.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw Error(ErrorCode::UnwritablePath, journal_path_.string() + ": " + std::strerror(errno));
        }
        done += static_cast<std::size_t>(n);
    }
    if (::fsync(journal_fd_) != 0)
        throw Error(ErrorCode::UnwritablePath, journal_path_.string() + ": fsync failed");
}

Session Study::next_session(const std::string& participant_id) {
    if (participant_id.empty()) throw Error(ErrorCode::SchemaViolation, "participant id is empty");
    std::unique_lock lock(mutex_);
    if (const auto it = open_session_of_.find(participant_id); it != open_session_of_.end())
        return sessions_.at(it->second).session;

    // A participant never sees an image twice.
    std::set<std::size_t> seen;
    for (const auto& [sid, rec] : sessions_) {
        const auto& s = rec.session;
        if (s.participant_id != participant_id) continue;
        for (std::size_t i = 0; i < s.image_ids.size(); ++i)
            if (s.state != SessionState::Abandoned || s.phases[i] == ImagePhase::Stored)
                seen.insert(image_index(s.image_ids[i]));
    }
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < images_.size(); ++i)
        if (!seen.count(i) && completed_[i] + in_flight_[i] < config_.target_reviews) candidates.push_back(i);
    if (candidates.empty()) {
        const bool done = std::all_of(completed_.begin(), completed_.end(),
                                      [&](int c) { return c >= config_.target_reviews; });
        throw Error(ErrorCode::StudyExhausted,
                    done ? fmt::format("every image has {} reviews", config_.target_reviews)
                         : "no image currently needs a review from this participant");
    }

    std::seed_seq seq{static_cast<std::uint32_t>(config_.shuffle_seed),
                      static_cast<std::uint32_t>(config_.shuffle_seed >> 32),
                      static_cast<std::uint32_t>(session_counter_)};
    std::mt19937_64 rng(seq);
    seeded_shuffle(candidates, rng);
    std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        return completed_[a] + in_flight_[a] < completed_[b] + in_flight_[b];
    });
    candidates.resize(std::min(candidates.size(), static_cast<std::size_t>(config_.images_per_session)));
    seeded_shuffle(candidates, rng);

    std::vector<std::string> ids;
    for (auto i : candidates) ids.push_back(images_[i].id);
    const std::string sid = fmt::format("{}-{:06d}", config_.study_id, session_counter_ + 1);
    const json entry = {{"type", "session"}, {"session_id", sid}, {"participant_id", participant_id}, {"images", ids}};
    append(entry);
    apply(entry);
    return sessions_.at(sid).session;
}

Acknowledgment Study::record_response(const std::string& session_id, StudyResponse response,
                                      Submission submission) {
    std::unique_lock lock(mutex_);
    const auto sit = sessions_.find(session_id);
    if (sit == sessions_.end()) throw Error(ErrorCode::UnknownSession, session_id);
    SessionRecord& rec = sit->second;
    Session& s = rec.session;
    const auto it = std::find(s.image_ids.begin(), s.image_ids.end(), response.image_id);
    if (it == s.image_ids.end())
        throw Error(ErrorCode::ImageNotInSession, fmt::format("{} not in {}", response.image_id, session_id));
    const auto slot = static_cast<std::size_t>(it - s.image_ids.begin());
    if (s.phases[slot] == ImagePhase::Stored)
        throw Error(ErrorCode::DuplicateResponse, fmt::format("{} already answered in {}", response.image_id, session_id));
    if (s.state == SessionState::Abandoned)
        throw Error(ErrorCode::UnknownSession, session_id + " was abandoned");

    if (!response.session_id.empty() && response.session_id != session_id)
        throw Error(ErrorCode::SchemaViolation, "session_id does not match the endpoint");
    if (!response.study_id.empty() && response.study_id != config_.study_id)
        throw Error(ErrorCode::SchemaViolation, "study_id does not match the study");
    if (response.participant_id != s.participant_id)
        throw Error(ErrorCode::SchemaViolation, "participant_id does not own this session");
    response.session_id = session_id;
    response.study_id = config_.study_id;
    const StudyImage& img = images_[image_index(response.image_id)];

    switch (submission) {
        case Submission::SaliencyOnly: {
            if (!response.manipulation_boxes.empty())
                throw Error(ErrorCode::SchemaViolation, "saliency submission carries manipulation boxes");
            validate_response(response, img.width, img.height);
            rec.pending_saliency[slot] = response.saliency_boxes;
            s.phases[slot] = ImagePhase::AwaitingManipulation;
            return {session_id, response.image_id, s.phases[slot], s.stored_count(), s.state};
        }
        case Submission::ManipulationOnly:
            if (s.phases[slot] != ImagePhase::AwaitingManipulation)
                throw Error(ErrorCode::TaskOrderViolation,
                            fmt::format("{}: manipulation answer before saliency boxes", response.image_id));
            response.saliency_boxes = rec.pending_saliency[slot];
            break;
        case Submission::Both:
            if (response.saliency_boxes.empty()) {
                if (!response.manipulation_boxes.empty())
                    throw Error(ErrorCode::TaskOrderViolation,
                                fmt::format("{}: manipulation boxes without saliency boxes", response.image_id));
                throw Error(ErrorCode::SchemaViolation, "response has no saliency boxes");
            }
            break;
    }
    if (response.timestamp.empty()) response.timestamp = utc_now_iso8601();
    validate_response(response, img.width, img.height);

    const json entry = {{"type", "response"}, {"session_id", session_id}, {"record", to_json(response)}};
    append(entry);
    apply(entry);
    return {session_id, response.image_id, ImagePhase::Stored, s.stored_count(), s.state};
}

void Study::abandon_session(const std::string& session_id) {
    std::unique_lock lock(mutex_);
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, session_id);
    if (it->second.session.state != SessionState::Open) return;
    const json entry = {{"type", "abandon"}, {"session_id", session_id}};
    append(entry);
    apply(entry);
}

Session Study::session(const std::string& session_id) const {
    std::shared_lock lock(mutex_);
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, session_id);
    return it->second.session;
}

std::map<std::string, int> Study::progress() const {
    std::shared_lock lock(mutex_);
    std::map<std::string, int> out;
    for (std::size_t i = 0; i < images_.size(); ++i) out[images_[i].id] = completed_[i];
    return out;
}

std::vector<StudyResponse> Study::responses() const {
    std::shared_lock lock(mutex_);
    return responses_;
}

}  // namespace salbias
