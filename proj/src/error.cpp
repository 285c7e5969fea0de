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

#include "salbias/error.hpp"

namespace salbias {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MissingFile: return "MissingFile";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
        case ErrorCode::MultiChannelInput: return "MultiChannelInput";
        case ErrorCode::ZeroTargetDimension: return "ZeroTargetDimension";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::MixedImageIds: return "MixedImageIds";
        case ErrorCode::TooFewTags: return "TooFewTags";
        case ErrorCode::TrialCountMismatch: return "TrialCountMismatch";
        case ErrorCode::ImageIdMismatch: return "ImageIdMismatch";
        case ErrorCode::MissingArtifact: return "MissingArtifact";
        case ErrorCode::ImageSetMismatch: return "ImageSetMismatch";
        case ErrorCode::UnwritablePath: return "UnwritablePath";
        case ErrorCode::BadFlag: return "BadFlag";
        case ErrorCode::MissingInput: return "MissingInput";
        case ErrorCode::StudyExhausted: return "StudyExhausted";
        case ErrorCode::UnknownSession: return "UnknownSession";
        case ErrorCode::ImageNotInSession: return "ImageNotInSession";
        case ErrorCode::DuplicateResponse: return "DuplicateResponse";
        case ErrorCode::SchemaViolation: return "SchemaViolation";
        case ErrorCode::TaskOrderViolation: return "TaskOrderViolation";
        case ErrorCode::UnknownImage: return "UnknownImage";
    }
    return "Unknown";
}

}  // namespace salbias
