// Copyright 2026 The BaLeRO Authors
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

#include "balero/error.h"

namespace balero {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
            return "InvalidArgument";
        case ErrorCode::InsufficientSamples:
            return "InsufficientSamples";
        case ErrorCode::InvalidResolution:
            return "InvalidResolution";
        case ErrorCode::DimensionMismatch:
            return "DimensionMismatch";
        case ErrorCode::TooManyQubits:
            return "TooManyQubits";
        case ErrorCode::MassViolation:
            return "MassViolation";
        case ErrorCode::NoActivePairs:
            return "NoActivePairs";
        case ErrorCode::EmptyCounts:
            return "EmptyCounts";
        case ErrorCode::GridMismatch:
            return "GridMismatch";
        case ErrorCode::UnknownScenario:
            return "UnknownScenario";
        case ErrorCode::QubitMismatch:
            return "QubitMismatch";
        case ErrorCode::ParseError:
            return "ParseError";
        case ErrorCode::IoError:
            return "IoError";
        case ErrorCode::DegenerateClouds:
            return "DegenerateClouds";
        case ErrorCode::FitDiverged:
            return "FitDiverged";
        case ErrorCode::NoCrossing:
            return "NoCrossing";
        case ErrorCode::SingularMatrix:
            return "SingularMatrix";
    }
    return "Unknown";
}

bool is_numerical(ErrorCode code) {
    switch (code) {
        case ErrorCode::DegenerateClouds:
        case ErrorCode::FitDiverged:
        case ErrorCode::NoCrossing:
        case ErrorCode::SingularMatrix:
            return true;
        default:
            return false;
    }
}

Error::Error(ErrorCode code, const std::string &message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code), message_(message) {
}

}  // namespace balero
