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

#ifndef BALERO_ERROR_H
#define BALERO_ERROR_H

#include <stdexcept>
#include <string>
#include <string_view>

namespace balero {

enum class ErrorCode {
    // Input / validation failures.
    InvalidArgument,
    InsufficientSamples,
    InvalidResolution,
    DimensionMismatch,
    TooManyQubits,
    MassViolation,
    NoActivePairs,
    EmptyCounts,
    GridMismatch,
    UnknownScenario,
    QubitMismatch,
    ParseError,
    IoError,
    // Numerical failures.
    DegenerateClouds,
    FitDiverged,
    NoCrossing,
    SingularMatrix,
};

std::string_view error_code_name(ErrorCode code);

/// True for failures caused by the numerics rather than by malformed input.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string &message);

    ErrorCode code() const noexcept {
        return code_;
    }
    /// The message without the code-name prefix.
    const std::string &message() const noexcept {
        return message_;
    }

   private:
    ErrorCode code_;
    std::string message_;
};

}  // namespace balero

#endif
