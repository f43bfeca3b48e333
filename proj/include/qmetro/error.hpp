// Copyright 2026 The qmetro Authors
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace qmetro {

enum class ErrorKind {
    InvalidDimension,
    DimensionMismatch,
    InvalidArgument,
    NotHermitian,
    NotSymmetric,
    SpectrumNotReal,
    StepInstability,
    NonConvergence,
    NumericConsistency,
    InvalidTrace,
    PovmIncomplete,
    GradientNormalization,
    UnsupportedClosedForm,
    OutOfRegime,
    Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidDimension: return "invalid-dimension";
        case ErrorKind::DimensionMismatch: return "dimension-mismatch";
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::NotHermitian: return "not-hermitian";
        case ErrorKind::NotSymmetric: return "not-symmetric";
        case ErrorKind::SpectrumNotReal: return "spectrum-not-real";
        case ErrorKind::StepInstability: return "step-instability";
        case ErrorKind::NonConvergence: return "non-convergence";
        case ErrorKind::NumericConsistency: return "numeric-consistency";
        case ErrorKind::InvalidTrace: return "invalid-trace";
        case ErrorKind::PovmIncomplete: return "povm-incomplete";
        case ErrorKind::GradientNormalization: return "gradient-normalization";
        case ErrorKind::UnsupportedClosedForm: return "unsupported-closed-form";
        case ErrorKind::OutOfRegime: return "out-of-regime";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

/// True for errors caused by bad caller input rather than by numerics.
constexpr bool is_usage_error(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidDimension:
        case ErrorKind::DimensionMismatch:
        case ErrorKind::InvalidArgument:
        case ErrorKind::UnsupportedClosedForm:
        case ErrorKind::OutOfRegime:
            return true;
        default:
            return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) throw Error(kind, what);
}

}  // namespace qmetro
