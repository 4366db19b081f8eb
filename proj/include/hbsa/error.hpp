// Copyright 2026 The hbsa Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hbsa {

enum class ErrorKind {
  OamOverflow,
  UnknownPath,
  ZeroNorm,
  NotNormalized,
  DimensionMismatch,
  NonPhysicalQ,
  SamePath,
  UnsortableOam,
  CalibrationFailure,
  SyntaxError,
  SemanticError,
  DimensionCap,
  LeakedAmplitude,
  MalformedPattern,
  InvalidArgument,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OamOverflow: return "OamOverflow";
    case ErrorKind::UnknownPath: return "UnknownPath";
    case ErrorKind::ZeroNorm: return "ZeroNorm";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonPhysicalQ: return "NonPhysicalQ";
    case ErrorKind::SamePath: return "SamePath";
    case ErrorKind::UnsortableOam: return "UnsortableOam";
    case ErrorKind::CalibrationFailure: return "CalibrationFailure";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::SemanticError: return "SemanticError";
    case ErrorKind::DimensionCap: return "DimensionCap";
    case ErrorKind::LeakedAmplitude: return "LeakedAmplitude";
    case ErrorKind::MalformedPattern: return "MalformedPattern";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// 1-based line/column into a circuit document.
struct SourcePos {
  int line = 0;
  int column = 0;
};

/// The single exception type thrown by the library. `kind()` is the stable
/// discriminator; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  Error(ErrorKind kind, const std::string& message, SourcePos pos,
        std::vector<std::string> expected = {})
      : std::runtime_error(format_positioned(kind, message, pos, expected)),
        kind_(kind),
        detail_(message),
        pos_(pos),
        expected_(std::move(expected)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }
  /// Zero line means "no position".
  SourcePos position() const noexcept { return pos_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

  /// Index of the circuit stage that raised the error, or -1.
  int stage() const noexcept { return stage_; }

  Error at_stage(int index, const std::string& stage_text) const {
    Error e(kind_, "stage " + std::to_string(index) + " (" + stage_text + "): " + detail_);
    e.pos_ = pos_;
    e.expected_ = expected_;
    e.stage_ = index;
    return e;
  }

 private:
  static std::string format_positioned(ErrorKind kind, const std::string& message, SourcePos pos,
                                       const std::vector<std::string>& expected) {
    std::string out = std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " +
                      std::string(to_string(kind)) + ": " + message;
    if (!expected.empty()) {
      out += " (expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i > 0) out += (i + 1 == expected.size()) ? " or " : ", ";
        out += expected[i];
      }
      out += ")";
    }
    return out;
  }

  ErrorKind kind_;
  std::string detail_;
  SourcePos pos_{};
  std::vector<std::string> expected_;
  int stage_ = -1;
};

}  // namespace hbsa
