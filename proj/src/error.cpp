// Copyright 2026 The MPRU Authors
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

#include "mpru/error.hpp"

namespace mpru {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NegativeEntry: return "NegativeEntry";
    case Errc::EntryAboveOne: return "EntryAboveOne";
    case Errc::SumOutOfTolerance: return "SumOutOfTolerance";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ForgetClassOutOfRange: return "ForgetClassOutOfRange";
    case Errc::EmptyForgetSet: return "EmptyForgetSet";
    case Errc::ZeroCentroid: return "ZeroCentroid";
    case Errc::RankDeficiency: return "RankDeficiency";
    case Errc::AssumptionViolated: return "AssumptionViolated";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::EmptyRestriction: return "EmptyRestriction";
    case Errc::IdMismatch: return "IdMismatch";
    case Errc::NoDataForLabel: return "NoDataForLabel";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::InconsistentDimensions: return "InconsistentDimensions";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::SchemaError: return "SchemaError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace mpru
