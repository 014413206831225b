// Copyright 2026 The tgates Authors
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

#include <numbers>

namespace tgates {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Elementary charge (C).
inline constexpr double kElementaryCharge = 1.602176634e-19;
/// Atomic mass unit (kg).
inline constexpr double kAtomicMass = 1.66053906660e-27;

// Config-facing unit factors (value_in_config * factor = SI).
inline constexpr double kMicron = 1e-6;
inline constexpr double kMicrosecond = 1e-6;
inline constexpr double kKilohertz = 1e3;                    // kHz -> Hz
inline constexpr double kKilohertzAngular = kTwoPi * 1e3;  // kHz -> rad/s
inline constexpr double kDegree = std::numbers::pi / 180.0;

}  // namespace tgates
