/*
 * Copyright 2026 The vrise Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vrise {

// IEEE 754 binary16 conversion, round-to-nearest-even.
std::uint16_t float_to_half(float value);
float half_to_float(std::uint16_t bits);

// float -> half -> float.
inline float round_to_half(float value) {
  return half_to_float(float_to_half(value));
}

void round_to_half(std::span<float> values);

}  // namespace vrise
