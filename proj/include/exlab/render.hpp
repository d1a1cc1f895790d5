/*
 * Copyright 2026 exlab contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "exlab/samplers.hpp"

namespace exlab {

struct RenderSpec {
  enum class Palette { Binary, TwoLevel, Components };
  int width = 800;
  Palette palette = Palette::TwoLevel;
  std::vector<double> levels = {-0.1, 0.1};
  // Black outline around the largest-area component of the highest level.
  bool outline_giant = false;

  void validate() const;
};

using Rgb = std::array<std::uint8_t, 3>;
inline constexpr Rgb kDarkTone{0x1b, 0x5e, 0x20};
inline constexpr Rgb kMidTone{0x81, 0xc7, 0x84};
inline constexpr Rgb kLightTone{0xf1, 0xf8, 0xe9};
inline constexpr Rgb kOutline{0x00, 0x00, 0x00};

// Cell shown at each pixel (row-major), or -1 outside the grid. Equirectangular for lat-lon grids
// (height = width / 2), square for planar grids.
std::vector<long> pixel_cells(const Grid& grid, int width, int* height);

// Binary PPM (P6).
std::string render_ppm(const FieldSample& sample, const RenderSpec& spec);

}  // namespace exlab
