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
#include "exlab/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "exlab/errors.hpp"
#include "exlab/excursion.hpp"

namespace exlab {

void RenderSpec::validate() const {
  if (width < 64) throw DomainError("render width must be at least 64");
  if (levels.empty() || levels.size() > 2) throw DomainError("render takes one or two levels");
  if (levels.size() == 2 && !(levels[0] < levels[1])) throw DomainError("two-level overlay needs t1 < t2");
  if (palette == Palette::TwoLevel && levels.size() != 2) throw DomainError("two-level overlay needs two levels");
}

std::vector<long> pixel_cells(const Grid& grid, int width, int* height) {
  const double pi = std::numbers::pi;
  std::vector<long> out;
  if (grid.kind() == GridKind::SphereLatLon || grid.kind() == GridKind::SphereWindow) {
    const int h = width / 2;
    *height = h;
    out.assign(static_cast<std::size_t>(width) * h, -1);
    const int n_lat = grid.full_rows(), n_lon = grid.full_cols();
    for (int py = 0; py < h; ++py) {
      const double th = (py + 0.5) / h * pi;
      const int r = std::clamp(static_cast<int>(th / pi * n_lat), 0, n_lat - 1) - grid.row_offset();
      if (r < 0 || r >= grid.rows()) continue;
      for (int px = 0; px < width; ++px) {
        const double ph = (px + 0.5) / width * 2.0 * pi;
        int c = static_cast<int>(ph / (2.0 * pi) * n_lon) % n_lon;
        c = ((c - grid.col_offset()) % n_lon + n_lon) % n_lon;
        if (c >= grid.cols()) continue;
        out[static_cast<std::size_t>(py) * width + px] = static_cast<long>(r) * grid.cols() + c;
      }
    }
    return out;
  }
  if (grid.kind() == GridKind::Planar) {
    *height = width;
    out.resize(static_cast<std::size_t>(width) * width);
    const int n = grid.cols();
    for (int py = 0; py < width; ++py) {
      // Image rows run top to bottom, so y decreases.
      const int r = n - 1 - std::min(n - 1, static_cast<int>((py + 0.5) / width * n));
      for (int px = 0; px < width; ++px) {
        const int c = std::min(n - 1, static_cast<int>((px + 0.5) / width * n));
        out[static_cast<std::size_t>(py) * width + px] = static_cast<long>(r) * n + c;
      }
    }
    return out;
  }
  throw DomainError("rendering needs a lat-lon or planar grid");
}

std::string render_ppm(const FieldSample& sample, const RenderSpec& spec) {
  spec.validate();
  const Grid& g = *sample.grid;
  int h = 0;
  const std::vector<long> cells = pixel_cells(g, spec.width, &h);
  const std::size_t np = cells.size();

  const ExcursionMask low = excursion_mask(sample, spec.levels.front());
  const ExcursionMask high = excursion_mask(sample, spec.levels.back());
  std::vector<std::int32_t> labels;
  std::vector<std::uint8_t> in_giant;
  if (spec.palette == RenderSpec::Palette::Components || spec.outline_giant) {
    const ComponentLabeling lab = label_components(high);
    labels = lab.label;
    if (spec.outline_giant && !lab.components.empty()) {
      std::size_t best = 0;
      for (std::size_t id = 1; id < lab.components.size(); ++id)
        if (lab.components[id].area > lab.components[best].area) best = id;
      in_giant.assign(g.size(), 0);
      for (std::size_t i = 0; i < g.size(); ++i) in_giant[i] = lab.label[i] == static_cast<std::int32_t>(best);
    }
  }

  auto component_color = [](std::int32_t id) {
    std::uint64_t x = static_cast<std::uint64_t>(id) * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull;
    x ^= x >> 29;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 32;
    return Rgb{static_cast<std::uint8_t>(40 + (x & 0x9f)), static_cast<std::uint8_t>(40 + ((x >> 8) & 0x9f)),
               static_cast<std::uint8_t>(40 + ((x >> 16) & 0x9f))};
  };

  std::vector<Rgb> px(np, kLightTone);
  for (std::size_t p = 0; p < np; ++p) {
    const long c = cells[p];
    if (c < 0) {
      px[p] = Rgb{0x80, 0x80, 0x80};
      continue;
    }
    switch (spec.palette) {
      case RenderSpec::Palette::Binary:
        if (high.inside[c]) px[p] = kDarkTone;
        break;
      case RenderSpec::Palette::TwoLevel:
        if (low.inside[c]) {
          px[p] = kDarkTone;
        } else if (high.inside[c]) {
          px[p] = kMidTone;
        }
        break;
      case RenderSpec::Palette::Components:
        if (labels[c] >= 0) px[p] = component_color(labels[c]);
        break;
    }
  }
  if (!in_giant.empty()) {
    const int w = spec.width;
    auto giant_at = [&](long p) { return cells[p] >= 0 && in_giant[cells[p]]; };
    std::vector<std::uint8_t> edge(np, 0);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const long p = static_cast<long>(y) * w + x;
        if (!giant_at(p)) continue;
        const bool wrap = g.spherical();
        const long left = x > 0 ? p - 1 : (wrap ? p + w - 1 : p);
        const long right = x + 1 < w ? p + 1 : (wrap ? p - w + 1 : p);
        const long up = y > 0 ? p - w : p, down = y + 1 < h ? p + w : p;
        if (!giant_at(left) || !giant_at(right) || !giant_at(up) || !giant_at(down)) edge[p] = 1;
      }
    for (std::size_t p = 0; p < np; ++p)
      if (edge[p]) px[p] = kOutline;
  }

  std::string out = "P6\n" + std::to_string(spec.width) + " " + std::to_string(h) + "\n255\n";
  out.reserve(out.size() + 3 * np);
  for (const Rgb& c : px) out.append(reinterpret_cast<const char*>(c.data()), 3);
  return out;
}

}  // namespace exlab
