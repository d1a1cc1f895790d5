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
#include <cstring>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "exlab/errors.hpp"
#include "exlab/io.hpp"
#include "exlab/render.hpp"

using namespace exlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("exlab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<Rgb> pixels(const std::string& ppm, int* w, int* h) {
  std::istringstream is(ppm);
  std::string magic;
  int maxv = 0;
  is >> magic >> *w >> *h >> maxv;
  is.get();
  std::vector<Rgb> px(static_cast<std::size_t>(*w) * *h);
  is.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(3 * px.size()));
  return px;
}

}  // namespace

TEST_CASE("hash and number formatting") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(hex64(255) == "00000000000000ff");
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::numbers::pi}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("CSV quoting") {
  CHECK(csv_quote("plain") == "plain");
  CHECK(csv_quote("a,b") == "\"a,b\"");
  CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_quote("two\nlines") == "\"two\nlines\"");
  std::ostringstream os;
  CsvWriter w(os);
  w.header({"x", "y,z"});
  w.field(0.5).field(std::int64_t{-3}).field(true);
  w.end_row();
  CHECK(os.str() == "x,\"y,z\"\n0.5,-3,1\n");
}

TEST_CASE("field samples round-trip through payload and sidecar") {
  const fs::path dir = scratch_dir("io");
  auto grid = std::make_shared<const Grid>(Grid::sphere(20));
  const FieldSample s = sample_rsh(6, grid, 7);
  const auto files = write_sample(s, dir / "rsh");
  CHECK(fs::exists(files.payload));
  CHECK(fs::exists(files.sidecar));
  const FieldSample back = read_sample(files.sidecar);
  CHECK(back.values == s.values);
  CHECK(back.coeffs == s.coeffs);
  CHECK(back.seed == 7);
  CHECK(back.spec.ell == 6);
  CHECK(back.grid->descriptor() == grid->descriptor());

  const auto again = write_sample(sample_rsh(6, grid, 7), dir / "rsh2");
  CHECK(read_file(again.payload) == read_file(files.payload));

  std::string bytes = read_file(files.payload);
  bytes[40] ^= 1;
  write_file(files.payload, bytes);
  CHECK_THROWS_AS(read_sample(files.sidecar), IoError);
  CHECK_THROWS_AS(read_sample(dir / "missing.json"), IoError);
  write_file(dir / "bad.json", "{\"format\": 3");
  CHECK_THROWS_AS(read_sample(dir / "bad.json"), ConfigError);
}

TEST_CASE("grid descriptions round-trip") {
  std::vector<Grid> grids = {Grid::sphere(12), Grid::sphere_window(40, 3, 17, 70, 25), Grid::planar(12.0, 31),
                             Grid::sphere_patch(rotation_to(from_spherical(1.0, 2.0), 0.3), 0.2, 9),
                             Grid::points({Vec3::UnitX(), Vec3::UnitZ()})};
  for (const auto& g : grids) {
    const Grid back = grid_from_json(grid_to_json(g));
    CHECK(back.descriptor() == g.descriptor());
    CHECK(back.size() == g.size());
    CHECK((back.center(back.size() - 1) - g.center(g.size() - 1)).norm() < 1e-14);
  }
  for (const auto& spec : {EnsembleSpec::kostlan(5), EnsembleSpec::rsh(4), EnsembleSpec::bandlimited(0.5, 9),
                           EnsembleSpec::mono(0.5, 30), EnsembleSpec::bargmann_fock(64), EnsembleSpec::plane_wave(0.9, 32)})
    CHECK(ensemble_from_json(ensemble_to_json(spec)).describe() == spec.describe());
}

TEST_CASE("component and tiling exports") {
  auto grid = std::make_shared<const Grid>(Grid::planar(4.0, 4));
  std::vector<std::uint8_t> in = {1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1};
  std::ostringstream os;
  write_components_csv(os, label_components(make_mask(grid, in)));
  CHECK(os.str() == "id,cells,area,representative,touches_boundary\n0,2,2,0,1\n1,2,2,11,1\n");

  const auto t = build_tiling(0.1, 0.1, TilingRegion::make_cap(from_spherical(0.5, 0.5), 0.1));
  const auto rep = check_tiling(t);
  const Json j = tiling_to_json(t, &rep);
  CHECK(j["tiles"].size() == t.tiles.size());
  CHECK(j["report"]["count"].get<std::size_t>() == t.tiles.size());
}

TEST_CASE("rendering") {
  RenderSpec bad;
  bad.width = 32;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad.width = 64;
  bad.levels = {0.2, 0.1};
  CHECK_THROWS_AS(bad.validate(), DomainError);

  auto grid = std::make_shared<const Grid>(Grid::sphere(160));
  const FieldSample s = sample_rsh(40, grid, 1);
  RenderSpec spec;
  spec.width = 256;
  const std::string img = render_ppm(s, spec);
  CHECK(img.rfind("P6\n256 128\n255\n", 0) == 0);
  CHECK(render_ppm(s, spec) == img);
  int w = 0, h = 0;
  auto px = pixels(img, &w, &h);
  std::size_t dark = 0, mid = 0, light = 0;
  for (const auto& p : px) {
    dark += p == kDarkTone;
    mid += p == kMidTone;
    light += p == kLightTone;
  }
  CHECK(dark + mid + light == px.size());
  CHECK(dark > px.size() / 5);
  CHECK(mid > 0);
  CHECK(light > px.size() / 5);

  RenderSpec empty;
  empty.width = 64;
  empty.palette = RenderSpec::Palette::Binary;
  empty.levels = {-100.0};
  for (const auto& p : pixels(render_ppm(s, empty), &w, &h)) CHECK(p == kLightTone);

  RenderSpec comps = empty;
  comps.palette = RenderSpec::Palette::Components;
  comps.levels = {100.0};
  const auto cp = pixels(render_ppm(s, comps), &w, &h);
  for (const auto& p : cp) CHECK(p == cp.front());
  CHECK(cp.front() != kLightTone);

  RenderSpec outline = spec;
  outline.outline_giant = true;
  const auto op = pixels(render_ppm(s, outline), &w, &h);
  CHECK(std::count(op.begin(), op.end(), kOutline) > 0);
}
