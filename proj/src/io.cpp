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
#include "exlab/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "exlab/errors.hpp"

namespace exlab {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'E', 'X', 'L', 'A', 'B', 'F', '0', '1'};

static_assert(std::endian::native == std::endian::little, "payloads are written little-endian");

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

const Json& require(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ConfigError("field '" + path + "': expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError("field '" + path + "." + key + "': missing");
  return *it;
}

template <class T>
T get_as(const Json& j, const char* key, const std::string& path) {
  const Json& v = require(j, key, path);
  try {
    return v.get<T>();
  } catch (const Json::exception&) {
    throw ConfigError("field '" + path + "." + key + "': wrong type");
  }
}

template <class T>
T get_or(const Json& j, const char* key, const std::string& path, T fallback) {
  if (!j.contains(key)) return fallback;
  return get_as<T>(j, key, path);
}

Vec3 vec_from(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("field '" + path + "': expected three numbers");
  try {
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
  } catch (const Json::exception&) {
    throw ConfigError("field '" + path + "': expected three numbers");
  }
}

void append_raw(std::string& out, const void* p, std::size_t n) { out.append(static_cast<const char*>(p), n); }

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_quote(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter& CsvWriter::field(std::string_view s) {
  if (!first_) os_ << ',';
  os_ << csv_quote(s);
  first_ = false;
  return *this;
}

void CsvWriter::end_row() {
  os_ << '\n';
  first_ = true;
}

void CsvWriter::header(const std::vector<std::string>& names) {
  for (const auto& n : names) field(n);
  end_row();
}

Json ensemble_to_json(const EnsembleSpec& s) {
  Json j;
  j["kind"] = to_string(s.kind);
  switch (s.kind) {
    case EnsembleSpec::Kind::Kostlan:
      j["n"] = s.n;
      break;
    case EnsembleSpec::Kind::RSH:
      j["ell"] = s.ell;
      break;
    case EnsembleSpec::Kind::BandLimited:
      j["ell"] = s.ell;
      j["alpha"] = s.alpha;
      break;
    case EnsembleSpec::Kind::Mono:
      j["ell"] = s.ell;
      j["beta"] = s.beta;
      break;
    case EnsembleSpec::Kind::Isotropic:
      j["c"] = s.zonal.c;
      break;
    case EnsembleSpec::Kind::BargmannFock:
      j["waves"] = s.waves;
      break;
    case EnsembleSpec::Kind::PlaneWave:
      j["alpha"] = s.alpha;
      j["waves"] = s.waves;
      break;
  }
  return j;
}

EnsembleSpec ensemble_from_json(const Json& j, const std::string& path) {
  const std::string kind = get_as<std::string>(j, "kind", path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const char* known[] = {"kind", "n", "ell", "alpha", "beta", "waves", "c"};
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("field '" + path + "." + it.key() + "': unknown field");
  }
  try {
    if (kind == "kostlan") return EnsembleSpec::kostlan(get_as<int>(j, "n", path));
    if (kind == "rsh") return EnsembleSpec::rsh(get_as<int>(j, "ell", path));
    if (kind == "bandlimited")
      return EnsembleSpec::bandlimited(get_as<double>(j, "alpha", path), get_as<int>(j, "ell", path));
    if (kind == "mono") return EnsembleSpec::mono(get_as<double>(j, "beta", path), get_as<int>(j, "ell", path));
    if (kind == "isotropic") {
      ZonalCoefficients c;
      c.c = get_as<std::vector<double>>(j, "c", path);
      return EnsembleSpec::isotropic(c);
    }
    if (kind == "bargmann_fock" || kind == "bf") return EnsembleSpec::bargmann_fock(get_or<int>(j, "waves", path, 1024));
    if (kind == "plane_wave" || kind == "pw")
      return EnsembleSpec::plane_wave(get_or<double>(j, "alpha", path, 1.0), get_or<int>(j, "waves", path, 1024));
  } catch (const DomainError& e) {
    throw ConfigError("field '" + path + "': " + e.what());
  }
  throw ConfigError("field '" + path + ".kind': unknown ensemble '" + kind + "'");
}

Json grid_to_json(const Grid& g) {
  Json j;
  j["kind"] = to_string(g.kind());
  j["connectivity"] = g.connectivity() == Connectivity::Eight ? 8 : 4;
  j["cells"] = g.size();
  switch (g.kind()) {
    case GridKind::SphereLatLon:
      j["n_lat"] = g.full_rows();
      break;
    case GridKind::SphereWindow:
      j["n_lat"] = g.full_rows();
      j["row0"] = g.row_offset();
      j["rows"] = g.rows();
      j["col0"] = g.col_offset();
      j["cols"] = g.cols();
      break;
    case GridKind::SpherePatch: {
      Json rot = Json::array();
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) rot.push_back(g.patch_rotation()(r, c));
      j["rotation"] = rot;
      j["half_side"] = g.patch_half_side();
      j["n"] = g.rows();
      break;
    }
    case GridKind::Planar:
      j["side"] = g.planar_side();
      j["n"] = g.rows();
      break;
    case GridKind::Points: {
      Json pts = Json::array();
      for (std::size_t i = 0; i < g.size(); ++i) pts.push_back(vec_json(g.center(i)));
      j["points"] = pts;
      j["spherical"] = g.spherical();
      break;
    }
  }
  return j;
}

Grid grid_from_json(const Json& j) {
  const std::string path = "grid";
  const std::string kind = get_as<std::string>(j, "kind", path);
  const Connectivity conn = get_or<int>(j, "connectivity", path, 8) == 4 ? Connectivity::Four : Connectivity::Eight;
  if (kind == to_string(GridKind::SphereLatLon)) return Grid::sphere(get_as<int>(j, "n_lat", path), conn);
  if (kind == to_string(GridKind::SphereWindow)) {
    const int row0 = get_as<int>(j, "row0", path);
    return Grid::sphere_window(get_as<int>(j, "n_lat", path), row0, row0 + get_as<int>(j, "rows", path),
                               get_as<int>(j, "col0", path), get_as<int>(j, "cols", path), conn);
  }
  if (kind == to_string(GridKind::SpherePatch)) {
    const auto rot = get_as<std::vector<double>>(j, "rotation", path);
    if (rot.size() != 9) throw ConfigError("field 'grid.rotation': expected nine numbers");
    Mat3 m;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = rot[3 * r + c];
    return Grid::sphere_patch(m, get_as<double>(j, "half_side", path), get_as<int>(j, "n", path), conn);
  }
  if (kind == to_string(GridKind::Planar))
    return Grid::planar(get_as<double>(j, "side", path), get_as<int>(j, "n", path), conn);
  if (kind == to_string(GridKind::Points)) {
    std::vector<Vec3> pts;
    const Json& arr = require(j, "points", path);
    for (std::size_t i = 0; i < arr.size(); ++i) pts.push_back(vec_from(arr[i], "grid.points"));
    return Grid::points(std::move(pts), get_or<bool>(j, "spherical", path, true));
  }
  throw ConfigError("field 'grid.kind': unknown grid kind '" + kind + "'");
}

std::string sample_payload_bytes(const FieldSample& s) {
  std::string out;
  append_raw(out, kMagic, sizeof kMagic);
  const std::uint64_t n = s.values.size(), m = s.coeffs.size();
  append_raw(out, &n, 8);
  append_raw(out, s.values.data(), 8 * n);
  append_raw(out, &m, 8);
  append_raw(out, s.coeffs.data(), 8 * m);
  return out;
}

SampleFiles write_sample(const FieldSample& s, const fs::path& stem) {
  SampleFiles f{stem, stem};
  f.payload += ".bin";
  f.sidecar += ".json";
  const std::string bytes = sample_payload_bytes(s);
  Json side;
  side["format"] = "exlab-field-sample";
  side["version"] = 1;
  side["ensemble"] = ensemble_to_json(s.spec);
  side["seed"] = s.seed;
  side["grid"] = grid_to_json(*s.grid);
  side["values"] = s.values.size();
  side["coefficients"] = s.coeffs.size();
  side["coeff_lmin"] = s.coeff_lmin;
  side["coeff_lmax"] = s.coeff_lmax;
  side["payload"] = f.payload.filename().string();
  side["payload_fnv1a"] = hex64(fnv1a64(bytes));
  write_file(f.payload, bytes);
  write_file(f.sidecar, side.dump(2) + "\n");
  return f;
}

FieldSample read_sample(const fs::path& sidecar) {
  const Json side = parse_json_text(read_file(sidecar), sidecar.string());
  if (get_or<std::string>(side, "format", "sidecar", "") != "exlab-field-sample")
    throw ConfigError("field 'sidecar.format': not an exlab field sample sidecar");
  FieldSample s;
  s.spec = ensemble_from_json(require(side, "ensemble", "sidecar"), "sidecar.ensemble");
  s.seed = get_as<std::uint64_t>(side, "seed", "sidecar");
  s.grid = std::make_shared<const Grid>(grid_from_json(require(side, "grid", "sidecar")));
  s.coeff_lmin = get_or<int>(side, "coeff_lmin", "sidecar", 0);
  s.coeff_lmax = get_or<int>(side, "coeff_lmax", "sidecar", -1);
  const fs::path payload = sidecar.parent_path() / get_as<std::string>(side, "payload", "sidecar");
  const std::string bytes = read_file(payload);
  if (hex64(fnv1a64(bytes)) != get_as<std::string>(side, "payload_fnv1a", "sidecar"))
    throw IoError("payload checksum mismatch", payload.string());
  if (bytes.size() < 24 || std::memcmp(bytes.data(), kMagic, 8) != 0) throw IoError("not a field payload", payload.string());
  std::uint64_t n = 0, m = 0;
  std::memcpy(&n, bytes.data() + 8, 8);
  if (bytes.size() < 24 + 8 * n) throw IoError("truncated payload", payload.string());
  std::memcpy(&m, bytes.data() + 16 + 8 * n, 8);
  if (bytes.size() != 24 + 8 * (n + m)) throw IoError("truncated payload", payload.string());
  if (n != s.grid->size()) throw ConfigError("field 'sidecar.values': count does not match the grid");
  s.values.resize(n);
  s.coeffs.resize(m);
  std::memcpy(s.values.data(), bytes.data() + 16, 8 * n);
  std::memcpy(s.coeffs.data(), bytes.data() + 24 + 8 * n, 8 * m);
  return s;
}

void write_components_csv(std::ostream& os, const ComponentLabeling& lab) {
  CsvWriter w(os);
  w.header({"id", "cells", "area", "representative", "touches_boundary"});
  for (const auto& c : lab.components) {
    w.field(static_cast<std::uint64_t>(c.id))
        .field(static_cast<std::uint64_t>(c.cells))
        .field(c.area)
        .field(static_cast<std::uint64_t>(c.representative))
        .field(c.touches_boundary);
    w.end_row();
  }
}

Json tiling_to_json(const Tiling& t, const TilingReport* report) {
  Json j;
  j["u"] = t.u;
  j["epsilon"] = t.epsilon;
  j["region"] = t.region.describe();
  j["design"] = t.design;
  Json tiles = Json::array();
  for (const auto& s : t.tiles) {
    const TangentFrame f = s.frame();
    tiles.push_back({{"center", vec_json(f.base)}, {"e1", vec_json(f.e1)}, {"half_side", s.half_side}});
  }
  j["tiles"] = tiles;
  if (report) {
    j["report"] = {{"pass", report->pass()},
                   {"covered", report->covered},
                   {"min_exclusive_fraction", report->min_exclusive_fraction},
                   {"count", report->count},
                   {"count_bound", report->count_bound},
                   {"max_neighbors", report->max_neighbors},
                   {"isoperimetry_ok", report->isoperimetry_ok},
                   {"summary", report->summary()}};
  }
  return j;
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for writing", tmp.string());
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw IoError("write failed", tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename into place", path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading", path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error");
  }
}

}  // namespace exlab
