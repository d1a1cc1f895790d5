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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "exlab/excursion.hpp"
#include "exlab/grid.hpp"
#include "exlab/samplers.hpp"
#include "exlab/tiling.hpp"

namespace exlab {

using Json = nlohmann::json;

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

// Round-trip decimal form: %.17g, with nan / inf / -inf.
std::string format_double(double v);

// RFC 4180 writer: fields containing a comma, quote, CR or LF are quoted, quotes doubled; CRLF-free (LF rows).
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  CsvWriter& field(std::string_view s);
  CsvWriter& field(double v) { return field(std::string_view(format_double(v))); }
  CsvWriter& field(std::int64_t v) { return field(std::string_view(std::to_string(v))); }
  CsvWriter& field(std::uint64_t v) { return field(std::string_view(std::to_string(v))); }
  CsvWriter& field(int v) { return field(static_cast<std::int64_t>(v)); }
  CsvWriter& field(bool v) { return field(std::string_view(v ? "1" : "0")); }
  CsvWriter& field(const char* s) { return field(std::string_view(s)); }
  CsvWriter& field(const std::string& s) { return field(std::string_view(s)); }
  void end_row();
  void header(const std::vector<std::string>& names);

 private:
  std::ostream& os_;
  bool first_ = true;
};

std::string csv_quote(std::string_view s);

// --- ensemble and grid descriptions --------------------------------------------

Json ensemble_to_json(const EnsembleSpec& spec);
// Throws ConfigError naming the offending field under `path`.
EnsembleSpec ensemble_from_json(const Json& j, const std::string& path = "ensemble");
Json grid_to_json(const Grid& grid);
Grid grid_from_json(const Json& j);

// --- field samples: binary payload + JSON sidecar --------------------------------
// Payload: "EXLABF01", uint64 value count, values (float64 LE), uint64 coefficient count, coefficients.

struct SampleFiles {
  std::filesystem::path payload;
  std::filesystem::path sidecar;
};

SampleFiles write_sample(const FieldSample& s, const std::filesystem::path& stem);
FieldSample read_sample(const std::filesystem::path& sidecar);
std::string sample_payload_bytes(const FieldSample& s);

// --- structured exports -------------------------------------------------------------

void write_components_csv(std::ostream& os, const ComponentLabeling& lab);
Json tiling_to_json(const Tiling& t, const TilingReport* report = nullptr);

// Atomically replaces `path` with `bytes` (write to a temporary, then rename).
void write_file(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

// Parses JSON text, mapping syntax errors to ConfigError with line and column.
Json parse_json_text(const std::string& text, const std::string& origin);

}  // namespace exlab
