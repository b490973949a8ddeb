// SPDX-License-Identifier: Apache-2.0
//
// cellfree-sim: downlink rate simulator for cell-free massive MIMO
// Copyright (C) 2026 cellfree-sim contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace cellfree {

// One emitted sample: (snapshot_id, user_id, scheme, quantity, value).
// `scheme` and `quantity` are short tokens without commas or quotes.
struct SampleRow {
    long long snapshot = 0;
    int user = 0;
    std::string scheme;
    std::string quantity;
    double value = 0.0;
};

// One pre-sorted distribution point: (scheme, quantity, value, probability).
struct CdfRow {
    std::string scheme;
    std::string quantity;
    double value = 0.0;
    double probability = 0.0;
};

using MetadataEntries = std::vector<std::pair<std::string, std::string>>;

enum class OutputFormat { csv, json };

// Parses "csv" / "json"; throws std::invalid_argument otherwise.
OutputFormat parse_output_format(const std::string& name);
const char* output_format_name(OutputFormat format);

// A complete result set: resolved config entries, experiment entries, and
// either raw samples or pre-sorted CDF points (cdf_layout selects which).
// Metadata keys and values round-trip: CSV embeds them as "# key=value"
// lines that the config parser reads back, JSON as string-valued objects.
struct EmitPayload {
    MetadataEntries config;
    MetadataEntries experiment;
    std::vector<SampleRow> samples;
    std::vector<CdfRow> cdf;
    bool cdf_layout = false;
};

// "# key=value" header lines, a column header, then one line per row with
// values printed at full round-trip precision.
void write_csv(std::ostream& os, const EmitPayload& payload);

// {"config": {...}, "experiment": {...}, "columns": [...], "samples": [[...]]}
// with config/experiment values as the same strings the CSV header carries
// and sample values as JSON numbers (shortest round-trip form).
void write_json(std::ostream& os, const EmitPayload& payload);

// Writes in the chosen format; throws std::runtime_error if the file cannot
// be created or written.
void write_payload_file(const std::string& path, const EmitPayload& payload,
                        OutputFormat format);

} // namespace cellfree
