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

#include "cellfree/emit.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cellfree/config.hpp"

namespace cellfree {

OutputFormat parse_output_format(const std::string& name) {
    if (name == "csv")
        return OutputFormat::csv;
    if (name == "json")
        return OutputFormat::json;
    throw std::invalid_argument("unknown output format '" + name + "' (want csv or json)");
}

const char* output_format_name(OutputFormat format) {
    return format == OutputFormat::csv ? "csv" : "json";
}

void write_csv(std::ostream& os, const EmitPayload& payload) {
    for (const auto& [key, value] : payload.config)
        os << "# " << key << "=" << value << "\n";
    for (const auto& [key, value] : payload.experiment)
        os << "# " << key << "=" << value << "\n";
    if (payload.cdf_layout) {
        os << "scheme,quantity,value,probability\n";
        for (const CdfRow& row : payload.cdf)
            os << row.scheme << "," << row.quantity << "," << format_full(row.value) << ","
               << format_full(row.probability) << "\n";
    } else {
        os << "snapshot_id,user_id,scheme,quantity,value\n";
        for (const SampleRow& row : payload.samples)
            os << row.snapshot << "," << row.user << "," << row.scheme << ","
               << row.quantity << "," << format_full(row.value) << "\n";
    }
}

void write_json(std::ostream& os, const EmitPayload& payload) {
    nlohmann::ordered_json doc;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (const auto& [key, value] : payload.config)
        config[key] = value;
    nlohmann::ordered_json experiment = nlohmann::ordered_json::object();
    for (const auto& [key, value] : payload.experiment)
        experiment[key] = value;
    doc["config"] = std::move(config);
    doc["experiment"] = std::move(experiment);

    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    if (payload.cdf_layout) {
        doc["columns"] = {"scheme", "quantity", "value", "probability"};
        for (const CdfRow& row : payload.cdf)
            rows.push_back({row.scheme, row.quantity, row.value, row.probability});
    } else {
        doc["columns"] = {"snapshot_id", "user_id", "scheme", "quantity", "value"};
        for (const SampleRow& row : payload.samples)
            rows.push_back({row.snapshot, row.user, row.scheme, row.quantity, row.value});
    }
    doc["samples"] = std::move(rows);
    os << doc.dump(2) << "\n";
}

void write_payload_file(const std::string& path, const EmitPayload& payload,
                        OutputFormat format) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open output file: " + path);
    if (format == OutputFormat::csv)
        write_csv(os, payload);
    else
        write_json(os, payload);
    os.flush();
    if (!os)
        throw std::runtime_error("failed while writing output file: " + path);
}

} // namespace cellfree
