#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "steinlab/manifest.hpp"
#include "steinlab/table.hpp"

namespace steinlab {

enum class EmitFormat { csv, json };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 17 significant digits, enough to round-trip a double exactly
std::string format_double(double v);

std::string table_to_csv(const Table& t);

// array of row objects plus the manifest under "manifest"
nlohmann::json table_to_json(const Table& t, const RunManifest& manifest);

// CSV gets a sidecar <path>.manifest.json so every output file carries its
// provenance; JSON embeds the manifest.  Throws IoError on failure.
void emit_table(const Table& t, EmitFormat fmt, const std::filesystem::path& path,
                const RunManifest& manifest);

EmitFormat parse_format(const std::string& name);

}  // namespace steinlab
