#include "steinlab/emit.hpp"

#include <cstdio>
#include <fstream>

namespace steinlab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string table_to_csv(const Table& t) {
    std::string out;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out += ',';
        out += t.columns[c];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

nlohmann::json table_to_json(const Table& t, const RunManifest& manifest) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json obj;
        for (std::size_t c = 0; c < row.size() && c < t.columns.size(); ++c)
            obj[t.columns[c]] = row[c];
        rows.push_back(obj);
    }
    nlohmann::json j;
    j["rows"] = rows;
    j["manifest"] = manifest.to_json();
    return j;
}

void emit_table(const Table& t, EmitFormat fmt, const std::filesystem::path& path,
                const RunManifest& manifest) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string());
    if (fmt == EmitFormat::csv) {
        os << table_to_csv(t);
        if (!os) throw IoError("write failed: " + path.string());
        os.close();
        std::filesystem::path mpath = path;
        mpath += ".manifest.json";
        std::ofstream ms(mpath, std::ios::binary);
        if (!ms) throw IoError("cannot open " + mpath.string());
        ms << manifest.to_json().dump(2) << '\n';
        if (!ms) throw IoError("write failed: " + mpath.string());
    } else {
        os << table_to_json(t, manifest).dump(2) << '\n';
        if (!os) throw IoError("write failed: " + path.string());
    }
}

EmitFormat parse_format(const std::string& name) {
    if (name == "csv") return EmitFormat::csv;
    if (name == "json") return EmitFormat::json;
    throw std::invalid_argument("format must be csv or json");
}

}  // namespace steinlab
