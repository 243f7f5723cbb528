#include "scoutrl/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace scoutrl {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void ensure_directory(const std::string& dir) {
    if (!dir.empty()) std::filesystem::create_directories(dir);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_grid_csv(const std::string& path, const Field& values, const GridSpec& grid,
                    uint64_t config_hash) {
    if (values.size() != grid.cell_count())
        throw std::invalid_argument("write_grid_csv: field size mismatch");
    std::string text = "# config=" + std::to_string(config_hash) + "\n";
    for (int iy = 0; iy < grid.cells_y; ++iy) {
        for (int ix = 0; ix < grid.cells_x; ++ix) {
            if (ix) text += ",";
            text += format_double(values[grid.index({ix, iy})]);
        }
        text += "\n";
    }
    write_text_file(path, text);
}

Field read_grid_csv(const std::string& path, const GridSpec& grid) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    Field values(grid.cell_count());
    std::string line;
    int iy = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (iy >= grid.cells_y) throw std::runtime_error("grid csv has too many rows: " + path);
        std::stringstream ss(line);
        std::string cell;
        int ix = 0;
        while (std::getline(ss, cell, ',')) {
            if (ix >= grid.cells_x) throw std::runtime_error("grid csv row too long: " + path);
            values[grid.index({ix, iy})] = std::stod(cell);
            ++ix;
        }
        if (ix != grid.cells_x) throw std::runtime_error("grid csv row too short: " + path);
        ++iy;
    }
    if (iy != grid.cells_y) throw std::runtime_error("grid csv has too few rows: " + path);
    return values;
}

CsvBuilder::CsvBuilder(uint64_t config_hash, const std::vector<std::string>& columns)
    : columns_(columns.size()) {
    text_ = "# config=" + std::to_string(config_hash) + "\n";
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) text_ += ",";
        text_ += columns[i];
    }
    text_ += "\n";
}

void CsvBuilder::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::invalid_argument("CsvBuilder: column count mismatch");
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ",";
        text_ += cells[i];
    }
    text_ += "\n";
}

std::string manifest_json(const RunConfig& config, const std::string& kind,
                          const std::vector<uint64_t>& seeds) {
    nlohmann::json j;
    j["artifact_version"] = kArtifactVersion;
    j["kind"] = kind;
    j["config_hash"] = config.hash();
    j["config"] = config.resolved_text();
    j["seeds"] = seeds;
    return j.dump(2) + "\n";
}

void write_manifest(const std::string& path, const RunConfig& config, const std::string& kind,
                    const std::vector<uint64_t>& seeds) {
    write_text_file(path, manifest_json(config, kind, seeds));
}

RunConfig config_from_manifest(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    RunConfig config = parse_config(j.at("config").get<std::string>());
    config.validate();
    if (config.hash() != j.at("config_hash").get<uint64_t>())
        throw std::runtime_error("manifest: config hash mismatch");
    return config;
}

}  // namespace scoutrl
