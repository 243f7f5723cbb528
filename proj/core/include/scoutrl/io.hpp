#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scoutrl/belief.hpp"
#include "scoutrl/config.hpp"
#include "scoutrl/grid.hpp"

namespace scoutrl {

// Shortest round-trippable decimal text for a double ("%.17g").
std::string format_double(double v);

void ensure_directory(const std::string& dir);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Row-major numeric grid with a leading "# config=<hash>" comment line.
void write_grid_csv(const std::string& path, const Field& values, const GridSpec& grid,
                    uint64_t config_hash);
Field read_grid_csv(const std::string& path, const GridSpec& grid);

// Deterministic CSV assembly: comment line with the config hash, one header
// row, then data rows.
class CsvBuilder {
public:
    CsvBuilder(uint64_t config_hash, const std::vector<std::string>& columns);

    void add_row(const std::vector<std::string>& cells);
    const std::string& text() const { return text_; }
    void write(const std::string& path) const { write_text_file(path, text_); }

private:
    size_t columns_ = 0;
    std::string text_;
};

// JSON manifest with the fully resolved config, its hash, the seed list and
// the artifact version; keys are emitted sorted so the bytes are stable.
std::string manifest_json(const RunConfig& config, const std::string& kind,
                          const std::vector<uint64_t>& seeds);
void write_manifest(const std::string& path, const RunConfig& config, const std::string& kind,
                    const std::vector<uint64_t>& seeds);

// Round-trip check helper: the resolved config embedded in a manifest.
RunConfig config_from_manifest(const std::string& json_text);

inline constexpr const char* kArtifactVersion = "scoutrl-0.1.0";

}  // namespace scoutrl
