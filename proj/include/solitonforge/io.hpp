#pragma once

// Binary containers: one line of JSON header, a newline, then little-endian
// float64 data. Profiles (.prof) store values followed by derivatives;
// fields (.fld) store interleaved real/imaginary parts.

#include <filesystem>
#include <string>

#include "json.hpp"

#include "solitonforge/grid.hpp"
#include "solitonforge/profiles.hpp"

namespace solitonforge {

using nlohmann::json;

void write_profile(const std::filesystem::path& path, const BoundStateProfile& profile,
                   const json& extra = json::object());
void write_profile(const std::filesystem::path& path, const KinkProfile& profile,
                   const json& extra = json::object());

struct ProfileFile {
  json header;
  SampledProfile samples;
};

ProfileFile read_profile(const std::filesystem::path& path);

void write_field(const std::filesystem::path& path, const ComplexField& field,
                 const json& extra = json::object());
ComplexField read_field(const std::filesystem::path& path, json* header = nullptr);

/// "%.17g" formatting used for every CSV cell.
std::string format_number(double value);

/// Writes a CSV with a header row; every row must match the header width.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

void write_json(const std::filesystem::path& path, const json& value);

}  // namespace solitonforge
