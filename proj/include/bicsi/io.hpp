#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bicsi/common.hpp"

namespace bicsi {

/// Writes to a sibling temp file, then renames over `path`, so readers never
/// observe a partially written file.
void write_file_atomic(const std::filesystem::path &path, std::string_view contents);
void write_file_atomic(const std::filesystem::path &path,
                       std::span<const std::uint8_t> contents);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path &path);

/// A row of a positions manifest: "label,x,y,file". Relative file paths are
/// resolved against the manifest's directory when read.
struct ManifestRow {
  std::string label;
  Coord coord;
  std::filesystem::path file;
};

/// A header row starting with "label" or '#' lines are skipped.
std::vector<ManifestRow> read_manifest(const std::filesystem::path &path);
std::string format_manifest(std::span<const ManifestRow> rows);

}  // namespace bicsi
