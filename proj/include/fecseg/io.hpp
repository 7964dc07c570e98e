#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>

#include "fecseg/core.hpp"

namespace fecseg {

enum class CloudFormat {
  kKittiBin,  ///< little-endian float32 (x, y, z, intensity) records
  kPlyAscii,  ///< ASCII PLY, vertex properties x, y, z [, intensity]
  kCsvXyz,    ///< x,y,z[,intensity] with an optional header row
};

/// ".bin" -> kitti, ".ply" -> ply, ".csv"/".txt"/".xyz" -> csv.
/// Throws FormatError for anything else.
[[nodiscard]] CloudFormat detect_format(const std::filesystem::path& path);

/// Accepts "kitti_bin"/"kitti"/"bin", "ply_ascii"/"ply", "csv_xyz"/"csv".
[[nodiscard]] std::optional<CloudFormat> parse_format_name(std::string_view name);
[[nodiscard]] std::string_view format_name(CloudFormat format);

/// Record order becomes point index order. Throws IoError when the file
/// cannot be opened, FormatError on malformed content (byte offset for
/// kitti_bin, line number for text formats) and NonFiniteError naming the
/// record index of a NaN or infinite coordinate.
[[nodiscard]] PointCloud read_cloud(const std::filesystem::path& path,
                                    std::optional<CloudFormat> format = {});
[[nodiscard]] PointCloud read_cloud(std::istream& in, CloudFormat format);

void write_cloud(const PointCloud& cloud, const std::filesystem::path& path,
                 std::optional<CloudFormat> format = {});
void write_cloud(const PointCloud& cloud, std::ostream& out, CloudFormat format);

/// CSV with header "index,label", one row per point, index ascending.
void write_labels(std::span<const Label> labels,
                  const std::filesystem::path& path);
void write_labels(std::span<const Label> labels, std::ostream& out);

/// Inverse of write_labels; rows must be numbered 0, 1, 2, ... in order.
[[nodiscard]] LabelMap read_labels(const std::filesystem::path& path);
[[nodiscard]] LabelMap read_labels(std::istream& in);

/// Color used for a label: mid-gray for 0, otherwise a fixed 256-entry
/// palette indexed by label mod 256.
[[nodiscard]] std::array<std::uint8_t, 3> label_color(Label label);

/// ASCII PLY with x, y, z and uchar red, green, blue per vertex.
/// Throws LengthMismatchError.
void write_colored_ply(const PointCloud& cloud, std::span<const Label> labels,
                       const std::filesystem::path& path);
void write_colored_ply(const PointCloud& cloud, std::span<const Label> labels,
                       std::ostream& out);

}  // namespace fecseg
