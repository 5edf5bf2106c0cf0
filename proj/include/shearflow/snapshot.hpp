#pragma once

/// @file snapshot.hpp
/// @brief SF2D binary velocity snapshots (layout in docs/format.md).

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace shearflow {

enum class Geometry : std::uint8_t { torus = 0, channel = 1 };

std::string to_string(Geometry g);

inline constexpr std::uint32_t kSnapshotVersion = 1;

struct SnapshotData {
    Geometry geometry = Geometry::torus;
    std::uint32_t n1 = 0;   ///< samples along x1
    std::uint32_t n2 = 0;   ///< torus: equals n1; channel: number of x2 intervals (rows = n2 + 1)
    double time = 0.0;
    std::vector<double> u1; ///< row-major, row index along x2
    std::vector<double> u2;

    [[nodiscard]] std::size_t rows() const { return geometry == Geometry::torus ? n1 : n2 + 1; }
};

std::string encode_snapshot(const SnapshotData& s);
SnapshotData decode_snapshot(const std::string& bytes);

void write_snapshot(const std::filesystem::path& path, const SnapshotData& s);
SnapshotData read_snapshot(const std::filesystem::path& path);

/// All *.sf2d files of a directory, ordered by snapshot time.
std::vector<SnapshotData> read_snapshot_series(const std::filesystem::path& dir);

} // namespace shearflow
