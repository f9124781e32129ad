#pragma once

#include "cksf/grid.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace cksf {

// CKSF1 snapshot: one ASCII header line
//     CKSF1 <field_name> <nx> <ny> <time>\n
// followed by nx*ny little-endian IEEE-754 doubles, row-major x fastest.

struct SnapshotHeader {
    std::string field_name;
    int nx = 0;
    int ny = 0;
    double time = 0.0;
};

struct Snapshot {
    SnapshotHeader header;
    std::vector<double> values;
};

std::string format_snapshot_header(const SnapshotHeader& header);

void write_snapshot(const std::filesystem::path& path, const std::string& field_name, double time,
                    int nx, int ny, std::span<const double> values);
void write_snapshot(const std::filesystem::path& path, const std::string& field_name, double time,
                    const ScalarField& field);

/// Reads and validates a snapshot; throws SnapshotError on a bad header or
/// payload length and IoError when the file cannot be opened.
Snapshot read_snapshot(const std::filesystem::path& path);

/// Cell-centered averages of the two MAC velocity components.
ScalarField cell_velocity_x(const MacVelocity& u);
ScalarField cell_velocity_y(const MacVelocity& u);

} // namespace cksf
