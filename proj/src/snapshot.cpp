#include "cksf/snapshot.hpp"

#include "cksf/diagnostics.hpp"
#include "cksf/errors.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace cksf {

namespace {

void encode_le(double v, char* out) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out[b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
}

double decode_le(const char* in) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[b])) << (8 * b);
    return std::bit_cast<double>(bits);
}

bool valid_field_name(const std::string& name) {
    if (name.empty()) return false;
    for (char ch : name) {
        if (ch == ' ' || ch == '\n' || ch == '\r' || ch == '\t') return false;
    }
    return true;
}

} // namespace

std::string format_snapshot_header(const SnapshotHeader& header) {
    return "CKSF1 " + header.field_name + " " + std::to_string(header.nx) + " " + std::to_string(header.ny) + " " +
           format_double(header.time) + "\n";
}

void write_snapshot(const std::filesystem::path& path, const std::string& field_name, double time, int nx, int ny,
                    std::span<const double> values) {
    if (!valid_field_name(field_name)) throw InvalidArgument("snapshot field name must be one token");
    if (values.size() != static_cast<std::size_t>(nx) * ny) throw GridMismatch("snapshot payload length mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << format_snapshot_header({field_name, nx, ny, time});
    std::vector<char> payload(values.size() * 8);
    for (std::size_t k = 0; k < values.size(); ++k) encode_le(values[k], payload.data() + 8 * k);
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw IoError("failed writing " + path.string());
}

void write_snapshot(const std::filesystem::path& path, const std::string& field_name, double time,
                    const ScalarField& field) {
    write_snapshot(path, field_name, time, field.grid().nx(), field.grid().ny(), field.values());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw SnapshotError(path.string() + ": missing header line");

    std::istringstream fields(line);
    std::string magic, name, nx_text, ny_text, time_text, extra;
    fields >> magic >> name >> nx_text >> ny_text >> time_text;
    if (magic != "CKSF1" || time_text.empty() || (fields >> extra)) {
        throw SnapshotError(path.string() + ": bad header '" + line + "'");
    }
    Snapshot snap;
    snap.header.field_name = name;
    auto parse = [&](const std::string& text, auto& value) {
        const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
            throw SnapshotError(path.string() + ": bad header value '" + text + "'");
        }
    };
    parse(nx_text, snap.header.nx);
    parse(ny_text, snap.header.ny);
    parse(time_text, snap.header.time);
    if (snap.header.nx <= 0 || snap.header.ny <= 0) throw SnapshotError(path.string() + ": nonpositive shape");

    const std::size_t count = static_cast<std::size_t>(snap.header.nx) * snap.header.ny;
    std::vector<char> payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (payload.size() != count * 8) {
        throw SnapshotError(path.string() + ": payload has " + std::to_string(payload.size()) + " bytes, expected " +
                            std::to_string(count * 8));
    }
    snap.values.resize(count);
    for (std::size_t k = 0; k < count; ++k) snap.values[k] = decode_le(payload.data() + 8 * k);
    return snap;
}

ScalarField cell_velocity_x(const MacVelocity& u) {
    const Grid2D& g = u.grid();
    ScalarField out(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) out(i, j) = 0.5 * (u.x(i, j) + u.x(i + 1, j));
    return out;
}

ScalarField cell_velocity_y(const MacVelocity& u) {
    const Grid2D& g = u.grid();
    ScalarField out(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) out(i, j) = 0.5 * (u.y(i, j) + u.y(i, j + 1));
    return out;
}

} // namespace cksf
