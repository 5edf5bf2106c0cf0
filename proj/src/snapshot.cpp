#include "shearflow/snapshot.hpp"

#include "shearflow/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace shearflow {

namespace {

static_assert(std::endian::native == std::endian::little, "SF2D I/O assumes a little-endian host");

template <class T>
void put(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

template <class T>
T get(const std::string& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) {
        throw InvalidInput("SF2D: truncated snapshot");
    }
    T v;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

} // namespace

std::string to_string(Geometry g) { return g == Geometry::torus ? "torus" : "channel"; }

std::string encode_snapshot(const SnapshotData& s) {
    const std::size_t count = s.rows() * s.n1;
    if (s.u1.size() != count || s.u2.size() != count) {
        throw InvalidInput("SF2D: sample count does not match the header");
    }
    std::string out;
    out.reserve(32 + 16 * count);
    out.append("SF2D", 4);
    put<std::uint32_t>(out, kSnapshotVersion);
    put<std::uint32_t>(out, s.n1);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(s.geometry));
    put<double>(out, s.time);
    if (s.geometry == Geometry::channel) {
        put<std::uint32_t>(out, s.n2);
    }
    for (double v : s.u1) {
        put<double>(out, v);
    }
    for (double v : s.u2) {
        put<double>(out, v);
    }
    return out;
}

SnapshotData decode_snapshot(const std::string& bytes) {
    if (bytes.size() < 4 || bytes.compare(0, 4, "SF2D") != 0) {
        throw InvalidInput("SF2D: bad magic");
    }
    std::size_t pos = 4;
    const auto version = get<std::uint32_t>(bytes, pos);
    if (version != kSnapshotVersion) {
        throw InvalidInput("SF2D: unsupported version " + std::to_string(version));
    }
    SnapshotData s;
    s.n1 = get<std::uint32_t>(bytes, pos);
    const auto tag = get<std::uint8_t>(bytes, pos);
    if (tag > 1) {
        throw InvalidInput("SF2D: unknown geometry tag " + std::to_string(tag));
    }
    s.geometry = static_cast<Geometry>(tag);
    s.time = get<double>(bytes, pos);
    s.n2 = s.geometry == Geometry::channel ? get<std::uint32_t>(bytes, pos) : s.n1;
    const std::size_t count = s.rows() * s.n1;
    if (bytes.size() - pos != 2 * count * sizeof(double)) {
        throw InvalidInput("SF2D: payload size does not match the header");
    }
    s.u1.resize(count);
    s.u2.resize(count);
    for (auto& v : s.u1) {
        v = get<double>(bytes, pos);
    }
    for (auto& v : s.u2) {
        v = get<double>(bytes, pos);
    }
    return s;
}

void write_snapshot(const std::filesystem::path& path, const SnapshotData& s) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InvalidInput("SF2D: cannot open " + path.string() + " for writing");
    }
    const std::string bytes = encode_snapshot(s);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

SnapshotData read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidInput("SF2D: cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return decode_snapshot(buf.str());
}

std::vector<SnapshotData> read_snapshot_series(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw InvalidInput("SF2D: not a directory: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".sf2d") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<SnapshotData> out;
    out.reserve(files.size());
    for (const auto& f : files) {
        out.push_back(read_snapshot(f));
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
    return out;
}

} // namespace shearflow
