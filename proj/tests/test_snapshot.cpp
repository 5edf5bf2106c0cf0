#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "shearflow/errors.hpp"
#include "shearflow/snapshot.hpp"
#include "support.hpp"

#include <cmath>
#include <cstring>

using namespace shearflow;

namespace {

SnapshotData sample(Geometry g, std::uint32_t n1, std::uint32_t n2, double t) {
    SnapshotData s;
    s.geometry = g;
    s.n1 = n1;
    s.n2 = g == Geometry::torus ? n1 : n2;
    s.time = t;
    const std::size_t count = s.rows() * s.n1;
    for (std::size_t i = 0; i < count; ++i) {
        s.u1.push_back(std::sin(0.1 * static_cast<double>(i)) + 1e-300);
        s.u2.push_back(-1.0 / (1.0 + static_cast<double>(i)));
    }
    return s;
}

void check_equal(const SnapshotData& a, const SnapshotData& b) {
    CHECK(a.geometry == b.geometry);
    CHECK(a.n1 == b.n1);
    CHECK(a.n2 == b.n2);
    CHECK(a.time == b.time);
    CHECK(a.u1 == b.u1);
    CHECK(a.u2 == b.u2);
}

} // namespace

TEST_CASE("torus snapshot round trip is bit exact") {
    const auto s = sample(Geometry::torus, 8, 0, 0.125);
    const auto bytes = encode_snapshot(s);
    CHECK(bytes.size() == 4 + 4 + 4 + 1 + 8 + 2 * 64 * 8);
    CHECK(bytes.compare(0, 4, "SF2D") == 0);
    check_equal(decode_snapshot(bytes), s);
}

TEST_CASE("channel snapshot stores n2 and n2 + 1 rows") {
    const auto s = sample(Geometry::channel, 8, 6, 3.5);
    CHECK(s.rows() == 7);
    const auto bytes = encode_snapshot(s);
    CHECK(bytes.size() == 4 + 4 + 4 + 1 + 8 + 4 + 2 * 56 * 8);
    check_equal(decode_snapshot(bytes), s);
}

TEST_CASE("file round trip and series ordering by time") {
    const auto dir = testing::scratch_dir("snapshot_series");
    write_snapshot(dir / "b.sf2d", sample(Geometry::torus, 4, 0, 2.0));
    write_snapshot(dir / "a.sf2d", sample(Geometry::torus, 4, 0, 1.0));
    write_snapshot(dir / "c.sf2d", sample(Geometry::torus, 4, 0, 0.5));
    check_equal(read_snapshot(dir / "a.sf2d"), sample(Geometry::torus, 4, 0, 1.0));
    const auto series = read_snapshot_series(dir);
    REQUIRE(series.size() == 3);
    CHECK(series[0].time == 0.5);
    CHECK(series[1].time == 1.0);
    CHECK(series[2].time == 2.0);
}

TEST_CASE("bad magic, version and geometry tag are rejected") {
    auto bytes = encode_snapshot(sample(Geometry::torus, 4, 0, 0.0));
    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(decode_snapshot(bad), InvalidInput);
    bad = bytes;
    bad[4] = 7;
    CHECK_THROWS_AS(decode_snapshot(bad), InvalidInput);
    bad = bytes;
    bad[12] = 5;
    CHECK_THROWS_AS(decode_snapshot(bad), InvalidInput);
    CHECK_THROWS_AS(decode_snapshot(""), InvalidInput);
}

TEST_CASE("truncated and oversized payloads are rejected") {
    const auto bytes = encode_snapshot(sample(Geometry::channel, 4, 4, 0.0));
    for (std::size_t cut : {std::size_t{3}, std::size_t{10}, std::size_t{23}, bytes.size() - 1}) {
        CHECK_THROWS_AS(decode_snapshot(bytes.substr(0, cut)), InvalidInput);
    }
    CHECK_THROWS_AS(decode_snapshot(bytes + "x"), InvalidInput);
}

TEST_CASE("encode checks the sample count") {
    auto s = sample(Geometry::torus, 4, 0, 0.0);
    s.u2.pop_back();
    CHECK_THROWS_AS(encode_snapshot(s), InvalidInput);
}

TEST_CASE("missing file is an input error") {
    CHECK_THROWS_AS(read_snapshot("/nonexistent/x.sf2d"), InvalidInput);
}
