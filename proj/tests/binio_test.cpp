#include <doctest.h>

#include "qcopt/binio.hpp"
#include "qcopt/rng.hpp"
#include "testutil.hpp"

using namespace qcopt;

TEST_SUITE("binio") {

TEST_CASE("scalar round-trips") {
    ByteWriter w;
    w.u8(0xAB);
    w.u16(0xBEEF);
    w.u32(0xDEADBEEF);
    w.u64(0x0123456789ABCDEFULL);
    w.i32(-42);
    w.f32(1.5f);
    w.f64(-0.1);
    w.str("hello");
    ByteReader r(w.data());
    CHECK(r.u8() == 0xAB);
    CHECK(r.u16() == 0xBEEF);
    CHECK(r.u32() == 0xDEADBEEF);
    CHECK(r.u64() == 0x0123456789ABCDEFULL);
    CHECK(r.i32() == -42);
    CHECK(r.f32() == 1.5f);
    CHECK(r.f64() == -0.1);
    CHECK(r.str() == "hello");
    CHECK(r.remaining() == 0);
}

TEST_CASE("little-endian layout") {
    ByteWriter w;
    w.u32(0x01020304);
    CHECK(w.data() == std::string("\x04\x03\x02\x01", 4));
}

TEST_CASE("truncated reads throw") {
    ByteWriter w;
    w.u16(7);
    ByteReader r(w.data());
    CHECK(r.u8() == 7);
    CHECK(r.u8() == 0);
    CHECK_THROWS_AS(r.u8(), IoError);
    ByteReader r2(w.data());
    CHECK_THROWS_AS(r2.u64(), IoError);
}

TEST_CASE("crc32 matches the standard check value") {
    CHECK(crc32_of("123456789") == 0xCBF43926u);
    CHECK(crc32_of("") == 0u);
}

TEST_CASE("frame and check_frame") {
    const char magic[4] = {'Q', 'T', 'S', 'T'};
    std::string payload = "payload bytes";
    std::string file = frame_file(magic, 3, payload);

    SUBCASE("round-trip") { CHECK(check_frame(magic, 3, file) == payload); }
    SUBCASE("bit flip is caught") {
        for (size_t i : {size_t{0}, file.size() / 2, file.size() - 1}) {
            std::string bad = file;
            bad[i] = static_cast<char>(bad[i] ^ 0x40);
            CHECK_THROWS_AS(check_frame(magic, 3, bad), IoError);
        }
    }
    SUBCASE("wrong version is an explicit error") {
        std::string v1 = frame_file(magic, 1, payload);
        CHECK_THROWS_WITH_AS(check_frame(magic, 3, v1),
                             doctest::Contains("version"), IoError);
    }
    SUBCASE("wrong magic") {
        const char other[4] = {'N', 'O', 'P', 'E'};
        CHECK_THROWS_AS(check_frame(other, 3, file), IoError);
    }
    SUBCASE("truncated file") {
        CHECK_THROWS_AS(check_frame(magic, 3, std::string_view(file).substr(0, 5)), IoError);
    }
}

TEST_CASE("file round-trip") {
    testutil::TempDir dir;
    std::string data = "some\0binary\xFF data";
    write_file(dir / "blob.bin", data);
    CHECK(read_file(dir / "blob.bin") == data);
    CHECK_THROWS_AS(read_file(dir / "missing.bin"), IoError);
}

TEST_CASE("gate-set descriptor round-trip") {
    ByteWriter w;
    write_gate_set(w, GateSet::iontrap());
    ByteReader r(w.data());
    GateSet gs = read_gate_set(r);
    CHECK(gs.name == "iontrap");
    CHECK(gs.kinds == GateSet::iontrap().kinds);

    ByteWriter bad;
    bad.str("x");
    bad.u8(1);
    bad.u8(200);  // invalid kind id
    ByteReader rb(bad.data());
    CHECK_THROWS_AS(read_gate_set(rb), IoError);
}

TEST_CASE("circuit record round-trip") {
    Circuit c = random_circuit(5, 40, GateSet::iontrap(), 99);
    ByteWriter w;
    write_circuit(w, c);
    ByteReader r(w.data());
    CHECK(gates_identical(read_circuit(r), c));
}

}  // TEST_SUITE
