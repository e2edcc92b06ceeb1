#include "qcopt/binio.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>

namespace qcopt {

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

void ByteWriter::u16(uint16_t v) { bytes(&v, 2); }
void ByteWriter::u32(uint32_t v) { bytes(&v, 4); }
void ByteWriter::u64(uint64_t v) { bytes(&v, 8); }
void ByteWriter::f32(float v) { bytes(&v, 4); }
void ByteWriter::f64(double v) { bytes(&v, 8); }

void ByteWriter::bytes(const void* p, size_t n) {
    buf_.append(static_cast<const char*>(p), n);
}

void ByteWriter::str(std::string_view s) {
    u32(static_cast<uint32_t>(s.size()));
    bytes(s.data(), s.size());
}

void ByteReader::need(size_t n) {
    if (pos_ + n > data_.size()) throw IoError("truncated input: need " + std::to_string(n) +
                                               " bytes at offset " + std::to_string(pos_));
}

uint8_t ByteReader::u8() {
    need(1);
    return static_cast<uint8_t>(data_[pos_++]);
}

uint16_t ByteReader::u16() {
    uint16_t v;
    raw(&v, 2);
    return v;
}

uint32_t ByteReader::u32() {
    uint32_t v;
    raw(&v, 4);
    return v;
}

uint64_t ByteReader::u64() {
    uint64_t v;
    raw(&v, 8);
    return v;
}

float ByteReader::f32() {
    float v;
    raw(&v, 4);
    return v;
}

double ByteReader::f64() {
    double v;
    raw(&v, 8);
    return v;
}

std::string ByteReader::str() {
    uint32_t n = u32();
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
}

void ByteReader::raw(void* p, size_t n) {
    need(n);
    std::memcpy(p, data_.data() + pos_, n);
    pos_ += n;
}

std::string_view ByteReader::view(size_t from, size_t n) const {
    if (from + n > data_.size()) throw IoError("view out of range");
    return data_.substr(from, n);
}

uint32_t crc32_of(std::string_view data) {
    uLong c = ::crc32(0L, Z_NULL, 0);
    // zlib takes uInt-sized chunks.
    size_t pos = 0;
    while (pos < data.size()) {
        uInt chunk = static_cast<uInt>(std::min<size_t>(data.size() - pos, 1u << 30));
        c = ::crc32(c, reinterpret_cast<const Bytef*>(data.data() + pos), chunk);
        pos += chunk;
    }
    return static_cast<uint32_t>(c);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
    return data;
}

void write_file(const std::filesystem::path& path, std::string_view data) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot create " + tmp.string());
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw IoError("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("rename failed: " + path.string() + ": " + ec.message());
    }
}

void write_gate_set(ByteWriter& w, const GateSet& gs) {
    w.str(gs.name);
    w.u8(static_cast<uint8_t>(gs.kinds.size()));
    for (GateKind k : gs.kinds) w.u8(static_cast<uint8_t>(k));
}

GateSet read_gate_set(ByteReader& r) {
    GateSet gs;
    gs.name = r.str();
    uint8_t n = r.u8();
    for (int i = 0; i < n; ++i) {
        uint8_t k = r.u8();
        if (k >= kGateKindCount) throw IoError("gate-set descriptor: bad kind id");
        gs.kinds.push_back(static_cast<GateKind>(k));
    }
    if (gs.kinds.empty()) throw IoError("gate-set descriptor: empty");
    return gs;
}

void write_circuit(ByteWriter& w, const Circuit& c) {
    w.u32(static_cast<uint32_t>(c.width));
    w.u32(static_cast<uint32_t>(c.gates.size()));
    for (const Gate& g : c.gates) {
        w.u8(static_cast<uint8_t>(g.kind));
        w.i32(g.q0);
        w.i32(g.q1);
        w.f64(g.angle);
    }
}

Circuit read_circuit(ByteReader& r) {
    Circuit c;
    c.width = static_cast<int>(r.u32());
    uint32_t n = r.u32();
    c.gates.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
        uint8_t k = r.u8();
        if (k >= kGateKindCount) throw IoError("circuit record: bad kind id");
        Gate g{static_cast<GateKind>(k), 0, -1, 0.0};
        g.q0 = r.i32();
        g.q1 = r.i32();
        g.angle = r.f64();
        c.gates.push_back(g);
    }
    c.validate();
    return c;
}

std::string frame_file(const char magic[4], uint16_t version, std::string_view payload) {
    ByteWriter w;
    w.bytes(magic, 4);
    w.u16(version);
    w.bytes(payload.data(), payload.size());
    uint32_t crc = crc32_of(w.data());
    ByteWriter tail;
    tail.u32(crc);
    return w.data() + tail.data();
}

std::string_view check_frame(const char magic[4], uint16_t version, std::string_view file) {
    if (file.size() < 10) throw IoError("file too short to be a valid container");
    if (file.substr(0, 4) != std::string_view(magic, 4))
        throw IoError("bad magic: expected " + std::string(magic, 4));
    uint32_t stored;
    std::memcpy(&stored, file.data() + file.size() - 4, 4);
    uint32_t actual = crc32_of(file.substr(0, file.size() - 4));
    if (stored != actual) throw IoError("checksum mismatch: file is corrupted");
    uint16_t ver;
    std::memcpy(&ver, file.data() + 4, 2);
    if (ver != version)
        throw IoError("unsupported format version " + std::to_string(ver) + " (reader supports " +
                      std::to_string(version) + ")");
    return file.substr(6, file.size() - 10);
}

}  // namespace qcopt
