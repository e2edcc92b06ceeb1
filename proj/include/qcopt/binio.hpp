#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qcopt/errors.hpp"
#include "qcopt/gate.hpp"

namespace qcopt {

/// Little-endian byte buffer builder for the versioned binary formats.
class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u16(uint16_t v);
    void u32(uint32_t v);
    void u64(uint64_t v);
    void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
    void f32(float v);
    void f64(double v);
    void bytes(const void* p, size_t n);
    /// u32 length prefix + raw bytes.
    void str(std::string_view s);

    const std::string& data() const { return buf_; }
    size_t size() const { return buf_.size(); }

private:
    std::string buf_;
};

/// Matching reader; every read throws IoError on truncation.
class ByteReader {
public:
    explicit ByteReader(std::string_view data) : data_(data) {}

    uint8_t u8();
    uint16_t u16();
    uint32_t u32();
    uint64_t u64();
    int32_t i32() { return static_cast<int32_t>(u32()); }
    float f32();
    double f64();
    std::string str();
    void raw(void* p, size_t n);

    size_t offset() const { return pos_; }
    size_t remaining() const { return data_.size() - pos_; }
    std::string_view view(size_t from, size_t n) const;

private:
    void need(size_t n);
    std::string_view data_;
    size_t pos_ = 0;
};

uint32_t crc32_of(std::string_view data);

/// Whole-file helpers. Writes go through a temp file + rename so a crash never
/// leaves a half-written artifact behind.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view data);

/// Shared sub-records: gate-set descriptor and gate-encoded circuits, used by
/// the db / weights / dataset formats.
void write_gate_set(ByteWriter& w, const GateSet& gs);
GateSet read_gate_set(ByteReader& r);
void write_circuit(ByteWriter& w, const Circuit& c);
Circuit read_circuit(ByteReader& r);

/// Frames payload as: magic(4) + version(u16) + payload + crc32(u32) over
/// everything before the crc. Check strips and validates the frame.
std::string frame_file(const char magic[4], uint16_t version, std::string_view payload);
std::string_view check_frame(const char magic[4], uint16_t version, std::string_view file);

}  // namespace qcopt
