#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include "plcrf/errors.hpp"

namespace plcrf::binary {

// Little-endian encoders. Values are copied byte-wise, so the host is
// assumed to be little-endian (checked at compile time).
static_assert(sizeof(float) == 4 && sizeof(double) == 8);
static_assert(std::endian::native == std::endian::little);

class Writer {
public:
    template <typename T>
    void put(T value) {
        char bytes[sizeof(T)];
        std::memcpy(bytes, &value, sizeof(T));
        buffer_.append(bytes, sizeof(T));
    }

    void put_bytes(std::string_view bytes) { buffer_.append(bytes); }

    const std::string& data() const { return buffer_; }
    std::string take() { return std::move(buffer_); }

private:
    std::string buffer_;
};

class Reader {
public:
    explicit Reader(std::string_view data) : data_(data) {}

    template <typename T>
    T get() {
        if (remaining() < sizeof(T)) throw FormatError("unexpected end of file (truncated)");
        T value;
        std::memcpy(&value, data_.data() + offset_, sizeof(T));
        offset_ += sizeof(T);
        return value;
    }

    std::string_view get_bytes(std::size_t count) {
        if (remaining() < count) throw FormatError("unexpected end of file (truncated)");
        std::string_view out = data_.substr(offset_, count);
        offset_ += count;
        return out;
    }

    std::size_t remaining() const { return data_.size() - offset_; }
    std::size_t offset() const { return offset_; }

private:
    std::string_view data_;
    std::size_t offset_ = 0;
};

// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

}  // namespace plcrf::binary
