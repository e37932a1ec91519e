#pragma once

// Little-endian binary IO helpers shared by the file formats in this project.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ld/core.hpp"

namespace ld::bytes {

template <typename T>
void write_le(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
    }
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& in, const std::string& what) {
    unsigned char buf[sizeof(T)];
    in.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (!in) throw DataError("read_le: truncated input while reading " + what);
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
    }
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

inline void write_magic(std::ostream& out, const char (&magic)[5]) { out.write(magic, 4); }

inline void expect_magic(std::istream& in, const char (&magic)[5], const std::string& what) {
    char buf[4];
    in.read(buf, 4);
    if (!in || std::memcmp(buf, magic, 4) != 0)
        throw DataError(what + ": bad magic (expected '" + std::string(magic, 4) + "')");
}

template <typename T>
void write_array_le(std::ostream& out, std::span<const T> values) {
    for (const T& v : values) write_le(out, v);
}

template <typename T>
std::vector<T> read_array_le(std::istream& in, std::size_t count, const std::string& what) {
    std::vector<T> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = read_le<T>(in, what);
    return out;
}

}  // namespace ld::bytes
