#pragma once

// Byte-exact serialization. Checkpoints carry a flat parameter vector:
//   bytes 0-7   magic "FVSRCKPT"
//   bytes 8-11  format version, u32 little-endian, value 1
//   bytes 12-15 reserved, zero
//   bytes 16-23 parameter count, u64 little-endian
//   then count * 8 bytes of IEEE-754 binary64 little-endian values.
// The layout id is not serialized; it is implied by the experiment config.
//
// Tensor dumps ("FVSRTENS") carry a u32 version, four u32 dims (T, H, W, C),
// then binary64 data in row-major (t, y, x, c) order.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "fedvsr/core.hpp"

namespace fedvsr {

namespace detail {

inline void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_u64_le(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f64_le(std::vector<std::uint8_t>& out, double d) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(d);
    put_u64_le(out, bits);
}

inline std::uint32_t get_u32_le(const std::uint8_t* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

inline std::uint64_t get_u64_le(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

inline double get_f64_le(const std::uint8_t* p) {
    return std::bit_cast<double>(get_u64_le(p));
}

}  // namespace detail

constexpr char kCheckpointMagic[8] = {'F', 'V', 'S', 'R', 'C', 'K', 'P', 'T'};
constexpr char kTensorMagic[8] = {'F', 'V', 'S', 'R', 'T', 'E', 'N', 'S'};

inline std::vector<std::uint8_t> serialize_params(const ParamVector& p) {
    std::vector<std::uint8_t> out;
    out.reserve(24 + 8 * p.values.size());
    out.insert(out.end(), kCheckpointMagic, kCheckpointMagic + 8);
    detail::put_u32_le(out, 1);  // version
    detail::put_u32_le(out, 0);  // reserved
    detail::put_u64_le(out, static_cast<std::uint64_t>(p.values.size()));
    for (double v : p.values) detail::put_f64_le(out, v);
    return out;
}

inline ParamVector deserialize_params(const std::vector<std::uint8_t>& bytes,
                                      std::string layout_id = "") {
    if (bytes.size() < 24) {
        throw FormatError("checkpoint: truncated header, " + std::to_string(bytes.size()) +
                          " bytes, need 24 (at byte offset 0)");
    }
    if (std::memcmp(bytes.data(), kCheckpointMagic, 8) != 0) {
        throw FormatError("checkpoint: bad magic (at byte offset 0)");
    }
    std::uint32_t version = detail::get_u32_le(bytes.data() + 8);
    if (version != 1) {
        throw FormatError("checkpoint: unsupported version " + std::to_string(version) +
                          " (at byte offset 8)");
    }
    std::uint64_t count = detail::get_u64_le(bytes.data() + 16);
    std::uint64_t expected = 24 + 8 * count;
    if (bytes.size() != expected) {
        throw FormatError("checkpoint: payload for " + std::to_string(count) +
                          " values expects " + std::to_string(expected) + " bytes, got " +
                          std::to_string(bytes.size()) + " (at byte offset 24)");
    }
    ParamVector p;
    p.layout_id = std::move(layout_id);
    p.values.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        p.values[i] = detail::get_f64_le(bytes.data() + 24 + 8 * i);
    }
    return p;
}

inline std::vector<std::uint8_t> serialize_tensor(const VideoTensor& x) {
    std::vector<std::uint8_t> out;
    out.reserve(28 + 8 * x.data.size());
    out.insert(out.end(), kTensorMagic, kTensorMagic + 8);
    detail::put_u32_le(out, 1);  // version
    detail::put_u32_le(out, static_cast<std::uint32_t>(x.frames));
    detail::put_u32_le(out, static_cast<std::uint32_t>(x.height));
    detail::put_u32_le(out, static_cast<std::uint32_t>(x.width));
    detail::put_u32_le(out, static_cast<std::uint32_t>(x.channels));
    for (double v : x.data) detail::put_f64_le(out, v);
    return out;
}

inline VideoTensor deserialize_tensor(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 28) {
        throw FormatError("tensor: truncated header, " + std::to_string(bytes.size()) +
                          " bytes, need 28 (at byte offset 0)");
    }
    if (std::memcmp(bytes.data(), kTensorMagic, 8) != 0) {
        throw FormatError("tensor: bad magic (at byte offset 0)");
    }
    std::uint32_t version = detail::get_u32_le(bytes.data() + 8);
    if (version != 1) {
        throw FormatError("tensor: unsupported version " + std::to_string(version) +
                          " (at byte offset 8)");
    }
    VideoTensor x(detail::get_u32_le(bytes.data() + 12), detail::get_u32_le(bytes.data() + 16),
                  detail::get_u32_le(bytes.data() + 20), detail::get_u32_le(bytes.data() + 24));
    std::uint64_t expected = 28 + 8 * static_cast<std::uint64_t>(x.data.size());
    if (bytes.size() != expected) {
        throw FormatError("tensor: payload for dims " + x.shape_string() + " expects " +
                          std::to_string(expected) + " bytes, got " +
                          std::to_string(bytes.size()) + " (at byte offset 28)");
    }
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        x.data[i] = detail::get_f64_le(bytes.data() + 28 + 8 * i);
    }
    if (!x.all_finite()) throw FormatError("tensor: non-finite value in payload");
    return x;
}

inline void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path);
}

inline std::vector<std::uint8_t> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path);
    return bytes;
}

}  // namespace fedvsr
