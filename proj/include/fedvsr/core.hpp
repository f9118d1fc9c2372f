#pragma once

// Core value types shared by every module: dense 4-D video volumes and the
// flat parameter vectors exchanged between clients and server.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedvsr {

struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Dense (frames, height, width, channels) volume of doubles in row-major
/// (t, y, x, c) order. Pixel values are nominally in [0, 1]; coefficient
/// volumes (DWT bands, gradients) reuse the same container.
struct VideoTensor {
    std::size_t frames = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    std::vector<double> data;

    VideoTensor() = default;
    VideoTensor(std::size_t t, std::size_t h, std::size_t w, std::size_t c)
        : frames(t), height(h), width(w), channels(c), data(t * h * w * c, 0.0) {}

    static VideoTensor zeros(std::size_t t, std::size_t h, std::size_t w, std::size_t c) {
        return VideoTensor(t, h, w, c);
    }

    std::size_t size() const { return data.size(); }

    std::size_t index(std::size_t t, std::size_t y, std::size_t x, std::size_t c) const {
        return ((t * height + y) * width + x) * channels + c;
    }

    double at(std::size_t t, std::size_t y, std::size_t x, std::size_t c) const {
        return data[index(t, y, x, c)];
    }
    double& at(std::size_t t, std::size_t y, std::size_t x, std::size_t c) {
        return data[index(t, y, x, c)];
    }

    bool same_shape(const VideoTensor& o) const {
        return frames == o.frames && height == o.height && width == o.width &&
               channels == o.channels;
    }

    std::string shape_string() const {
        return std::to_string(frames) + "x" + std::to_string(height) + "x" +
               std::to_string(width) + "x" + std::to_string(channels);
    }

    bool all_finite() const {
        for (double v : data) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }
};

inline void require_same_shape(const VideoTensor& a, const VideoTensor& b, const char* what) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(what) + ": shape mismatch " + a.shape_string() +
                         " vs " + b.shape_string());
    }
}

/// Flat, ordered list of model parameters. Two vectors are combinable only
/// when their layout ids match and their lengths are equal.
struct ParamVector {
    std::string layout_id;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

inline void require_same_layout(const ParamVector& a, const ParamVector& b, const char* what) {
    if (a.layout_id != b.layout_id || a.values.size() != b.values.size()) {
        throw ShapeError(std::string(what) + ": parameter layout mismatch (" + a.layout_id +
                         ", n=" + std::to_string(a.values.size()) + ") vs (" + b.layout_id +
                         ", n=" + std::to_string(b.values.size()) + ")");
    }
}

}  // namespace fedvsr
