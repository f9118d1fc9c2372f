#pragma once

// Single-level separable 3D Haar wavelet transform. The low/high filter
// pair is h = [1, 1]/sqrt(2), g = [1, -1]/sqrt(2); taps pair elements
// (2i, 2i+1) with stride-2 decimation and no padding, so input extents
// along depth (frames), height, and width must all be even. Filters are
// applied depth, then height, then width; band letters follow that axis
// order (e.g. LLH = low depth, low height, high width). The transform is
// orthonormal: energy is conserved and the inverse is exact.

#include <array>
#include <cmath>
#include <string>

#include "fedvsr/core.hpp"

namespace fedvsr {

/// The eight sub-band volumes of one decomposition level. All bands share
/// dims (T/2, H/2, W/2, C) of the even-dim input.
struct SubBands {
    VideoTensor lll, llh, lhl, lhh, hll, hlh, hhl, hhh;

    /// Bands indexed 0..7 with bit layout (depth<<2 | height<<1 | width),
    /// a set bit meaning the high-pass filter on that axis.
    const VideoTensor& band(int i) const { return *bands()[static_cast<std::size_t>(i)]; }
    VideoTensor& band(int i) { return *bands()[static_cast<std::size_t>(i)]; }

    std::array<const VideoTensor*, 8> bands() const {
        return {&lll, &llh, &lhl, &lhh, &hll, &hlh, &hhl, &hhh};
    }
    std::array<VideoTensor*, 8> bands() {
        return {&lll, &llh, &lhl, &lhh, &hll, &hlh, &hhl, &hhh};
    }
};

namespace detail {

enum class Axis { Depth, Height, Width };

inline const char* axis_name(Axis a) {
    switch (a) {
        case Axis::Depth: return "frames";
        case Axis::Height: return "height";
        default: return "width";
    }
}

inline std::size_t axis_extent(const VideoTensor& x, Axis a) {
    switch (a) {
        case Axis::Depth: return x.frames;
        case Axis::Height: return x.height;
        default: return x.width;
    }
}

// One filtering stage along `axis`: writes the low-pass half into `lo` and
// the high-pass half into `hi`, each with the axis extent halved.
inline void split_axis(const VideoTensor& x, Axis axis, VideoTensor& lo, VideoTensor& hi) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::size_t t2 = x.frames, h2 = x.height, w2 = x.width;
    switch (axis) {
        case Axis::Depth: t2 /= 2; break;
        case Axis::Height: h2 /= 2; break;
        case Axis::Width: w2 /= 2; break;
    }
    lo = VideoTensor(t2, h2, w2, x.channels);
    hi = VideoTensor(t2, h2, w2, x.channels);
    for (std::size_t t = 0; t < t2; ++t) {
        for (std::size_t y = 0; y < h2; ++y) {
            for (std::size_t xx = 0; xx < w2; ++xx) {
                for (std::size_t c = 0; c < x.channels; ++c) {
                    double a, b;
                    switch (axis) {
                        case Axis::Depth:
                            a = x.at(2 * t, y, xx, c);
                            b = x.at(2 * t + 1, y, xx, c);
                            break;
                        case Axis::Height:
                            a = x.at(t, 2 * y, xx, c);
                            b = x.at(t, 2 * y + 1, xx, c);
                            break;
                        default:
                            a = x.at(t, y, 2 * xx, c);
                            b = x.at(t, y, 2 * xx + 1, c);
                            break;
                    }
                    lo.at(t, y, xx, c) = (a + b) * inv_sqrt2;
                    hi.at(t, y, xx, c) = (a - b) * inv_sqrt2;
                }
            }
        }
    }
}

// Exact inverse of split_axis.
inline VideoTensor merge_axis(const VideoTensor& lo, const VideoTensor& hi, Axis axis) {
    require_same_shape(lo, hi, "dwt3d merge");
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::size_t t2 = lo.frames, h2 = lo.height, w2 = lo.width;
    switch (axis) {
        case Axis::Depth: t2 *= 2; break;
        case Axis::Height: h2 *= 2; break;
        case Axis::Width: w2 *= 2; break;
    }
    VideoTensor out(t2, h2, w2, lo.channels);
    for (std::size_t t = 0; t < lo.frames; ++t) {
        for (std::size_t y = 0; y < lo.height; ++y) {
            for (std::size_t x = 0; x < lo.width; ++x) {
                for (std::size_t c = 0; c < lo.channels; ++c) {
                    double l = lo.at(t, y, x, c);
                    double h = hi.at(t, y, x, c);
                    double a = (l + h) * inv_sqrt2;
                    double b = (l - h) * inv_sqrt2;
                    switch (axis) {
                        case Axis::Depth:
                            out.at(2 * t, y, x, c) = a;
                            out.at(2 * t + 1, y, x, c) = b;
                            break;
                        case Axis::Height:
                            out.at(t, 2 * y, x, c) = a;
                            out.at(t, 2 * y + 1, x, c) = b;
                            break;
                        default:
                            out.at(t, y, 2 * x, c) = a;
                            out.at(t, y, 2 * x + 1, c) = b;
                            break;
                    }
                }
            }
        }
    }
    return out;
}

inline void require_even(const VideoTensor& x, Axis a) {
    if (axis_extent(x, a) % 2 != 0) {
        throw ShapeError(std::string("dwt3d_forward: odd extent along ") + axis_name(a) +
                         " (" + std::to_string(axis_extent(x, a)) + ")");
    }
}

}  // namespace detail

inline SubBands dwt3d_forward(const VideoTensor& x) {
    using detail::Axis;
    detail::require_even(x, Axis::Depth);
    detail::require_even(x, Axis::Height);
    detail::require_even(x, Axis::Width);

    VideoTensor lo_t, hi_t;
    detail::split_axis(x, Axis::Depth, lo_t, hi_t);

    VideoTensor ll, lh, hl, hh;
    detail::split_axis(lo_t, Axis::Height, ll, lh);
    detail::split_axis(hi_t, Axis::Height, hl, hh);

    SubBands b;
    detail::split_axis(ll, Axis::Width, b.lll, b.llh);
    detail::split_axis(lh, Axis::Width, b.lhl, b.lhh);
    detail::split_axis(hl, Axis::Width, b.hll, b.hlh);
    detail::split_axis(hh, Axis::Width, b.hhl, b.hhh);
    return b;
}

inline void require_valid_bands(const SubBands& b) {
    auto bands = b.bands();
    for (int i = 1; i < 8; ++i) {
        if (!bands[0]->same_shape(*bands[static_cast<std::size_t>(i)])) {
            throw ShapeError("dwt3d: sub-band shape mismatch, " + bands[0]->shape_string() +
                             " vs " + bands[static_cast<std::size_t>(i)]->shape_string());
        }
    }
}

inline VideoTensor dwt3d_inverse(const SubBands& b) {
    using detail::Axis;
    require_valid_bands(b);
    VideoTensor ll = detail::merge_axis(b.lll, b.llh, Axis::Width);
    VideoTensor lh = detail::merge_axis(b.lhl, b.lhh, Axis::Width);
    VideoTensor hl = detail::merge_axis(b.hll, b.hlh, Axis::Width);
    VideoTensor hh = detail::merge_axis(b.hhl, b.hhh, Axis::Width);
    VideoTensor lo_t = detail::merge_axis(ll, lh, Axis::Height);
    VideoTensor hi_t = detail::merge_axis(hl, hh, Axis::Height);
    return detail::merge_axis(lo_t, hi_t, Axis::Depth);
}

/// Concatenates the seven high-frequency bands {LLH, LHL, LHH, HLL, HLH,
/// HHL, HHH} along the channel axis, in that order. LLL is excluded.
inline VideoTensor high_freq_stack(const SubBands& b) {
    require_valid_bands(b);
    const VideoTensor& ref = b.lll;
    VideoTensor out(ref.frames, ref.height, ref.width, 7 * ref.channels);
    auto bands = b.bands();
    for (int i = 1; i < 8; ++i) {
        const VideoTensor& band = *bands[static_cast<std::size_t>(i)];
        const std::size_t base = static_cast<std::size_t>(i - 1) * ref.channels;
        for (std::size_t t = 0; t < ref.frames; ++t)
            for (std::size_t y = 0; y < ref.height; ++y)
                for (std::size_t x = 0; x < ref.width; ++x)
                    for (std::size_t c = 0; c < ref.channels; ++c)
                        out.at(t, y, x, base + c) = band.at(t, y, x, c);
    }
    return out;
}

/// Adjoint of high_freq_stack: scatters a (T/2, H/2, W/2, 7C) stack back
/// into sub-band volumes with LLL zeroed.
inline SubBands scatter_high_freq(const VideoTensor& stack, std::size_t channels) {
    if (stack.channels != 7 * channels) {
        throw ShapeError("scatter_high_freq: stack has " + std::to_string(stack.channels) +
                         " channels, expected " + std::to_string(7 * channels));
    }
    SubBands b;
    auto bands = b.bands();
    for (int i = 0; i < 8; ++i)
        *bands[static_cast<std::size_t>(i)] =
            VideoTensor(stack.frames, stack.height, stack.width, channels);
    for (int i = 1; i < 8; ++i) {
        VideoTensor& band = *bands[static_cast<std::size_t>(i)];
        const std::size_t base = static_cast<std::size_t>(i - 1) * channels;
        for (std::size_t t = 0; t < stack.frames; ++t)
            for (std::size_t y = 0; y < stack.height; ++y)
                for (std::size_t x = 0; x < stack.width; ++x)
                    for (std::size_t c = 0; c < channels; ++c)
                        band.at(t, y, x, c) = stack.at(t, y, x, base + c);
    }
    return b;
}

}  // namespace fedvsr
