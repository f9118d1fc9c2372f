#pragma once

// Synthetic video: seeded scene generation (four pattern classes translated
// across frames with periodic wrap-around and bilinear sub-pixel sampling),
// deterministic box-mean degradation, and IID / Non-IID client partitioning.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fedvsr/core.hpp"
#include "fedvsr/rng.hpp"

namespace fedvsr {

enum class PatternClass { Sinusoid, Checkerboard, GradientNoise, BlobField };

enum class PartitionMode { Iid, NonIid };

inline const char* pattern_name(PatternClass p) {
    switch (p) {
        case PatternClass::Sinusoid: return "sinusoid";
        case PatternClass::Checkerboard: return "checkerboard";
        case PatternClass::GradientNoise: return "gradient_noise";
        default: return "blob_field";
    }
}

struct SceneSpec {
    PatternClass pattern = PatternClass::Sinusoid;
    std::size_t frames = 8;
    std::size_t height = 32;
    std::size_t width = 32;
    std::size_t channels = 1;
    double velocity_y = 0.0;  // pixels per frame
    double velocity_x = 0.0;
    // sinusoid: integer wave numbers (cycles per image) and a phase
    int wave_y = 1;
    int wave_x = 2;
    double phase = 0.0;
    // checkerboard
    std::size_t cell = 4;
    double offset_y = 0.0;
    double offset_x = 0.0;
    // gradient noise: coarse value-noise grid, bilinearly upsampled
    std::size_t noise_cells = 4;
    double noise_amp = 0.8;
    // blob field
    std::size_t blob_count = 4;
    double blob_radius = 3.0;
    std::uint64_t seed = 0;
};

namespace detail {

// Periodic bilinear lookup into a (h, w) grid stored row-major.
inline double sample_periodic(const std::vector<double>& grid, std::size_t h, std::size_t w,
                              double y, double x) {
    double u = std::fmod(y, static_cast<double>(h));
    if (u < 0.0) u += static_cast<double>(h);
    double v = std::fmod(x, static_cast<double>(w));
    if (v < 0.0) v += static_cast<double>(w);
    std::size_t y0 = static_cast<std::size_t>(u);
    std::size_t x0 = static_cast<std::size_t>(v);
    if (y0 >= h) y0 = 0;  // guards fmod landing exactly on the period
    if (x0 >= w) x0 = 0;
    double fy = u - static_cast<double>(y0);
    double fx = v - static_cast<double>(x0);
    std::size_t y1 = (y0 + 1) % h;
    std::size_t x1 = (x0 + 1) % w;
    return (1.0 - fy) * (1.0 - fx) * grid[y0 * w + x0] +
           (1.0 - fy) * fx * grid[y0 * w + x1] +
           fy * (1.0 - fx) * grid[y1 * w + x0] +
           fy * fx * grid[y1 * w + x1];
}

inline double wrapped_delta(double a, double b, double period) {
    double d = std::abs(a - b);
    return std::min(d, period - d);
}

// Base pattern for one channel, values clipped to [0, 1].
inline std::vector<double> base_grid(const SceneSpec& s, std::size_t channel,
                                     RandomStream& rng) {
    const std::size_t h = s.height, w = s.width;
    std::vector<double> grid(h * w, 0.0);
    const double two_pi = 2.0 * 3.14159265358979323846;
    switch (s.pattern) {
        case PatternClass::Sinusoid: {
            double channel_phase = s.phase + two_pi * static_cast<double>(channel) / 3.0;
            for (std::size_t y = 0; y < h; ++y)
                for (std::size_t x = 0; x < w; ++x)
                    grid[y * w + x] =
                        0.5 + 0.45 * std::sin(two_pi * (s.wave_y * static_cast<double>(y) /
                                                            static_cast<double>(h) +
                                                        s.wave_x * static_cast<double>(x) /
                                                            static_cast<double>(w)) +
                                              channel_phase);
            break;
        }
        case PatternClass::Checkerboard: {
            for (std::size_t y = 0; y < h; ++y)
                for (std::size_t x = 0; x < w; ++x) {
                    auto cy = static_cast<long>(std::floor(
                        (static_cast<double>(y) + s.offset_y) / static_cast<double>(s.cell)));
                    auto cx = static_cast<long>(std::floor(
                        (static_cast<double>(x) + s.offset_x) / static_cast<double>(s.cell)));
                    grid[y * w + x] = ((cy + cx) % 2 == 0) ? 0.15 : 0.85;
                }
            break;
        }
        case PatternClass::GradientNoise: {
            const std::size_t gc = s.noise_cells;
            std::vector<double> coarse(gc * gc);
            for (double& v : coarse) v = rng.next_unit();
            for (std::size_t y = 0; y < h; ++y)
                for (std::size_t x = 0; x < w; ++x) {
                    double v = sample_periodic(
                        coarse, gc, gc,
                        static_cast<double>(y) * static_cast<double>(gc) /
                            static_cast<double>(h),
                        static_cast<double>(x) * static_cast<double>(gc) /
                            static_cast<double>(w));
                    grid[y * w + x] = 0.5 + s.noise_amp * (v - 0.5);
                }
            break;
        }
        case PatternClass::BlobField: {
            std::vector<std::array<double, 4>> blobs;  // cy, cx, radius, intensity
            blobs.reserve(s.blob_count);
            for (std::size_t i = 0; i < s.blob_count; ++i) {
                blobs.push_back({rng.next_range(0.0, static_cast<double>(h)),
                                 rng.next_range(0.0, static_cast<double>(w)),
                                 s.blob_radius * rng.next_range(0.7, 1.3),
                                 rng.next_range(0.4, 0.9)});
            }
            for (std::size_t y = 0; y < h; ++y)
                for (std::size_t x = 0; x < w; ++x) {
                    double v = 0.1;
                    for (const auto& b : blobs) {
                        double dy = wrapped_delta(static_cast<double>(y), b[0],
                                                  static_cast<double>(h));
                        double dx = wrapped_delta(static_cast<double>(x), b[1],
                                                  static_cast<double>(w));
                        v += b[3] * std::exp(-(dy * dy + dx * dx) / (2.0 * b[2] * b[2]));
                    }
                    grid[y * w + x] = v;
                }
            break;
        }
    }
    for (double& v : grid) v = std::clamp(v, 0.0, 1.0);
    return grid;
}

}  // namespace detail

/// Frame t is the base pattern translated by t * (velocity_y, velocity_x),
/// sampled bilinearly with periodic wrap-around. Deterministic in the seed.
inline VideoTensor generate_sequence(const SceneSpec& spec) {
    VideoTensor out(spec.frames, spec.height, spec.width, spec.channels);
    RandomStream rng(spec.seed, StreamPurpose::SceneBase);
    for (std::size_t c = 0; c < spec.channels; ++c) {
        std::vector<double> base = detail::base_grid(spec, c, rng);
        for (std::size_t t = 0; t < spec.frames; ++t) {
            double shift_y = static_cast<double>(t) * spec.velocity_y;
            double shift_x = static_cast<double>(t) * spec.velocity_x;
            for (std::size_t y = 0; y < spec.height; ++y)
                for (std::size_t x = 0; x < spec.width; ++x)
                    out.at(t, y, x, c) = detail::sample_periodic(
                        base, spec.height, spec.width, static_cast<double>(y) - shift_y,
                        static_cast<double>(x) - shift_x);
        }
    }
    return out;
}

/// s x s box-mean pooling per frame; every LR pixel is the exact mean of its
/// HR block.
inline VideoTensor degrade_sequence(const VideoTensor& hr, std::size_t s) {
    if (s < 1 || hr.height % s != 0 || hr.width % s != 0) {
        throw ShapeError("degrade_sequence: dims " + hr.shape_string() +
                         " not divisible by scale " + std::to_string(s));
    }
    VideoTensor lr(hr.frames, hr.height / s, hr.width / s, hr.channels);
    const double inv = 1.0 / static_cast<double>(s * s);
    for (std::size_t t = 0; t < lr.frames; ++t)
        for (std::size_t y = 0; y < lr.height; ++y)
            for (std::size_t x = 0; x < lr.width; ++x)
                for (std::size_t c = 0; c < lr.channels; ++c) {
                    double acc = 0.0;
                    for (std::size_t dy = 0; dy < s; ++dy)
                        for (std::size_t dx = 0; dx < s; ++dx)
                            acc += hr.at(t, y * s + dy, x * s + dx, c);
                    lr.at(t, y, x, c) = acc * inv;
                }
    return lr;
}

struct ClipPair {
    VideoTensor lr;
    VideoTensor hr;
    SceneSpec scene;  // generating parameters, kept for diagnostics
};

struct DataGeometry {
    std::size_t frames = 8;
    std::size_t height = 32;
    std::size_t width = 32;
    std::size_t channels = 1;
    std::size_t scale = 2;
};

struct ClientPartition {
    PartitionMode mode = PartitionMode::NonIid;
    std::vector<std::vector<ClipPair>> shards;  // one shard per client
};

namespace detail {

constexpr std::array<std::array<int, 2>, 8> kWavePairs = {
    {{1, 2}, {2, 1}, {1, 3}, {3, 1}, {2, 3}, {3, 2}, {1, 1}, {2, 2}}};
constexpr std::array<std::size_t, 4> kCellSizes = {2, 4, 8, 16};
constexpr std::array<std::size_t, 4> kNoiseCells = {2, 4, 8, 16};

// Non-IID: the client's band index selects a narrow slice of the class's
// parameter space; bands of distinct clients do not overlap. IID: every
// parameter is drawn from the full mixture.
inline SceneSpec draw_scene(PatternClass cls, std::size_t band, bool full_range,
                            const DataGeometry& geo, RandomStream& rng) {
    SceneSpec s;
    s.pattern = cls;
    s.frames = geo.frames;
    s.height = geo.height;
    s.width = geo.width;
    s.channels = geo.channels;
    s.seed = rng.next_u64();

    double vel_lo = full_range ? 0.2 : 0.2 + 0.5 * static_cast<double>(band % 4);
    double vel_hi = full_range ? 2.2 : vel_lo + 0.4;
    double speed = rng.next_range(vel_lo, vel_hi);
    double angle = rng.next_range(0.0, 2.0 * 3.14159265358979323846);
    s.velocity_y = speed * std::sin(angle);
    s.velocity_x = speed * std::cos(angle);

    switch (cls) {
        case PatternClass::Sinusoid: {
            std::size_t pair = full_range ? rng.next_below(kWavePairs.size()) : band % 8;
            s.wave_y = kWavePairs[pair][0];
            s.wave_x = kWavePairs[pair][1];
            s.phase = rng.next_range(0.0, 2.0 * 3.14159265358979323846);
            break;
        }
        case PatternClass::Checkerboard: {
            std::size_t idx = full_range ? rng.next_below(kCellSizes.size()) : band % 4;
            s.cell = kCellSizes[idx];
            s.offset_y = rng.next_range(0.0, static_cast<double>(s.cell));
            s.offset_x = rng.next_range(0.0, static_cast<double>(s.cell));
            break;
        }
        case PatternClass::GradientNoise: {
            std::size_t idx = full_range ? rng.next_below(kNoiseCells.size()) : band % 4;
            s.noise_cells = kNoiseCells[idx];
            if (full_range) {
                s.noise_amp = rng.next_range(0.3, 0.9);
            } else {
                double lo = 0.3 + 0.15 * static_cast<double>(band % 4);
                s.noise_amp = rng.next_range(lo, lo + 0.1);
            }
            break;
        }
        case PatternClass::BlobField: {
            if (full_range) {
                s.blob_count = 2 + rng.next_below(7);
                s.blob_radius = rng.next_range(2.0, 6.0);
            } else {
                s.blob_count = 2 + 2 * (band % 4);
                double lo = 2.0 + static_cast<double>(band % 3);
                s.blob_radius = rng.next_range(lo, lo + 0.8);
            }
            break;
        }
    }
    return s;
}

inline ClipPair make_clip(const SceneSpec& spec, std::size_t scale) {
    ClipPair clip;
    clip.scene = spec;
    clip.hr = generate_sequence(spec);
    clip.lr = degrade_sequence(clip.hr, scale);
    return clip;
}

}  // namespace detail

/// Non-IID: client k holds a single pattern class (round-robin over the four
/// classes) with a client-specific parameter band. IID: class and parameters
/// of every clip are drawn from the full mixture.
inline ClientPartition partition_clients(std::size_t n_clients, std::size_t clips_per_client,
                                         PartitionMode mode, const DataGeometry& geo,
                                         std::uint64_t seed) {
    if (n_clients < 1 || clips_per_client < 1) {
        throw DomainError("partition_clients: need at least one client and one clip");
    }
    ClientPartition part;
    part.mode = mode;
    part.shards.resize(n_clients);
    for (std::size_t k = 0; k < n_clients; ++k) {
        part.shards[k].reserve(clips_per_client);
        for (std::size_t j = 0; j < clips_per_client; ++j) {
            RandomStream rng(seed, StreamPurpose::ClientData, k, j);
            SceneSpec spec;
            if (mode == PartitionMode::NonIid) {
                auto cls = static_cast<PatternClass>(k % 4);
                spec = detail::draw_scene(cls, k / 4, false, geo, rng);
            } else {
                auto cls = static_cast<PatternClass>(rng.next_below(4));
                spec = detail::draw_scene(cls, 0, true, geo, rng);
            }
            part.shards[k].push_back(detail::make_clip(spec, geo.scale));
        }
    }
    return part;
}

/// Held-out evaluation clips, drawn from the full mixture under a dedicated
/// stream so they are identical across strategies sharing a seed.
inline std::vector<ClipPair> make_eval_set(std::size_t count, const DataGeometry& geo,
                                           std::uint64_t seed) {
    std::vector<ClipPair> clips;
    clips.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        RandomStream rng(seed, StreamPurpose::EvalData, 0, j);
        auto cls = static_cast<PatternClass>(rng.next_below(4));
        SceneSpec spec = detail::draw_scene(cls, 0, true, geo, rng);
        clips.push_back(detail::make_clip(spec, geo.scale));
    }
    return clips;
}

/// Scalar heterogeneity proxy: mean pairwise distance between per-client
/// feature vectors (clip mean, clip std, mean absolute temporal difference,
/// averaged over the shard). Diagnostic only.
inline double heterogeneity_score(const ClientPartition& part) {
    std::vector<std::array<double, 3>> features;
    features.reserve(part.shards.size());
    for (const auto& shard : part.shards) {
        std::array<double, 3> f = {0.0, 0.0, 0.0};
        for (const ClipPair& clip : shard) {
            const VideoTensor& v = clip.hr;
            double mean = 0.0;
            for (double x : v.data) mean += x;
            mean /= static_cast<double>(v.size());
            double var = 0.0;
            for (double x : v.data) var += (x - mean) * (x - mean);
            var /= static_cast<double>(v.size());
            double tdiff = 0.0;
            std::size_t per_frame = v.height * v.width * v.channels;
            for (std::size_t i = per_frame; i < v.size(); ++i) {
                tdiff += std::abs(v.data[i] - v.data[i - per_frame]);
            }
            tdiff /= static_cast<double>(v.size() - per_frame);
            f[0] += mean;
            f[1] += std::sqrt(var);
            f[2] += tdiff;
        }
        for (double& x : f) x /= static_cast<double>(shard.size());
        features.push_back(f);
    }
    double acc = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        for (std::size_t j = i + 1; j < features.size(); ++j) {
            double d2 = 0.0;
            for (int q = 0; q < 3; ++q) {
                double d = features[i][q] - features[j][q];
                d2 += d * d;
            }
            acc += std::sqrt(d2);
            ++pairs;
        }
    }
    return pairs ? acc / static_cast<double>(pairs) : 0.0;
}

}  // namespace fedvsr
