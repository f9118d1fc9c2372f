#pragma once

// Test-only reference implementations, written straight from the defining
// formulas and kept independent of the library code paths they check.
// Everything here computes in long double through a different algebraic
// route than include/fedvsr.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "fedvsr/core.hpp"

namespace oracle {

using fedvsr::VideoTensor;

inline VideoTensor random_tensor(std::mt19937_64& gen, std::size_t t, std::size_t h,
                                 std::size_t w, std::size_t c, double lo = 0.0,
                                 double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    VideoTensor x(t, h, w, c);
    for (double& v : x.data) v = dist(gen);
    return x;
}

inline double max_abs_diff(const VideoTensor& a, const VideoTensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        m = std::max(m, std::abs(a.data[i] - b.data[i]));
    }
    return m;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

// Relative error with an absolute floor, for finite-difference comparisons.
inline double rel_err(double a, double b, double floor_ = 1e-4) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor_});
}

// ---------------------------------------------------------------------------
// 3D Haar DWT: direct separable tensor-product evaluation. Band index i uses
// bit layout (depth<<2 | height<<1 | width), a set bit meaning high-pass.

inline std::array<VideoTensor, 8> dwt3d_oracle(const VideoTensor& x) {
    const long double inv_sqrt2 = 1.0L / std::sqrt(2.0L);
    std::array<VideoTensor, 8> bands;
    for (int i = 0; i < 8; ++i) {
        VideoTensor band(x.frames / 2, x.height / 2, x.width / 2, x.channels);
        const long double sd = (i & 4) ? -1.0L : 1.0L;  // second tap of depth filter
        const long double sh = (i & 2) ? -1.0L : 1.0L;
        const long double sw = (i & 1) ? -1.0L : 1.0L;
        for (std::size_t t = 0; t < band.frames; ++t)
            for (std::size_t y = 0; y < band.height; ++y)
                for (std::size_t xx = 0; xx < band.width; ++xx)
                    for (std::size_t c = 0; c < band.channels; ++c) {
                        long double acc = 0.0L;
                        for (int dt = 0; dt < 2; ++dt)
                            for (int dy = 0; dy < 2; ++dy)
                                for (int dx = 0; dx < 2; ++dx) {
                                    long double f = (dt ? sd : 1.0L) * (dy ? sh : 1.0L) *
                                                    (dx ? sw : 1.0L);
                                    acc += f * static_cast<long double>(x.at(
                                                   2 * t + dt, 2 * y + dy, 2 * xx + dx, c));
                                }
                        band.at(t, y, xx, c) = static_cast<double>(
                            acc * inv_sqrt2 * inv_sqrt2 * inv_sqrt2);
                    }
        bands[static_cast<std::size_t>(i)] = std::move(band);
    }
    return bands;
}

// ---------------------------------------------------------------------------
// Metrics.

inline double psnr_oracle(const VideoTensor& pred, const VideoTensor& gt, double peak) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        long double d = static_cast<long double>(pred.data[i]) - gt.data[i];
        acc += d * d;
    }
    long double mse = acc / static_cast<long double>(pred.data.size());
    return static_cast<double>(10.0L * std::log10(static_cast<long double>(peak) * peak / mse));
}

// Windowed SSIM via explicitly mean-subtracted moments.
inline double ssim_oracle(const VideoTensor& pred, const VideoTensor& gt) {
    constexpr std::size_t win = 11;
    const long double sigma = 1.5L;
    long double kernel[win][win];
    long double ksum = 0.0L;
    for (std::size_t i = 0; i < win; ++i)
        for (std::size_t j = 0; j < win; ++j) {
            long double dy = static_cast<long double>(i) - 5.0L;
            long double dx = static_cast<long double>(j) - 5.0L;
            kernel[i][j] = std::exp(-(dy * dy + dx * dx) / (2.0L * sigma * sigma));
            ksum += kernel[i][j];
        }
    for (std::size_t i = 0; i < win; ++i)
        for (std::size_t j = 0; j < win; ++j) kernel[i][j] /= ksum;

    const long double c1 = 0.0001L;  // (0.01 * 1)^2
    const long double c2 = 0.0009L;  // (0.03 * 1)^2
    long double total = 0.0L;
    std::size_t count = 0;
    for (std::size_t t = 0; t < pred.frames; ++t)
        for (std::size_t c = 0; c < pred.channels; ++c)
            for (std::size_t y0 = 0; y0 + win <= pred.height; ++y0)
                for (std::size_t x0 = 0; x0 + win <= pred.width; ++x0) {
                    long double mu_a = 0.0L, mu_b = 0.0L;
                    for (std::size_t i = 0; i < win; ++i)
                        for (std::size_t j = 0; j < win; ++j) {
                            mu_a += kernel[i][j] * pred.at(t, y0 + i, x0 + j, c);
                            mu_b += kernel[i][j] * gt.at(t, y0 + i, x0 + j, c);
                        }
                    long double va = 0.0L, vb = 0.0L, cov = 0.0L;
                    for (std::size_t i = 0; i < win; ++i)
                        for (std::size_t j = 0; j < win; ++j) {
                            long double da = pred.at(t, y0 + i, x0 + j, c) - mu_a;
                            long double db = gt.at(t, y0 + i, x0 + j, c) - mu_b;
                            va += kernel[i][j] * da * da;
                            vb += kernel[i][j] * db * db;
                            cov += kernel[i][j] * da * db;
                        }
                    total += ((2.0L * mu_a * mu_b + c1) * (2.0L * cov + c2)) /
                             ((mu_a * mu_a + mu_b * mu_b + c1) * (va + vb + c2));
                    ++count;
                }
    return static_cast<double>(total / static_cast<long double>(count));
}

inline double charbonnier_oracle(const VideoTensor& pred, const VideoTensor& gt,
                                 double epsilon) {
    long double acc = 0.0L;
    long double e2 = static_cast<long double>(epsilon) * epsilon;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        long double d = static_cast<long double>(pred.data[i]) - gt.data[i];
        acc += std::sqrt(d * d + e2);
    }
    return static_cast<double>(acc / static_cast<long double>(pred.data.size()));
}

// ---------------------------------------------------------------------------
// Reference model: naive nested-loop re-derivation of the forward map.

inline VideoTensor toy_forward_oracle(std::size_t scale, std::size_t kernel,
                                      std::size_t hidden, std::size_t channels,
                                      const std::vector<double>& params,
                                      const VideoTensor& lr) {
    const std::size_t k = kernel;
    const long long off = static_cast<long long>(k / 2);
    const std::size_t T = lr.frames, H = lr.height * scale, W = lr.width * scale;
    const std::size_t w1 = 0;
    const std::size_t b1 = k * k * channels * hidden;
    const std::size_t w2 = b1 + hidden;
    const std::size_t b2 = w2 + k * k * hidden * channels;

    VideoTensor up(T, H, W, channels);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t y = 0; y < H; ++y)
            for (std::size_t x = 0; x < W; ++x)
                for (std::size_t c = 0; c < channels; ++c)
                    up.at(t, y, x, c) = lr.at(t, y / scale, x / scale, c);

    VideoTensor a1(T, H, W, hidden);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t y = 0; y < H; ++y)
            for (std::size_t x = 0; x < W; ++x)
                for (std::size_t h = 0; h < hidden; ++h) {
                    long double acc = params[b1 + h];
                    for (std::size_t ky = 0; ky < k; ++ky)
                        for (std::size_t kx = 0; kx < k; ++kx) {
                            long long yy = static_cast<long long>(y) + static_cast<long long>(ky) - off;
                            long long xx = static_cast<long long>(x) + static_cast<long long>(kx) - off;
                            if (yy < 0 || xx < 0 || yy >= static_cast<long long>(H) ||
                                xx >= static_cast<long long>(W))
                                continue;
                            for (std::size_t c = 0; c < channels; ++c)
                                acc += params[w1 + ((h * k + ky) * k + kx) * channels + c] *
                                       up.at(t, static_cast<std::size_t>(yy),
                                             static_cast<std::size_t>(xx), c);
                        }
                    a1.at(t, y, x, h) = acc > 0.0L ? static_cast<double>(acc) : 0.0;
                }

    VideoTensor out = up;
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t y = 0; y < H; ++y)
            for (std::size_t x = 0; x < W; ++x)
                for (std::size_t o = 0; o < channels; ++o) {
                    long double acc = params[b2 + o];
                    for (std::size_t ky = 0; ky < k; ++ky)
                        for (std::size_t kx = 0; kx < k; ++kx) {
                            long long yy = static_cast<long long>(y) + static_cast<long long>(ky) - off;
                            long long xx = static_cast<long long>(x) + static_cast<long long>(kx) - off;
                            if (yy < 0 || xx < 0 || yy >= static_cast<long long>(H) ||
                                xx >= static_cast<long long>(W))
                                continue;
                            for (std::size_t h = 0; h < hidden; ++h)
                                acc += params[w2 + ((o * k + ky) * k + kx) * hidden + h] *
                                       a1.at(t, static_cast<std::size_t>(yy),
                                             static_cast<std::size_t>(xx), h);
                        }
                    out.at(t, y, x, o) += static_cast<double>(acc);
                }
    return out;
}

// ---------------------------------------------------------------------------
// Box pooling and coordinate median.

inline VideoTensor pool_oracle(const VideoTensor& hr, std::size_t s) {
    VideoTensor lr(hr.frames, hr.height / s, hr.width / s, hr.channels);
    for (std::size_t t = 0; t < lr.frames; ++t)
        for (std::size_t y = 0; y < lr.height; ++y)
            for (std::size_t x = 0; x < lr.width; ++x)
                for (std::size_t c = 0; c < lr.channels; ++c) {
                    long double acc = 0.0L;
                    for (std::size_t dy = 0; dy < s; ++dy)
                        for (std::size_t dx = 0; dx < s; ++dx)
                            acc += hr.at(t, y * s + dy, x * s + dx, c);
                    lr.at(t, y, x, c) = static_cast<double>(
                        acc / static_cast<long double>(s * s));
                }
    return lr;
}

inline std::vector<double> median_oracle(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    const std::size_t len = rows[0].size();
    std::vector<double> out(len);
    for (std::size_t j = 0; j < len; ++j) {
        std::vector<double> col;
        col.reserve(n);
        for (const auto& r : rows) col.push_back(r[j]);
        std::sort(col.begin(), col.end());
        out[j] = (n % 2 == 1) ? col[n / 2] : 0.5 * (col[n / 2 - 1] + col[n / 2]);
    }
    return out;
}

}  // namespace oracle
