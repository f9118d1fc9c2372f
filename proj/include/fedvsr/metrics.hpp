#pragma once

// Reconstruction quality metrics: PSNR over all elements and windowed SSIM
// (11x11 Gaussian window, sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1,
// valid windows only) averaged over windows, channels, and frames.

#include <array>
#include <cmath>
#include <limits>

#include "fedvsr/core.hpp"

namespace fedvsr {

/// PSNR in dB; returns +infinity when the inputs are identical (MSE = 0).
inline double compute_psnr(const VideoTensor& pred, const VideoTensor& gt, double peak) {
    require_same_shape(pred, gt, "compute_psnr");
    if (!(peak > 0.0)) throw DomainError("compute_psnr: peak must be > 0");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        double d = pred.data[i] - gt.data[i];
        acc += d * d;
    }
    double mse = acc / static_cast<double>(pred.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

namespace detail {

constexpr std::size_t kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;

inline const std::array<double, kSsimWindow * kSsimWindow>& ssim_kernel() {
    static const auto kernel = [] {
        std::array<double, kSsimWindow * kSsimWindow> k{};
        const double half = (kSsimWindow - 1) / 2.0;
        double sum = 0.0;
        for (std::size_t i = 0; i < kSsimWindow; ++i) {
            for (std::size_t j = 0; j < kSsimWindow; ++j) {
                double dy = static_cast<double>(i) - half;
                double dx = static_cast<double>(j) - half;
                double w = std::exp(-(dy * dy + dx * dx) / (2.0 * kSsimSigma * kSsimSigma));
                k[i * kSsimWindow + j] = w;
                sum += w;
            }
        }
        for (double& w : k) w /= sum;
        return k;
    }();
    return kernel;
}

}  // namespace detail

inline double compute_ssim(const VideoTensor& pred, const VideoTensor& gt) {
    require_same_shape(pred, gt, "compute_ssim");
    const std::size_t win = detail::kSsimWindow;
    if (pred.height < win || pred.width < win) {
        throw ShapeError("compute_ssim: frame " + pred.shape_string() +
                         " smaller than the 11x11 window");
    }
    const auto& kernel = detail::ssim_kernel();
    const double c1 = 0.01 * 0.01;  // (K1 * L)^2, L = 1
    const double c2 = 0.03 * 0.03;  // (K2 * L)^2

    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < pred.frames; ++t) {
        for (std::size_t c = 0; c < pred.channels; ++c) {
            for (std::size_t y0 = 0; y0 + win <= pred.height; ++y0) {
                for (std::size_t x0 = 0; x0 + win <= pred.width; ++x0) {
                    double mu_a = 0.0, mu_b = 0.0;
                    double aa = 0.0, bb = 0.0, ab = 0.0;
                    for (std::size_t i = 0; i < win; ++i) {
                        for (std::size_t j = 0; j < win; ++j) {
                            double w = kernel[i * win + j];
                            double a = pred.at(t, y0 + i, x0 + j, c);
                            double b = gt.at(t, y0 + i, x0 + j, c);
                            mu_a += w * a;
                            mu_b += w * b;
                            aa += w * a * a;
                            bb += w * b * b;
                            ab += w * a * b;
                        }
                    }
                    double var_a = aa - mu_a * mu_a;
                    double var_b = bb - mu_b * mu_b;
                    double cov = ab - mu_a * mu_b;
                    double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
                    double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
                    total += num / den;
                    ++count;
                }
            }
        }
    }
    return total / static_cast<double>(count);
}

}  // namespace fedvsr
