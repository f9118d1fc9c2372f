#pragma once

// Reference VSR model: nearest-neighbor upsample by the scale factor, then a
// per-frame residual refinement of two k x k convolutions with a ReLU in
// between. Forward and reverse-mode gradients are analytic; no temporal
// layers (temporal structure enters only through the wavelet loss).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fedvsr/core.hpp"
#include "fedvsr/losses.hpp"
#include "fedvsr/rng.hpp"

namespace fedvsr {

struct ModelSpec {
    std::size_t scale = 2;     // upscaling factor s >= 2
    std::size_t kernel = 3;    // odd spatial conv size
    std::size_t hidden = 8;    // hidden channel width
    std::size_t channels = 1;  // data channels

    // layer-1 weights, layer-1 bias, layer-2 weights, layer-2 bias
    std::size_t w1_count() const { return kernel * kernel * channels * hidden; }
    std::size_t w2_count() const { return kernel * kernel * hidden * channels; }
    std::size_t b1_offset() const { return w1_count(); }
    std::size_t w2_offset() const { return b1_offset() + hidden; }
    std::size_t b2_offset() const { return w2_offset() + w2_count(); }
    std::size_t param_count() const { return b2_offset() + channels; }

    std::string layout_id() const {
        return "toy_s" + std::to_string(scale) + "_k" + std::to_string(kernel) + "_h" +
               std::to_string(hidden) + "_c" + std::to_string(channels);
    }

    // W1 is (hidden, ky, kx, in) row-major; W2 is (out, ky, kx, hidden).
    std::size_t w1_index(std::size_t h, std::size_t ky, std::size_t kx, std::size_t c) const {
        return ((h * kernel + ky) * kernel + kx) * channels + c;
    }
    std::size_t w2_index(std::size_t o, std::size_t ky, std::size_t kx, std::size_t h) const {
        return w2_offset() + ((o * kernel + ky) * kernel + kx) * hidden + h;
    }
};

struct ModelState {
    ModelSpec spec;
    ParamVector params;
};

/// Weights uniform in [-b, b] with b = sqrt(1 / (k * k * fan_in)), biases
/// zero, drawn from the master seed's ModelInit stream in layout order.
inline ModelState init_model(const ModelSpec& spec, std::uint64_t seed) {
    ModelState m;
    m.spec = spec;
    m.params.layout_id = spec.layout_id();
    m.params.values.assign(spec.param_count(), 0.0);
    RandomStream rng(seed, StreamPurpose::ModelInit);
    const double bound1 = std::sqrt(1.0 / static_cast<double>(spec.kernel * spec.kernel *
                                                              spec.channels));
    const double bound2 = std::sqrt(1.0 / static_cast<double>(spec.kernel * spec.kernel *
                                                              spec.hidden));
    for (std::size_t i = 0; i < spec.w1_count(); ++i) {
        m.params.values[i] = rng.next_range(-bound1, bound1);
    }
    for (std::size_t i = 0; i < spec.w2_count(); ++i) {
        m.params.values[spec.w2_offset() + i] = rng.next_range(-bound2, bound2);
    }
    return m;
}

inline VideoTensor upsample_nearest(const VideoTensor& lr, std::size_t s) {
    VideoTensor up(lr.frames, lr.height * s, lr.width * s, lr.channels);
    for (std::size_t t = 0; t < up.frames; ++t)
        for (std::size_t y = 0; y < up.height; ++y)
            for (std::size_t x = 0; x < up.width; ++x)
                for (std::size_t c = 0; c < up.channels; ++c)
                    up.at(t, y, x, c) = lr.at(t, y / s, x / s, c);
    return up;
}

namespace detail {

struct ForwardPass {
    VideoTensor up;   // nearest-neighbor upsampled input
    VideoTensor z1;   // first conv pre-activation
    VideoTensor a1;   // ReLU(z1)
    VideoTensor out;  // up + second conv of a1
};

inline ForwardPass run_forward(const ModelState& m, const VideoTensor& lr) {
    const ModelSpec& spec = m.spec;
    if (lr.channels != spec.channels) {
        throw ShapeError("model_forward: input has " + std::to_string(lr.channels) +
                         " channels, model expects " + std::to_string(spec.channels));
    }
    const std::size_t k = spec.kernel;
    const std::size_t off = k / 2;
    const std::vector<double>& p = m.params.values;

    ForwardPass pass;
    pass.up = upsample_nearest(lr, spec.scale);
    const VideoTensor& up = pass.up;
    const std::size_t T = up.frames, H = up.height, W = up.width;

    pass.z1 = VideoTensor(T, H, W, spec.hidden);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t y = 0; y < H; ++y) {
            for (std::size_t x = 0; x < W; ++x) {
                for (std::size_t h = 0; h < spec.hidden; ++h) {
                    double acc = p[spec.b1_offset() + h];
                    for (std::size_t ky = 0; ky < k; ++ky) {
                        std::size_t yy = y + ky;
                        if (yy < off || yy - off >= H) continue;
                        for (std::size_t kx = 0; kx < k; ++kx) {
                            std::size_t xx = x + kx;
                            if (xx < off || xx - off >= W) continue;
                            for (std::size_t c = 0; c < spec.channels; ++c) {
                                acc += p[spec.w1_index(h, ky, kx, c)] *
                                       up.at(t, yy - off, xx - off, c);
                            }
                        }
                    }
                    pass.z1.at(t, y, x, h) = acc;
                }
            }
        }
    }

    pass.a1 = pass.z1;
    for (double& v : pass.a1.data) v = std::max(v, 0.0);

    pass.out = up;
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t y = 0; y < H; ++y) {
            for (std::size_t x = 0; x < W; ++x) {
                for (std::size_t o = 0; o < spec.channels; ++o) {
                    double acc = p[spec.b2_offset() + o];
                    for (std::size_t ky = 0; ky < k; ++ky) {
                        std::size_t yy = y + ky;
                        if (yy < off || yy - off >= H) continue;
                        for (std::size_t kx = 0; kx < k; ++kx) {
                            std::size_t xx = x + kx;
                            if (xx < off || xx - off >= W) continue;
                            for (std::size_t h = 0; h < spec.hidden; ++h) {
                                acc += p[spec.w2_index(o, ky, kx, h)] *
                                       pass.a1.at(t, yy - off, xx - off, h);
                            }
                        }
                    }
                    pass.out.at(t, y, x, o) += acc;
                }
            }
        }
    }
    return pass;
}

}  // namespace detail

inline VideoTensor model_forward(const ModelState& m, const VideoTensor& lr) {
    return detail::run_forward(m, lr).out;
}

/// Exact reverse-mode gradient of the forward map w.r.t. the parameters,
/// contracted with grad_out. ReLU derivative at exactly 0 is 0.
inline ParamVector model_backward(const ModelState& m, const VideoTensor& lr,
                                  const VideoTensor& grad_out) {
    const ModelSpec& spec = m.spec;
    detail::ForwardPass pass = detail::run_forward(m, lr);
    require_same_shape(grad_out, pass.out, "model_backward");

    const std::size_t k = spec.kernel;
    const std::size_t off = k / 2;
    const std::size_t T = pass.up.frames, H = pass.up.height, W = pass.up.width;
    const std::vector<double>& p = m.params.values;

    ParamVector grad;
    grad.layout_id = m.params.layout_id;
    grad.values.assign(spec.param_count(), 0.0);
    std::vector<double>& g = grad.values;

    // Layer 2: weight/bias gradients and the pullback into a1.
    VideoTensor da1(T, H, W, spec.hidden);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t y = 0; y < H; ++y) {
            for (std::size_t x = 0; x < W; ++x) {
                for (std::size_t o = 0; o < spec.channels; ++o) {
                    double go = grad_out.at(t, y, x, o);
                    if (go == 0.0) continue;
                    g[spec.b2_offset() + o] += go;
                    for (std::size_t ky = 0; ky < k; ++ky) {
                        std::size_t yy = y + ky;
                        if (yy < off || yy - off >= H) continue;
                        for (std::size_t kx = 0; kx < k; ++kx) {
                            std::size_t xx = x + kx;
                            if (xx < off || xx - off >= W) continue;
                            for (std::size_t h = 0; h < spec.hidden; ++h) {
                                double a = pass.a1.at(t, yy - off, xx - off, h);
                                g[spec.w2_index(o, ky, kx, h)] += go * a;
                                da1.at(t, yy - off, xx - off, h) +=
                                    go * p[spec.w2_index(o, ky, kx, h)];
                            }
                        }
                    }
                }
            }
        }
    }

    // ReLU gate, then layer-1 gradients.
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t y = 0; y < H; ++y) {
            for (std::size_t x = 0; x < W; ++x) {
                for (std::size_t h = 0; h < spec.hidden; ++h) {
                    if (pass.z1.at(t, y, x, h) <= 0.0) continue;
                    double dz = da1.at(t, y, x, h);
                    if (dz == 0.0) continue;
                    g[spec.b1_offset() + h] += dz;
                    for (std::size_t ky = 0; ky < k; ++ky) {
                        std::size_t yy = y + ky;
                        if (yy < off || yy - off >= H) continue;
                        for (std::size_t kx = 0; kx < k; ++kx) {
                            std::size_t xx = x + kx;
                            if (xx < off || xx - off >= W) continue;
                            for (std::size_t c = 0; c < spec.channels; ++c) {
                                g[spec.w1_index(h, ky, kx, c)] +=
                                    dz * pass.up.at(t, yy - off, xx - off, c);
                            }
                        }
                    }
                }
            }
        }
    }
    return grad;
}

/// params' = params - eta * grad; the input state is left untouched.
inline ModelState sgd_step(const ModelState& m, const ParamVector& grad, double eta) {
    require_same_layout(m.params, grad, "sgd_step");
    if (!(eta > 0.0)) throw DomainError("sgd_step: eta must be > 0");
    ModelState next = m;
    for (std::size_t i = 0; i < next.params.values.size(); ++i) {
        next.params.values[i] -= eta * grad.values[i];
    }
    return next;
}

/// Central-difference validation of the full analytic chain
/// d(total_loss)/d(params). Parameters whose +-h perturbation could push a
/// first-layer pre-activation across the ReLU kink are skipped, so the
/// comparison only ever samples points where the loss is smooth.
inline double finite_diff_check(const ModelState& m, const VideoTensor& lr,
                                const VideoTensor& hr, const LossConfig& cfg,
                                std::uint64_t seed = 0, std::size_t target_params = 50) {
    const ModelSpec& spec = m.spec;
    const std::size_t k = spec.kernel;
    const std::size_t off = k / 2;
    const double h_step = 1e-5;
    const double kink_margin = 8.0 * h_step;

    detail::ForwardPass pass = detail::run_forward(m, lr);
    VideoTensor grad_out = total_loss_grad(pass.out, hr, cfg);
    ParamVector analytic = model_backward(m, lr, grad_out);

    const std::size_t T = pass.up.frames, H = pass.up.height, W = pass.up.width;

    // True iff perturbing parameter p by +-h_step cannot flip any ReLU unit.
    auto safe_from_kinks = [&](std::size_t p) {
        if (p >= spec.w2_offset()) return true;  // layer 2 never moves z1
        std::size_t hid;
        bool is_weight = p < spec.b1_offset();
        std::size_t ky = 0, kx = 0, c = 0;
        if (is_weight) {
            std::size_t rest = p;
            c = rest % spec.channels;
            rest /= spec.channels;
            kx = rest % k;
            rest /= k;
            ky = rest % k;
            hid = rest / k;
        } else {
            hid = p - spec.b1_offset();
        }
        for (std::size_t t = 0; t < T; ++t) {
            for (std::size_t y = 0; y < H; ++y) {
                for (std::size_t x = 0; x < W; ++x) {
                    double tap = 1.0;
                    if (is_weight) {
                        std::size_t yy = y + ky, xx = x + kx;
                        if (yy < off || yy - off >= H || xx < off || xx - off >= W) continue;
                        tap = pass.up.at(t, yy - off, xx - off, c);
                        if (tap == 0.0) continue;
                    }
                    if (std::abs(pass.z1.at(t, y, x, hid)) <= kink_margin * std::abs(tap)) {
                        return false;
                    }
                }
            }
        }
        return true;
    };

    std::vector<std::size_t> order(spec.param_count());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    RandomStream rng(seed, StreamPurpose::GradCheck);
    rng.shuffle(order.begin(), order.end());

    double max_rel = 0.0;
    std::size_t checked = 0;
    for (std::size_t p : order) {
        if (checked >= target_params) break;
        if (!safe_from_kinks(p)) continue;
        ModelState plus = m, minus = m;
        plus.params.values[p] += h_step;
        minus.params.values[p] -= h_step;
        double lp = total_loss(model_forward(plus, lr), hr, cfg).total;
        double lm = total_loss(model_forward(minus, lr), hr, cfg).total;
        double fd = (lp - lm) / (2.0 * h_step);
        double a = analytic.values[p];
        double rel = std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-4});
        max_rel = std::max(max_rel, rel);
        ++checked;
    }
    return max_rel;
}

}  // namespace fedvsr
