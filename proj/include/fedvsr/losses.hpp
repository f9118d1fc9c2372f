#pragma once

// Training objectives: the Charbonnier penalty, the wavelet high-frequency
// loss over the seven HF sub-bands with its analytic gradient, the combined
// objective, and the proximal term used for FedProx-style local updates.

#include <cmath>

#include "fedvsr/core.hpp"
#include "fedvsr/dwt3d.hpp"

namespace fedvsr {

struct LossConfig {
    double epsilon = 1e-3;     // Charbonnier constant, > 0
    double lambda_vsr = 1.0;   // weight of the pixel loss
    double lambda_hifr = 0.1;  // weight of the high-frequency loss
    double prox_mu = 0.0;      // proximal coefficient, 0 disables
};

inline void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0)) throw DomainError("charbonnier: epsilon must be > 0");
}

/// Mean over all elements of sqrt((pred - gt)^2 + epsilon^2).
inline double charbonnier(const VideoTensor& pred, const VideoTensor& gt, double epsilon) {
    require_same_shape(pred, gt, "charbonnier");
    require_epsilon(epsilon);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        double d = pred.data[i] - gt.data[i];
        acc += std::sqrt(d * d + epsilon * epsilon);
    }
    return acc / static_cast<double>(pred.data.size());
}

/// d/d(pred) of charbonnier: per element, diff / (N * sqrt(diff^2 + eps^2)).
inline VideoTensor charbonnier_grad(const VideoTensor& pred, const VideoTensor& gt,
                                    double epsilon) {
    require_same_shape(pred, gt, "charbonnier_grad");
    require_epsilon(epsilon);
    VideoTensor grad(pred.frames, pred.height, pred.width, pred.channels);
    const double inv_n = 1.0 / static_cast<double>(pred.data.size());
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        double d = pred.data[i] - gt.data[i];
        grad.data[i] = d * inv_n / std::sqrt(d * d + epsilon * epsilon);
    }
    return grad;
}

/// Charbonnier distance between the high-frequency stacks of pred and gt.
inline double hifr_loss(const VideoTensor& pred, const VideoTensor& gt, double epsilon) {
    require_same_shape(pred, gt, "hifr_loss");
    VideoTensor hf_pred = high_freq_stack(dwt3d_forward(pred));
    VideoTensor hf_gt = high_freq_stack(dwt3d_forward(gt));
    return charbonnier(hf_pred, hf_gt, epsilon);
}

/// Analytic gradient of hifr_loss w.r.t. pred. The per-coefficient gradient
/// of the Charbonnier mean is pulled back through the linear transform via
/// its adjoint, which for the orthonormal Haar DWT is the inverse with the
/// LLL gradient zeroed.
inline VideoTensor hifr_loss_grad(const VideoTensor& pred, const VideoTensor& gt,
                                  double epsilon) {
    require_same_shape(pred, gt, "hifr_loss_grad");
    require_epsilon(epsilon);
    VideoTensor hf_pred = high_freq_stack(dwt3d_forward(pred));
    VideoTensor hf_gt = high_freq_stack(dwt3d_forward(gt));
    VideoTensor coeff_grad = charbonnier_grad(hf_pred, hf_gt, epsilon);
    SubBands bands = scatter_high_freq(coeff_grad, pred.channels);
    return dwt3d_inverse(bands);
}

struct TotalLoss {
    double total = 0.0;
    double vsr = 0.0;
    double hifr = 0.0;
};

/// Combined objective: lambda_vsr * Charbonnier(pixels) + lambda_hifr * HiFr.
inline TotalLoss total_loss(const VideoTensor& pred, const VideoTensor& gt,
                            const LossConfig& cfg) {
    TotalLoss out;
    out.vsr = charbonnier(pred, gt, cfg.epsilon);
    out.hifr = hifr_loss(pred, gt, cfg.epsilon);
    out.total = cfg.lambda_vsr * out.vsr + cfg.lambda_hifr * out.hifr;
    return out;
}

/// Gradient of total_loss w.r.t. pred.
inline VideoTensor total_loss_grad(const VideoTensor& pred, const VideoTensor& gt,
                                   const LossConfig& cfg) {
    VideoTensor grad = charbonnier_grad(pred, gt, cfg.epsilon);
    for (double& g : grad.data) g *= cfg.lambda_vsr;
    if (cfg.lambda_hifr != 0.0) {
        VideoTensor hf = hifr_loss_grad(pred, gt, cfg.epsilon);
        for (std::size_t i = 0; i < grad.data.size(); ++i) {
            grad.data[i] += cfg.lambda_hifr * hf.data[i];
        }
    }
    return grad;
}

struct ProxTerm {
    double value = 0.0;
    ParamVector grad;
};

/// FedProx proximal term (mu/2) * ||w - w_global||^2 and its gradient.
inline ProxTerm prox_term(const ParamVector& w, const ParamVector& w_global, double mu) {
    require_same_layout(w, w_global, "prox_term");
    if (mu < 0.0) throw DomainError("prox_term: mu must be >= 0");
    ProxTerm out;
    out.grad.layout_id = w.layout_id;
    out.grad.values.resize(w.values.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        double d = w.values[i] - w_global.values[i];
        acc += d * d;
        out.grad.values[i] = mu * d;
    }
    out.value = 0.5 * mu * acc;
    return out;
}

}  // namespace fedvsr
