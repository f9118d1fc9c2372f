#pragma once

// Server-side aggregation: uniform and inverse-loss weight distributions,
// their Hellinger distance, the thresholded mixing coefficient, the hybrid
// loss-aware weights, weighted parameter merging, the coordinate-wise
// median baseline, and the adaptive-step decay schedule.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fedvsr/core.hpp"

namespace fedvsr {

enum class Strategy { FedAvg, FedVsr, FedMedian, FedVsrGreedy };

enum class AlphaDecayMode { Cumulative, FromInitial };

inline const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::FedAvg: return "fedavg";
        case Strategy::FedVsr: return "fedvsr";
        case Strategy::FedMedian: return "fedmedian";
        default: return "fedvsr_greedy";
    }
}

struct AggregationConfig {
    double alpha = 2.0;  // adaptive step, > 0
    double tau = 0.1;    // mixing threshold in [0, 1)
    Strategy strategy = Strategy::FedVsr;
    AlphaDecayMode decay_mode = AlphaDecayMode::Cumulative;
};

/// One client's upload: updated parameters plus a single scalar, the mean
/// local loss over its training batches.
struct ClientUpdate {
    ParamVector params;
    double mean_loss = 0.0;
    std::size_t client_id = 0;
};

// Reported losses below this are clamped before inversion so no client can
// acquire an unbounded weight.
constexpr double kMinClientLoss = 1e-8;

inline std::vector<double> uniform_weights(std::size_t n) {
    if (n == 0) throw DomainError("uniform_weights: empty cohort");
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

/// l_i = (1/L_i)^alpha, normalized to sum 1.
inline std::vector<double> inverse_loss_weights(const std::vector<double>& losses,
                                                double alpha) {
    if (losses.empty()) throw DomainError("inverse_loss_weights: empty cohort");
    if (!(alpha > 0.0)) throw DomainError("inverse_loss_weights: alpha must be > 0");
    std::vector<double> w(losses.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < losses.size(); ++i) {
        if (!(losses[i] > 0.0)) {
            throw DomainError("inverse_loss_weights: loss " + std::to_string(i) +
                              " must be > 0");
        }
        w[i] = std::pow(1.0 / losses[i], alpha);
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
}

inline void require_probability_vector(const std::vector<double>& v, const char* what) {
    double sum = 0.0;
    for (double x : v) {
        if (!(x >= 0.0)) throw DomainError(std::string(what) + ": negative entry");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw DomainError(std::string(what) + ": entries sum to " + std::to_string(sum) +
                          ", expected 1");
    }
}

/// H = sqrt(1/2 * sum_i (sqrt(u_i) - sqrt(l_i))^2), in [0, 1].
inline double hellinger(const std::vector<double>& u, const std::vector<double>& l) {
    if (u.size() != l.size()) throw DomainError("hellinger: length mismatch");
    require_probability_vector(u, "hellinger");
    require_probability_vector(l, "hellinger");
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double d = std::sqrt(u[i]) - std::sqrt(l[i]);
        acc += d * d;
    }
    return std::min(1.0, std::sqrt(0.5 * acc));
}

/// m = 0 for h < tau, (h - tau) / (1 - tau) otherwise.
inline double mixing_coefficient(double h, double tau) {
    if (!(h >= 0.0 && h <= 1.0)) throw DomainError("mixing_coefficient: h outside [0, 1]");
    if (!(tau >= 0.0 && tau < 1.0)) throw DomainError("mixing_coefficient: tau outside [0, 1)");
    if (h < tau) return 0.0;
    return (h - tau) / (1.0 - tau);
}

struct HybridWeights {
    std::vector<double> weights;
    double hellinger = 0.0;
    double mixing = 0.0;
};

/// Hybrid loss-aware weights w = (1 - m) u + m l, with the diagnostics h
/// and m. Losses are clamped to kMinClientLoss before inversion.
inline HybridWeights fedvsr_weights(const std::vector<double>& losses, double alpha,
                                    double tau) {
    std::vector<double> clamped(losses.size());
    for (std::size_t i = 0; i < losses.size(); ++i) {
        clamped[i] = std::max(losses[i], kMinClientLoss);
    }
    HybridWeights out;
    std::vector<double> u = uniform_weights(losses.size());
    std::vector<double> l = inverse_loss_weights(clamped, alpha);
    out.hellinger = hellinger(u, l);
    out.mixing = mixing_coefficient(out.hellinger, tau);
    out.weights.resize(losses.size());
    for (std::size_t i = 0; i < losses.size(); ++i) {
        out.weights[i] = (1.0 - out.mixing) * u[i] + out.mixing * l[i];
    }
    return out;
}

/// Elementwise convex combination, accumulated in ascending client-index
/// order so the reduction is schedule-independent.
inline ParamVector weighted_average_params(const std::vector<ClientUpdate>& updates,
                                           const std::vector<double>& weights) {
    if (updates.empty()) throw DomainError("weighted_average_params: empty cohort");
    if (updates.size() != weights.size()) {
        throw DomainError("weighted_average_params: " + std::to_string(updates.size()) +
                          " updates vs " + std::to_string(weights.size()) + " weights");
    }
    require_probability_vector(weights, "weighted_average_params");
    for (std::size_t i = 1; i < updates.size(); ++i) {
        require_same_layout(updates[0].params, updates[i].params, "weighted_average_params");
    }
    ParamVector out;
    out.layout_id = updates[0].params.layout_id;
    out.values.assign(updates[0].params.values.size(), 0.0);
    for (std::size_t i = 0; i < updates.size(); ++i) {
        const std::vector<double>& v = updates[i].params.values;
        for (std::size_t j = 0; j < v.size(); ++j) {
            out.values[j] += weights[i] * v[j];
        }
    }
    return out;
}

/// Per-coordinate median; even cohort sizes average the two middle values.
inline ParamVector coordinate_median_params(const std::vector<ClientUpdate>& updates) {
    if (updates.empty()) throw DomainError("coordinate_median_params: empty cohort");
    for (std::size_t i = 1; i < updates.size(); ++i) {
        require_same_layout(updates[0].params, updates[i].params, "coordinate_median_params");
    }
    const std::size_t n = updates.size();
    ParamVector out;
    out.layout_id = updates[0].params.layout_id;
    out.values.resize(updates[0].params.values.size());
    std::vector<double> column(n);
    for (std::size_t j = 0; j < out.values.size(); ++j) {
        for (std::size_t i = 0; i < n; ++i) column[i] = updates[i].params.values[j];
        std::sort(column.begin(), column.end());
        out.values[j] = (n % 2 == 1) ? column[n / 2]
                                     : 0.5 * (column[n / 2 - 1] + column[n / 2]);
    }
    return out;
}

/// One application of the in-loop schedule alpha <- alpha^(1 - t/T).
inline double decay_adaptive_step(double alpha, std::size_t t, std::size_t total_rounds) {
    if (!(alpha > 0.0)) throw DomainError("decay_adaptive_step: alpha must be > 0");
    if (t < 1 || t > total_rounds) {
        throw DomainError("decay_adaptive_step: round " + std::to_string(t) +
                          " outside [1, " + std::to_string(total_rounds) + "]");
    }
    double exponent = 1.0 - static_cast<double>(t) / static_cast<double>(total_rounds);
    return std::pow(alpha, exponent);
}

}  // namespace fedvsr
