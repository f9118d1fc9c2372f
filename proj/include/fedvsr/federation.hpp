#pragma once

// Round-based simulation engine: client selection, failure injection, local
// SGD training, aggregation dispatch, per-round evaluation, and telemetry.
// The server keeps nothing between rounds but the global parameter vector
// and the scalar adaptive step.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fedvsr/aggregation.hpp"
#include "fedvsr/checkpoint.hpp"
#include "fedvsr/config.hpp"
#include "fedvsr/core.hpp"
#include "fedvsr/datasim.hpp"
#include "fedvsr/metrics.hpp"
#include "fedvsr/model.hpp"
#include "fedvsr/rng.hpp"

namespace fedvsr {

/// Everything the server persists between rounds.
struct ServerState {
    ParamVector global;
    double alpha = 2.0;
};

inline std::vector<std::uint8_t> serialize_server_state(const ServerState& s) {
    std::vector<std::uint8_t> bytes = serialize_params(s.global);
    detail::put_f64_le(bytes, s.alpha);
    return bytes;
}

struct RoundRecord {
    std::size_t round = 0;               // 1-based
    std::vector<std::size_t> selected;   // ascending client ids
    std::vector<std::size_t> survived;   // subset of selected
    std::vector<double> weights;         // final weight per survivor
    double hellinger = 0.0;
    double mixing = 0.0;
    double alpha = 0.0;                  // adaptive step used this round
    double mean_client_loss = 0.0;
    double eval_psnr = 0.0;
    double eval_ssim = 0.0;
};

/// Uniform subset without replacement, returned in ascending order.
inline std::vector<std::size_t> select_clients(std::size_t n_total, std::size_t cohort,
                                               RandomStream& rng) {
    if (cohort < 1 || cohort > n_total) {
        throw DomainError("select_clients: cohort " + std::to_string(cohort) +
                          " outside [1, " + std::to_string(n_total) + "]");
    }
    std::vector<std::size_t> ids(n_total);
    for (std::size_t i = 0; i < n_total; ++i) ids[i] = i;
    // Partial Fisher-Yates: the first `cohort` slots end up a uniform sample.
    for (std::size_t i = 0; i < cohort; ++i) {
        std::size_t j = i + rng.next_below(n_total - i);
        std::swap(ids[i], ids[j]);
    }
    ids.resize(cohort);
    std::sort(ids.begin(), ids.end());
    return ids;
}

/// Each selected client independently fails to upload with probability
/// failure_rate. Draws are keyed per (round, client) so enabling failures
/// does not perturb any other stream.
inline std::vector<std::size_t> apply_failure_mask(const std::vector<std::size_t>& selected,
                                                   double failure_rate, std::uint64_t seed,
                                                   std::size_t round) {
    if (!(failure_rate >= 0.0 && failure_rate < 1.0)) {
        throw DomainError("apply_failure_mask: failure_rate outside [0, 1)");
    }
    std::vector<std::size_t> survivors;
    survivors.reserve(selected.size());
    for (std::size_t id : selected) {
        RandomStream rng(seed, StreamPurpose::Failure, round, id);
        if (rng.next_unit() >= failure_rate) survivors.push_back(id);
    }
    return survivors;
}

/// Local training: E epochs of SGD over the shard in the round's batch
/// order, starting from the downloaded global parameters. The uploaded
/// scalar is the mean of total_loss over the configured loss window,
/// measured at the pre-step parameters of each batch.
inline ClientUpdate local_training(const ParamVector& global,
                                   const std::vector<ClipPair>& shard,
                                   const ExperimentConfig& cfg, std::size_t round,
                                   std::size_t client_id) {
    if (shard.empty()) {
        throw DataError("local_training: client " + std::to_string(client_id) +
                        " has an empty shard");
    }
    ModelState model{cfg.model(), global};
    if (model.params.layout_id != model.spec.layout_id()) {
        throw ShapeError("local_training: global layout " + global.layout_id +
                         " does not match model " + model.spec.layout_id());
    }
    LossConfig loss_cfg = cfg.loss();

    std::vector<std::size_t> order(shard.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    RandomStream order_rng(cfg.seed, StreamPurpose::BatchOrder, round);
    order_rng.shuffle(order.begin(), order.end());

    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t epoch = 0; epoch < cfg.local_epochs; ++epoch) {
        const bool record_epoch =
            cfg.loss_window == LossWindow::AllEpochs || epoch + 1 == cfg.local_epochs;
        for (std::size_t idx : order) {
            const ClipPair& clip = shard[idx];
            VideoTensor pred = model_forward(model, clip.lr);
            TotalLoss batch_loss = total_loss(pred, clip.hr, loss_cfg);
            if (record_epoch) {
                loss_sum += batch_loss.total;
                ++loss_count;
            }
            if (cfg.learning_rate == 0.0) continue;
            VideoTensor grad_out = total_loss_grad(pred, clip.hr, loss_cfg);
            ParamVector grad = model_backward(model, clip.lr, grad_out);
            if (cfg.prox_mu > 0.0) {
                ProxTerm prox = prox_term(model.params, global, cfg.prox_mu);
                for (std::size_t i = 0; i < grad.values.size(); ++i) {
                    grad.values[i] += prox.grad.values[i];
                }
            }
            model = sgd_step(model, grad, cfg.learning_rate);
        }
    }

    ClientUpdate update;
    update.params = model.params;
    update.mean_loss = loss_sum / static_cast<double>(loss_count);
    update.client_id = client_id;
    return update;
}

struct EvalScore {
    double psnr = 0.0;
    double ssim = 0.0;
};

inline EvalScore evaluate_model(const ModelSpec& spec, const ParamVector& params,
                                const std::vector<ClipPair>& eval_set) {
    ModelState model{spec, params};
    EvalScore score;
    for (const ClipPair& clip : eval_set) {
        VideoTensor pred = model_forward(model, clip.lr);
        score.psnr += compute_psnr(pred, clip.hr, 1.0);
        score.ssim += compute_ssim(pred, clip.hr);
    }
    score.psnr /= static_cast<double>(eval_set.size());
    score.ssim /= static_cast<double>(eval_set.size());
    return score;
}

/// One communication round: select, drop failures, train survivors,
/// aggregate, decay the adaptive step, evaluate. When every selected client
/// fails, the round is a no-op for the global model.
inline RoundRecord run_round(ServerState& state, const ClientPartition& part,
                             const std::vector<ClipPair>& eval_set,
                             const ExperimentConfig& cfg, std::size_t round) {
    RoundRecord rec;
    rec.round = round;
    rec.alpha = state.alpha;

    RandomStream select_rng(cfg.seed, StreamPurpose::Selection, round);
    rec.selected = select_clients(cfg.num_clients, cfg.cohort_size(), select_rng);
    rec.survived = apply_failure_mask(rec.selected, cfg.failure_rate, cfg.seed, round);

    if (!rec.survived.empty()) {
        std::vector<ClientUpdate> updates;
        updates.reserve(rec.survived.size());
        std::vector<double> losses;
        losses.reserve(rec.survived.size());
        for (std::size_t id : rec.survived) {
            updates.push_back(local_training(state.global, part.shards[id], cfg, round, id));
            losses.push_back(updates.back().mean_loss);
            rec.mean_client_loss += updates.back().mean_loss;
        }
        rec.mean_client_loss /= static_cast<double>(updates.size());

        switch (cfg.strategy) {
            case Strategy::FedAvg: {
                rec.weights = uniform_weights(updates.size());
                state.global = weighted_average_params(updates, rec.weights);
                break;
            }
            case Strategy::FedMedian: {
                rec.weights = uniform_weights(updates.size());
                state.global = coordinate_median_params(updates);
                break;
            }
            case Strategy::FedVsr: {
                HybridWeights hw = fedvsr_weights(losses, state.alpha, cfg.tau);
                rec.weights = hw.weights;
                rec.hellinger = hw.hellinger;
                rec.mixing = hw.mixing;
                state.global = weighted_average_params(updates, rec.weights);
                break;
            }
            case Strategy::FedVsrGreedy: {
                // F-GLA ablation: always fully loss-greedy (m pinned to 1).
                std::vector<double> clamped(losses.size());
                for (std::size_t i = 0; i < losses.size(); ++i) {
                    clamped[i] = std::max(losses[i], kMinClientLoss);
                }
                std::vector<double> u = uniform_weights(updates.size());
                rec.weights = inverse_loss_weights(clamped, state.alpha);
                rec.hellinger = hellinger(u, rec.weights);
                rec.mixing = 1.0;
                state.global = weighted_average_params(updates, rec.weights);
                break;
            }
        }
    }

    // The decay is a server-side schedule: it applies on fedvsr rounds even
    // when no client survived. Greedy ignores the schedule entirely.
    if (cfg.strategy == Strategy::FedVsr) {
        double base = cfg.alpha_decay_mode == AlphaDecayMode::Cumulative ? state.alpha
                                                                         : cfg.alpha;
        state.alpha = decay_adaptive_step(base, round, cfg.rounds);
    }

    EvalScore score = evaluate_model(cfg.model(), state.global, eval_set);
    rec.eval_psnr = score.psnr;
    rec.eval_ssim = score.ssim;
    return rec;
}

struct ExperimentResult {
    std::vector<RoundRecord> records;
    ParamVector final_params;
};

using RoundObserver = std::function<void(const ServerState&, const RoundRecord&)>;

inline ClientPartition make_partition(const ExperimentConfig& cfg) {
    return partition_clients(cfg.num_clients, cfg.clips_per_client, cfg.partition_mode,
                             cfg.geometry(), cfg.seed);
}

inline std::vector<ClipPair> make_eval_clips(const ExperimentConfig& cfg) {
    return make_eval_set(cfg.eval_clips, cfg.geometry(), cfg.seed);
}

/// T sequential rounds from a seeded initial model. The trajectory is a pure
/// function of (config, partition); the observer sees the server state after
/// every round.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       const ClientPartition& part,
                                       const std::vector<ClipPair>& eval_set,
                                       const RoundObserver& observer = {}) {
    if (part.shards.size() != cfg.num_clients) {
        throw DataError("run_experiment: partition has " +
                        std::to_string(part.shards.size()) + " shards for " +
                        std::to_string(cfg.num_clients) + " clients");
    }
    for (const auto& shard : part.shards) {
        if (shard.empty()) throw DataError("run_experiment: empty client shard");
    }
    if (eval_set.empty()) throw DataError("run_experiment: empty evaluation set");

    ServerState state;
    state.global = init_model(cfg.model(), cfg.seed).params;
    state.alpha = cfg.alpha;

    ExperimentResult result;
    result.records.reserve(cfg.rounds);
    for (std::size_t t = 1; t <= cfg.rounds; ++t) {
        result.records.push_back(run_round(state, part, eval_set, cfg, t));
        if (observer) observer(state, result.records.back());
    }
    result.final_params = state.global;
    return result;
}

namespace detail {

inline std::string format_metric(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return format_double(v);
}

}  // namespace detail

/// One row per round; floating-point columns use 17 significant digits so
/// the values round-trip exactly.
inline std::string render_metrics_csv(const std::vector<RoundRecord>& records,
                                      Strategy strategy) {
    std::string out =
        "round,strategy,alpha,hellinger,mixing_m,mean_client_loss,"
        "n_selected,n_survived,eval_psnr,eval_ssim\n";
    for (const RoundRecord& r : records) {
        out += std::to_string(r.round);
        out += ',';
        out += strategy_name(strategy);
        out += ',';
        out += detail::format_metric(r.alpha);
        out += ',';
        out += detail::format_metric(r.hellinger);
        out += ',';
        out += detail::format_metric(r.mixing);
        out += ',';
        out += detail::format_metric(r.mean_client_loss);
        out += ',';
        out += std::to_string(r.selected.size());
        out += ',';
        out += std::to_string(r.survived.size());
        out += ',';
        out += detail::format_metric(r.eval_psnr);
        out += ',';
        out += detail::format_metric(r.eval_ssim);
        out += '\n';
    }
    return out;
}

}  // namespace fedvsr
