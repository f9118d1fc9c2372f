#pragma once

// Flat `key = value` experiment configuration. Unknown keys are hard errors,
// missing keys take documented defaults, and the resolved config can be
// rendered to a manifest that reparses bit-identically.

#include <charconv>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fedvsr/aggregation.hpp"
#include "fedvsr/datasim.hpp"
#include "fedvsr/losses.hpp"
#include "fedvsr/model.hpp"

namespace fedvsr {

/// Window over which a client averages its reported mean loss.
enum class LossWindow { FinalEpoch, AllEpochs };

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::size_t rounds = 30;
    std::size_t num_clients = 8;
    double participation_rate = 0.5;
    std::size_t local_epochs = 1;
    double learning_rate = 0.05;
    double failure_rate = 0.0;
    Strategy strategy = Strategy::FedVsr;
    double alpha = 2.0;
    double tau = 0.1;
    AlphaDecayMode alpha_decay_mode = AlphaDecayMode::Cumulative;
    double epsilon = 1e-3;
    double lambda_vsr = 1.0;
    double lambda_hifr = 0.1;
    double prox_mu = 0.0;
    LossWindow loss_window = LossWindow::FinalEpoch;
    std::size_t scale = 2;
    std::size_t kernel = 3;
    std::size_t hidden = 8;
    std::size_t channels = 1;
    PartitionMode partition_mode = PartitionMode::NonIid;
    std::size_t clips_per_client = 6;
    std::size_t frames = 8;
    std::size_t hr_height = 32;
    std::size_t hr_width = 32;
    std::size_t eval_clips = 4;
    std::string degradation = "box";
    bool dump_clips = false;

    bool operator==(const ExperimentConfig&) const = default;

    LossConfig loss() const { return {epsilon, lambda_vsr, lambda_hifr, prox_mu}; }
    AggregationConfig aggregation() const { return {alpha, tau, strategy, alpha_decay_mode}; }
    ModelSpec model() const { return {scale, kernel, hidden, channels}; }
    DataGeometry geometry() const { return {frames, hr_height, hr_width, channels, scale}; }
    std::size_t cohort_size() const {
        auto c = static_cast<std::size_t>(std::lround(
            static_cast<double>(num_clients) * participation_rate));
        return std::max<std::size_t>(1, c);
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string cfg_where(int line) {
    return line > 0 ? "line " + std::to_string(line) + ": " : "";
}

inline double parse_double_value(const std::string& v, const std::string& key, int line) {
    double out = 0.0;
    const char* begin = v.data();
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(cfg_where(line) + key + ": malformed number '" + v + "'");
    }
    return out;
}

inline std::uint64_t parse_u64_value(const std::string& v, const std::string& key, int line) {
    std::uint64_t out = 0;
    const char* begin = v.data();
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(cfg_where(line) + key + ": malformed unsigned integer '" + v + "'");
    }
    return out;
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct KeySpec {
    std::string name;
    bool numeric;  // eligible as a sweep key
    std::function<void(ExperimentConfig&, const std::string&, int)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

inline const std::vector<KeySpec>& config_keys() {
    static const std::vector<KeySpec> keys = [] {
        std::vector<KeySpec> k;
        auto add_u64 = [&k](const char* name, std::uint64_t ExperimentConfig::* field) {
            k.push_back({name, true,
                         [name, field](ExperimentConfig& c, const std::string& v, int line) {
                             c.*field = parse_u64_value(v, name, line);
                         },
                         [field](const ExperimentConfig& c) { return std::to_string(c.*field); }});
        };
        auto add_size = [&k](const char* name, std::size_t ExperimentConfig::* field,
                             std::size_t lo, std::size_t hi) {
            k.push_back({name, true,
                         [name, field, lo, hi](ExperimentConfig& c, const std::string& v,
                                               int line) {
                             std::uint64_t x = parse_u64_value(v, name, line);
                             if (x < lo || x > hi) {
                                 throw ConfigError(cfg_where(line) + std::string(name) +
                                                   " must be in [" + std::to_string(lo) + ", " +
                                                   std::to_string(hi) + "], got " +
                                                   std::to_string(x));
                             }
                             c.*field = static_cast<std::size_t>(x);
                         },
                         [field](const ExperimentConfig& c) { return std::to_string(c.*field); }});
        };
        auto add_double = [&k](const char* name, double ExperimentConfig::* field,
                               const char* range, auto ok) {
            k.push_back({name, true,
                         [name, field, range, ok](ExperimentConfig& c, const std::string& v,
                                                  int line) {
                             double x = parse_double_value(v, name, line);
                             if (!std::isfinite(x) || !ok(x)) {
                                 throw ConfigError(cfg_where(line) + std::string(name) +
                                                   " must be in " + range + ", got " + v);
                             }
                             c.*field = x;
                         },
                         [field](const ExperimentConfig& c) { return format_double(c.*field); }});
        };

        add_u64("seed", &ExperimentConfig::seed);
        add_size("rounds", &ExperimentConfig::rounds, 1, 1000000);
        add_size("num_clients", &ExperimentConfig::num_clients, 1, 1000000);
        add_double("participation_rate", &ExperimentConfig::participation_rate, "(0, 1]",
                   [](double x) { return x > 0.0 && x <= 1.0; });
        add_size("local_epochs", &ExperimentConfig::local_epochs, 1, 1000000);
        add_double("learning_rate", &ExperimentConfig::learning_rate, "(0, inf)",
                   [](double x) { return x > 0.0; });
        add_double("failure_rate", &ExperimentConfig::failure_rate, "[0, 1)",
                   [](double x) { return x >= 0.0 && x < 1.0; });
        k.push_back({"strategy", false,
                     [](ExperimentConfig& c, const std::string& v, int line) {
                         if (v == "fedavg") c.strategy = Strategy::FedAvg;
                         else if (v == "fedvsr") c.strategy = Strategy::FedVsr;
                         else if (v == "fedmedian") c.strategy = Strategy::FedMedian;
                         else if (v == "fedvsr_greedy") c.strategy = Strategy::FedVsrGreedy;
                         else
                             throw ConfigError(cfg_where(line) +
                                               "strategy must be one of fedavg, fedvsr, "
                                               "fedmedian, fedvsr_greedy; got '" + v + "'");
                     },
                     [](const ExperimentConfig& c) { return strategy_name(c.strategy); }});
        add_double("alpha", &ExperimentConfig::alpha, "(0, inf)",
                   [](double x) { return x > 0.0; });
        add_double("tau", &ExperimentConfig::tau, "[0, 1)",
                   [](double x) { return x >= 0.0 && x < 1.0; });
        k.push_back({"alpha_decay_mode", false,
                     [](ExperimentConfig& c, const std::string& v, int line) {
                         if (v == "cumulative") c.alpha_decay_mode = AlphaDecayMode::Cumulative;
                         else if (v == "from_initial")
                             c.alpha_decay_mode = AlphaDecayMode::FromInitial;
                         else
                             throw ConfigError(cfg_where(line) +
                                               "alpha_decay_mode must be cumulative or "
                                               "from_initial; got '" + v + "'");
                     },
                     [](const ExperimentConfig& c) {
                         return c.alpha_decay_mode == AlphaDecayMode::Cumulative
                                    ? "cumulative"
                                    : "from_initial";
                     }});
        add_double("epsilon", &ExperimentConfig::epsilon, "(0, inf)",
                   [](double x) { return x > 0.0; });
        add_double("lambda_vsr", &ExperimentConfig::lambda_vsr, "[0, inf)",
                   [](double x) { return x >= 0.0; });
        add_double("lambda_hifr", &ExperimentConfig::lambda_hifr, "[0, inf)",
                   [](double x) { return x >= 0.0; });
        add_double("prox_mu", &ExperimentConfig::prox_mu, "[0, inf)",
                   [](double x) { return x >= 0.0; });
        k.push_back({"loss_window", false,
                     [](ExperimentConfig& c, const std::string& v, int line) {
                         if (v == "final_epoch") c.loss_window = LossWindow::FinalEpoch;
                         else if (v == "all_epochs") c.loss_window = LossWindow::AllEpochs;
                         else
                             throw ConfigError(cfg_where(line) +
                                               "loss_window must be final_epoch or all_epochs; "
                                               "got '" + v + "'");
                     },
                     [](const ExperimentConfig& c) {
                         return c.loss_window == LossWindow::FinalEpoch ? "final_epoch"
                                                                        : "all_epochs";
                     }});
        add_size("scale", &ExperimentConfig::scale, 2, 64);
        add_size("kernel", &ExperimentConfig::kernel, 1, 15);
        add_size("hidden", &ExperimentConfig::hidden, 1, 4096);
        add_size("channels", &ExperimentConfig::channels, 1, 3);
        k.push_back({"partition_mode", false,
                     [](ExperimentConfig& c, const std::string& v, int line) {
                         if (v == "iid") c.partition_mode = PartitionMode::Iid;
                         else if (v == "noniid") c.partition_mode = PartitionMode::NonIid;
                         else
                             throw ConfigError(cfg_where(line) +
                                               "partition_mode must be iid or noniid; got '" +
                                               v + "'");
                     },
                     [](const ExperimentConfig& c) {
                         return c.partition_mode == PartitionMode::Iid ? "iid" : "noniid";
                     }});
        add_size("clips_per_client", &ExperimentConfig::clips_per_client, 1, 100000);
        add_size("frames", &ExperimentConfig::frames, 2, 4096);
        add_size("hr_height", &ExperimentConfig::hr_height, 2, 65536);
        add_size("hr_width", &ExperimentConfig::hr_width, 2, 65536);
        add_size("eval_clips", &ExperimentConfig::eval_clips, 1, 100000);
        k.push_back({"degradation", false,
                     [](ExperimentConfig& c, const std::string& v, int line) {
                         if (v != "box") {
                             throw ConfigError(cfg_where(line) +
                                               "degradation: only 'box' is supported; got '" +
                                               v + "'");
                         }
                         c.degradation = v;
                     },
                     [](const ExperimentConfig& c) { return c.degradation; }});
        k.push_back({"dump_clips", false,
                     [](ExperimentConfig& c, const std::string& v, int line) {
                         if (v == "true") c.dump_clips = true;
                         else if (v == "false") c.dump_clips = false;
                         else
                             throw ConfigError(cfg_where(line) +
                                               "dump_clips must be true or false; got '" + v +
                                               "'");
                     },
                     [](const ExperimentConfig& c) {
                         return c.dump_clips ? "true" : "false";
                     }});
        return k;
    }();
    return keys;
}

}  // namespace detail

/// Cross-field constraints that single-key checks cannot see.
inline void validate_config(const ExperimentConfig& c) {
    if (c.channels != 1 && c.channels != 3) {
        throw ConfigError("channels must be 1 or 3, got " + std::to_string(c.channels));
    }
    if (c.kernel % 2 == 0) {
        throw ConfigError("kernel must be odd, got " + std::to_string(c.kernel));
    }
    if (c.frames % 2 != 0) {
        throw ConfigError("frames must be even, got " + std::to_string(c.frames));
    }
    if (c.hr_height % (2 * c.scale) != 0 || c.hr_width % (2 * c.scale) != 0) {
        throw ConfigError("hr_height and hr_width must be divisible by 2*scale = " +
                          std::to_string(2 * c.scale) + ", got " +
                          std::to_string(c.hr_height) + "x" + std::to_string(c.hr_width));
    }
    if (c.cohort_size() > c.num_clients) {
        throw ConfigError("cohort size exceeds num_clients");
    }
}

/// Parses flat `key = value` text. `#` starts a comment, blank lines are
/// skipped, unknown keys are errors, later assignments win.
inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos
                                                                     : eol - pos);
        pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(detail::cfg_where(line_no) + "expected 'key = value', got '" +
                              line + "'");
        }
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        const detail::KeySpec* spec = nullptr;
        for (const auto& ks : detail::config_keys()) {
            if (ks.name == key) {
                spec = &ks;
                break;
            }
        }
        if (!spec) {
            throw ConfigError(detail::cfg_where(line_no) + "unknown key '" + key + "'");
        }
        spec->set(cfg, value, line_no);
    }
    validate_config(cfg);
    return cfg;
}

/// Every resolved key, defaults included, one `key = value` line each.
inline std::string render_manifest(const ExperimentConfig& cfg) {
    std::string out;
    for (const auto& ks : detail::config_keys()) {
        out += ks.name;
        out += " = ";
        out += ks.get(cfg);
        out += "\n";
    }
    return out;
}

inline bool is_numeric_key(const std::string& key) {
    for (const auto& ks : detail::config_keys()) {
        if (ks.name == key) return ks.numeric;
    }
    return false;
}

/// Applies one `key = value` assignment (used by the sweep runner), then
/// re-validates the whole config.
inline void apply_override(ExperimentConfig& cfg, const std::string& key,
                           const std::string& value) {
    for (const auto& ks : detail::config_keys()) {
        if (ks.name == key) {
            ks.set(cfg, detail::trim(value), 0);
            validate_config(cfg);
            return;
        }
    }
    throw ConfigError("unknown key '" + key + "'");
}

}  // namespace fedvsr
