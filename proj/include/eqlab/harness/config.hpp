// Experiment configuration and its flat key=value file format.
//
// Every key maps 1:1 onto an ExperimentConfig field; unknown keys are an
// error so typos cannot silently fall back to defaults. Lists are
// comma-separated; generator polynomials are octal.
#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqlab/coding.hpp"
#include "eqlab/equalizers/cnn.hpp"
#include "eqlab/equalizers/framing.hpp"
#include "eqlab/equalizers/rnn.hpp"
#include "eqlab/equalizers/training.hpp"
#include "eqlab/lms.hpp"

namespace eqlab::harness {

enum class Variant { none, no_isi_reference, lms, cnn, rnn };

inline const std::vector<Variant>& all_variants() {
    static const std::vector<Variant> v{Variant::none, Variant::no_isi_reference, Variant::lms,
                                        Variant::cnn, Variant::rnn};
    return v;
}

inline std::string to_string(Variant v) {
    switch (v) {
        case Variant::none: return "none";
        case Variant::no_isi_reference: return "no_isi_reference";
        case Variant::lms: return "lms";
        case Variant::cnn: return "cnn";
        case Variant::rnn: return "rnn";
    }
    throw std::logic_error("unknown variant");
}

inline Variant parse_variant(const std::string& s) {
    for (Variant v : all_variants())
        if (to_string(v) == s) return v;
    throw std::invalid_argument("unknown variant '" + s + "'");
}

// Shortest round-trip decimal form; deterministic across runs.
inline std::string format_double(double d) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), d);
    return std::string(buf, res.ptr);
}

struct ExperimentConfig {
    ConvCodeSpec code{};
    std::vector<double> channel_taps{0.84, 0.47, 0.28};
    std::vector<double> snr_db_list{0, 2, 4, 6, 8};
    std::size_t training_bits = 480000;
    std::size_t testing_bits = 1920000;
    bool desk_scale = false;
    std::size_t desk_training_bits = 48000;
    std::size_t desk_testing_bits = 192000;
    std::vector<Variant> variants = all_variants();
    std::uint64_t seed = 1;
    std::string out_dir = "runs/default";
    LmsConfig lms{};
    TrainConfig train{};  // per-model seeds are derived from `seed`, not from here
    FrameSpec frame{};
    CnnEqualizerArch cnn{};
    RnnEqualizerArch rnn{};
    bool mixed_snr_training = false;
    std::size_t jobs = 1;

    std::size_t effective_training_bits() const {
        return desk_scale ? desk_training_bits : training_bits;
    }
    std::size_t effective_testing_bits() const {
        return desk_scale ? desk_testing_bits : testing_bits;
    }

    void validate() const {
        code.validate();
        lms.validate();
        train.validate();
        frame.validate();
        if (channel_taps.empty())
            throw std::invalid_argument("ExperimentConfig: channel_taps must not be empty");
        if (snr_db_list.empty())
            throw std::invalid_argument("ExperimentConfig: snr_db_list must not be empty");
        if (variants.empty())
            throw std::invalid_argument("ExperimentConfig: variants must not be empty");
        for (std::size_t bits : {effective_training_bits(), effective_testing_bits()}) {
            if (bits == 0 || bits % 2 != 0)
                throw std::invalid_argument("ExperimentConfig: bit counts must be positive and even");
            // QPSK consumes two coded bits per symbol; termination must keep that whole.
            if ((bits + code.m_memory) * code.n_outputs % 2 != 0)
                throw std::invalid_argument(
                    "ExperimentConfig: coded bit count not divisible by bits per symbol");
        }
        if (lms.reference_delay >= lms.num_taps + channel_taps.size())
            throw std::invalid_argument(
                "ExperimentConfig: lms reference_delay must be < num_taps + channel length");
        if (jobs < 1)
            throw std::invalid_argument("ExperimentConfig: jobs must be >= 1");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(s);
    while (std::getline(ss, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

inline double parse_f64(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + key + ": '" + s + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& s, int base = 10) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::invalid_argument("config: bad integer for " + key + ": '" + s + "'");
    return v;
}

inline bool parse_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw std::invalid_argument("config: bad bool for " + key + ": '" + s + "'");
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value, got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        using detail::parse_bool;
        using detail::parse_f64;
        using detail::parse_u64;

        if (key == "seed") cfg.seed = parse_u64(key, val);
        else if (key == "out_dir") cfg.out_dir = val;
        else if (key == "snr_db_list") {
            cfg.snr_db_list.clear();
            for (const auto& item : detail::split_list(val))
                cfg.snr_db_list.push_back(parse_f64(key, item));
        } else if (key == "training_bits") cfg.training_bits = parse_u64(key, val);
        else if (key == "testing_bits") cfg.testing_bits = parse_u64(key, val);
        else if (key == "desk_scale") cfg.desk_scale = parse_bool(key, val);
        else if (key == "desk_training_bits") cfg.desk_training_bits = parse_u64(key, val);
        else if (key == "desk_testing_bits") cfg.desk_testing_bits = parse_u64(key, val);
        else if (key == "variants") {
            cfg.variants.clear();
            for (const auto& item : detail::split_list(val))
                cfg.variants.push_back(parse_variant(item));
        } else if (key == "channel_taps") {
            cfg.channel_taps.clear();
            for (const auto& item : detail::split_list(val))
                cfg.channel_taps.push_back(parse_f64(key, item));
        } else if (key == "code_n_outputs") cfg.code.n_outputs = parse_u64(key, val);
        else if (key == "code_m_memory") cfg.code.m_memory = parse_u64(key, val);
        else if (key == "code_generators") {
            cfg.code.generators.clear();
            for (const auto& item : detail::split_list(val))
                cfg.code.generators.push_back(static_cast<unsigned>(parse_u64(key, item, 8)));
        } else if (key == "lms_num_taps") cfg.lms.num_taps = parse_u64(key, val);
        else if (key == "lms_step_size") cfg.lms.step_size = parse_f64(key, val);
        else if (key == "lms_reference_delay") cfg.lms.reference_delay = parse_u64(key, val);
        else if (key == "lms_training_len") cfg.lms.training_len = parse_u64(key, val);
        else if (key == "train_validation_fraction")
            cfg.train.validation_fraction = parse_f64(key, val);
        else if (key == "train_patience") cfg.train.patience = parse_u64(key, val);
        else if (key == "train_max_epochs") cfg.train.max_epochs = parse_u64(key, val);
        else if (key == "train_batch_size") cfg.train.batch_size = parse_u64(key, val);
        else if (key == "train_learning_rate") cfg.train.learning_rate = parse_f64(key, val);
        else if (key == "frame_payload") cfg.frame.payload = parse_u64(key, val);
        else if (key == "frame_guard") cfg.frame.guard = parse_u64(key, val);
        else if (key == "cnn_conv1_kernels") cfg.cnn.conv1_kernels = parse_u64(key, val);
        else if (key == "cnn_conv1_width") cfg.cnn.conv1_width = parse_u64(key, val);
        else if (key == "cnn_conv2_kernels") cfg.cnn.conv2_kernels = parse_u64(key, val);
        else if (key == "cnn_conv2_width") cfg.cnn.conv2_width = parse_u64(key, val);
        else if (key == "rnn_lstm1_cells") cfg.rnn.lstm1_cells = parse_u64(key, val);
        else if (key == "rnn_lstm2_cells") cfg.rnn.lstm2_cells = parse_u64(key, val);
        else if (key == "rnn_dense_hidden") cfg.rnn.dense_hidden = parse_u64(key, val);
        else if (key == "mixed_snr_training") cfg.mixed_snr_training = parse_bool(key, val);
        else if (key == "jobs") cfg.jobs = parse_u64(key, val);
        else
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
    }
    // Frame geometry follows payload/guard; architectures share the frame.
    cfg.frame.window = cfg.frame.payload + 2 * cfg.frame.guard;
    cfg.frame.stride = cfg.frame.payload;
    cfg.cnn.frame = cfg.frame;
    cfg.rnn.frame = cfg.frame;
    cfg.validate();
    return cfg;
}

inline std::string config_to_string(const ExperimentConfig& cfg) {
    std::string out;
    const auto kv = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
    kv("seed", std::to_string(cfg.seed));
    kv("out_dir", cfg.out_dir);
    std::string snrs;
    for (std::size_t i = 0; i < cfg.snr_db_list.size(); ++i)
        snrs += (i ? "," : "") + format_double(cfg.snr_db_list[i]);
    kv("snr_db_list", snrs);
    kv("training_bits", std::to_string(cfg.training_bits));
    kv("testing_bits", std::to_string(cfg.testing_bits));
    kv("desk_scale", cfg.desk_scale ? "true" : "false");
    kv("desk_training_bits", std::to_string(cfg.desk_training_bits));
    kv("desk_testing_bits", std::to_string(cfg.desk_testing_bits));
    std::string vars;
    for (std::size_t i = 0; i < cfg.variants.size(); ++i)
        vars += (i ? "," : "") + to_string(cfg.variants[i]);
    kv("variants", vars);
    std::string taps;
    for (std::size_t i = 0; i < cfg.channel_taps.size(); ++i)
        taps += (i ? "," : "") + format_double(cfg.channel_taps[i]);
    kv("channel_taps", taps);
    kv("code_n_outputs", std::to_string(cfg.code.n_outputs));
    kv("code_m_memory", std::to_string(cfg.code.m_memory));
    std::string gens;
    for (std::size_t i = 0; i < cfg.code.generators.size(); ++i)
        gens += (i ? "," : "") + ConvCodeSpec::to_octal(cfg.code.generators[i]);
    kv("code_generators", gens);
    kv("lms_num_taps", std::to_string(cfg.lms.num_taps));
    kv("lms_step_size", format_double(cfg.lms.step_size));
    kv("lms_reference_delay", std::to_string(cfg.lms.reference_delay));
    kv("lms_training_len", std::to_string(cfg.lms.training_len));
    kv("train_validation_fraction", format_double(cfg.train.validation_fraction));
    kv("train_patience", std::to_string(cfg.train.patience));
    kv("train_max_epochs", std::to_string(cfg.train.max_epochs));
    kv("train_batch_size", std::to_string(cfg.train.batch_size));
    kv("train_learning_rate", format_double(cfg.train.learning_rate));
    kv("frame_payload", std::to_string(cfg.frame.payload));
    kv("frame_guard", std::to_string(cfg.frame.guard));
    kv("cnn_conv1_kernels", std::to_string(cfg.cnn.conv1_kernels));
    kv("cnn_conv1_width", std::to_string(cfg.cnn.conv1_width));
    kv("cnn_conv2_kernels", std::to_string(cfg.cnn.conv2_kernels));
    kv("cnn_conv2_width", std::to_string(cfg.cnn.conv2_width));
    kv("rnn_lstm1_cells", std::to_string(cfg.rnn.lstm1_cells));
    kv("rnn_lstm2_cells", std::to_string(cfg.rnn.lstm2_cells));
    kv("rnn_dense_hidden", std::to_string(cfg.rnn.dense_hidden));
    kv("mixed_snr_training", cfg.mixed_snr_training ? "true" : "false");
    kv("jobs", std::to_string(cfg.jobs));
    return out;
}

}  // namespace eqlab::harness
