// Pilot-aided complex LMS equalizer, the linear baseline.
//
// The filter output z[k] = sum_j w[j] * y[k + D - j] estimates the symbol
// transmitted at index k, where D is the reference delay: the filter looks D
// samples ahead of the symbol it reconstructs, so its output is already
// aligned with transmitted indices. Training minimizes |d[k] - z[k]|^2 by
// stochastic gradient steps w <- w + mu * e * conj(u), with d the known
// pilot symbols. Training is pilot-aided only; there is no decision-directed
// phase.
//
// Defaults (11 taps, mu = 0.01, delay 5, 2000 pilots) cover the short
// minimum-phase default channel: its inverse decays like 0.58^k, so a
// centered 11-tap filter approximates it to well below the noise floor, and
// mu sits inside the stability region for unit-power input.
#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqlab/types.hpp"

namespace eqlab {

struct LmsConfig {
    std::size_t num_taps = 11;
    double step_size = 0.01;
    std::size_t reference_delay = 5;
    std::size_t training_len = 2000;

    void validate() const {
        if (num_taps < 1)
            throw std::invalid_argument("LmsConfig: num_taps must be >= 1");
        if (!(step_size > 0.0) || !(step_size < 1.0))
            throw std::invalid_argument("LmsConfig: step_size must be in (0, 1)");
        // The meaningful bound is reference_delay < num_taps + channel
        // length; the channel is not visible here, so the harness checks it
        // when wiring the pieces together.
    }
};

struct LmsFilter {
    std::vector<Complex> weights;
    std::size_t reference_delay = 0;
};

struct LmsTrainResult {
    LmsFilter filter;
    std::vector<double> error_power;  // |e[k]|^2 per training step
};

// Trains on len(pilots) steps; pilots[k] is the known transmitted symbol at
// index k. Initial weights default to zero. Divergence (instantaneous error
// power above 1e6 or non-finite) raises instead of returning garbage.
inline LmsTrainResult lms_train(const IqSeq& received, const IqSeq& pilots, const LmsConfig& cfg,
                                std::optional<LmsFilter> initial = std::nullopt) {
    cfg.validate();
    if (pilots.empty())
        throw std::invalid_argument("lms_train: pilots must not be empty");
    if (received.size() < pilots.size() + cfg.num_taps)
        throw std::invalid_argument("lms_train: need len(received) >= len(pilots) + num_taps");

    LmsFilter filt;
    if (initial) {
        filt = *initial;
        if (filt.weights.size() != cfg.num_taps)
            throw std::invalid_argument("lms_train: initial weights length mismatch");
    } else {
        filt.weights.assign(cfg.num_taps, Complex(0.0, 0.0));
        filt.reference_delay = cfg.reference_delay;
    }

    const std::size_t T = cfg.num_taps;
    const std::size_t D = filt.reference_delay;
    const auto sample = [&](std::ptrdiff_t idx) -> Complex {
        if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(received.size())) return {0.0, 0.0};
        return received[static_cast<std::size_t>(idx)];
    };

    LmsTrainResult res;
    res.error_power.reserve(pilots.size());
    for (std::size_t k = 0; k < pilots.size(); ++k) {
        Complex z(0.0, 0.0);
        const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(k + D);
        for (std::size_t j = 0; j < T; ++j)
            z += filt.weights[j] * sample(base - static_cast<std::ptrdiff_t>(j));
        const Complex e = pilots[k] - z;
        const double ep = std::norm(e);
        if (!std::isfinite(ep) || ep > 1e6)
            throw std::runtime_error("lms_train: filter diverged at step " + std::to_string(k) +
                                     " (error power " + std::to_string(ep) + ")");
        res.error_power.push_back(ep);
        for (std::size_t j = 0; j < T; ++j)
            filt.weights[j] +=
                cfg.step_size * e * std::conj(sample(base - static_cast<std::ptrdiff_t>(j)));
    }
    res.filter = std::move(filt);
    return res;
}

// Applies the filter to a full received sequence; output index i estimates
// the transmitted symbol at i (time-advanced by reference_delay), same
// length as the input, zero-fill outside the observed window.
inline SoftSymbolSeq lms_apply(const LmsFilter& filter, const IqSeq& received) {
    const std::size_t T = filter.weights.size();
    SoftSymbolSeq out(received.size());
    const auto sample = [&](std::ptrdiff_t idx) -> Complex {
        if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(received.size())) return {0.0, 0.0};
        return received[static_cast<std::size_t>(idx)];
    };
    for (std::size_t i = 0; i < received.size(); ++i) {
        Complex z(0.0, 0.0);
        const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(i + filter.reference_delay);
        for (std::size_t j = 0; j < T; ++j)
            z += filter.weights[j] * sample(base - static_cast<std::ptrdiff_t>(j));
        out[i] = z;
    }
    return out;
}

}  // namespace eqlab
