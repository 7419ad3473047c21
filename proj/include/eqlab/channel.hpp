// Linear ISI channel: FIR convolution with a real tap vector plus complex AWGN.
//
// SNR convention: snr_db is Es/N0 referenced to the channel input, with the
// unit-energy QPSK constellation giving Es = 1. N0 = 10^(-snr_db/10) is the
// total complex noise variance; each real dimension gets N0/2. The default
// tap vector has energy 0.84^2 + 0.47^2 + 0.28^2 = 1.0049, so input- and
// output-referenced SNR differ by under 0.03 dB; all curves here use the
// input reference consistently.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqlab/rng.hpp"
#include "eqlab/types.hpp"

namespace eqlab {

struct ChannelSpec {
    std::vector<double> taps{0.84, 0.47, 0.28};
    double snr_db = 8.0;

    // Total complex noise variance N0 for Es = 1.
    double noise_variance() const { return std::pow(10.0, -snr_db / 10.0); }

    void validate() const {
        if (taps.empty())
            throw std::invalid_argument("ChannelSpec: taps must not be empty");
        for (double t : taps)
            if (!std::isfinite(t))
                throw std::invalid_argument("ChannelSpec: taps must be finite");
        if (!std::isfinite(snr_db))
            throw std::invalid_argument("ChannelSpec: snr_db must be finite");
    }
};

// y[i] = sum_j x[i-j] * taps[j] with zero prehistory (x[i] = 0 for i < 0);
// output has the same length as the input, so frames stay aligned with
// transmitted indices and the trailing convolution tail is dropped.
inline IqSeq apply_fir(const IqSeq& x, const std::vector<double>& taps) {
    if (taps.empty())
        throw std::invalid_argument("apply_fir: taps must not be empty");
    IqSeq y(x.size());
    const std::size_t L = taps.size();
    for (std::size_t i = 0; i < x.size(); ++i) {
        Complex acc(0.0, 0.0);
        const std::size_t jmax = std::min(L - 1, i);
        for (std::size_t j = 0; j <= jmax; ++j)
            acc += x[i - j] * taps[j];
        y[i] = acc;
    }
    return y;
}

// Adds circularly-symmetric complex Gaussian noise of total variance
// 10^(-snr_db/10). One gaussian_pair per sample keeps the stream alignment
// independent of call granularity.
inline IqSeq add_awgn(const IqSeq& x, double snr_db, SeededRng& rng) {
    if (!std::isfinite(snr_db))
        throw std::invalid_argument("add_awgn: snr_db must be finite");
    const double sigma = std::sqrt(std::pow(10.0, -snr_db / 10.0) / 2.0);
    IqSeq y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        auto [a, b] = rng.gaussian_pair();
        y[i] = x[i] + Complex(sigma * a, sigma * b);
    }
    return y;
}

inline IqSeq transmit(const IqSeq& x, const ChannelSpec& spec, SeededRng& rng) {
    spec.validate();
    IqSeq y = apply_fir(x, spec.taps);
    return add_awgn(y, spec.snr_db, rng);
}

}  // namespace eqlab
