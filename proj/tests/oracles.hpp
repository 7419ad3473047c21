// Independent oracles used by the unit and acceptance suites. Each one is a
// direct, naive transcription of the definition it checks, kept free of the
// library's optimized implementations.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "eqlab/coding.hpp"
#include "eqlab/modem.hpp"
#include "eqlab/types.hpp"

namespace oracles {

using eqlab::Bit;
using eqlab::BitSeq;
using eqlab::Complex;
using eqlab::IqSeq;

// Hand-traced shift register for the (2,1,2) code with generators [3,7]
// under the MSB-=-current-input convention: out3 = u[n-1]^u[n-2],
// out7 = u[n]^u[n-1]^u[n-2]. Appends the two zero tail bits itself.
inline BitSeq encode_2_1_2_g37(const BitSeq& info) {
    BitSeq out;
    Bit u1 = 0, u2 = 0;  // u[n-1], u[n-2]
    const std::size_t steps = info.size() + 2;
    for (std::size_t n = 0; n < steps; ++n) {
        const Bit u = n < info.size() ? static_cast<Bit>(info[n] & 1) : Bit{0};
        out.push_back(static_cast<Bit>(u1 ^ u2));      // generator 3
        out.push_back(static_cast<Bit>(u ^ u1 ^ u2));  // generator 7
        u2 = u1;
        u1 = u;
    }
    return out;
}

// Exhaustive maximum-likelihood decoding: tries every info word of the given
// length, re-modulates its codeword and picks the minimum squared Euclidean
// distance. Feasible for info_len <= ~16.
inline BitSeq ml_decode_exhaustive(const IqSeq& soft, const eqlab::ConvCodeSpec& spec,
                                   const eqlab::ConstellationMap& map, std::size_t info_len) {
    if (info_len > 20) throw std::invalid_argument("ml oracle: info too long");
    BitSeq best;
    double best_d = 0.0;
    for (std::uint64_t word = 0; word < (std::uint64_t{1} << info_len); ++word) {
        BitSeq info(info_len);
        for (std::size_t i = 0; i < info_len; ++i) info[i] = static_cast<Bit>(word >> i & 1u);
        const IqSeq cand = eqlab::qpsk_modulate(eqlab::conv_encode(info, spec), map);
        if (cand.size() != soft.size())
            throw std::invalid_argument("ml oracle: length mismatch");
        double d = 0.0;
        for (std::size_t i = 0; i < cand.size(); ++i) d += std::norm(soft[i] - cand[i]);
        if (word == 0 || d < best_d) {
            best_d = d;
            best = info;
        }
    }
    return best;
}

// Naive double-loop FIR convolution with zero prehistory.
inline IqSeq naive_fir(const IqSeq& x, const std::vector<double>& taps) {
    IqSeq y(x.size(), Complex(0, 0));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < taps.size(); ++j)
            if (i >= j) y[i] += x[i - j] * taps[j];
    return y;
}

// Naive same-padded cross-correlation, kernels [O x C x K], input [C x T].
inline std::vector<double> naive_conv1d(const std::vector<double>& x, std::size_t C, std::size_t T,
                                        const std::vector<double>& kernels,
                                        const std::vector<double>& bias, std::size_t O,
                                        std::size_t K) {
    std::vector<double> y(O * T, 0.0);
    const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(K / 2);
    for (std::size_t o = 0; o < O; ++o)
        for (std::size_t t = 0; t < T; ++t) {
            double acc = bias[o];
            for (std::size_t c = 0; c < C; ++c)
                for (std::size_t k = 0; k < K; ++k) {
                    const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + k) - pad;
                    if (src >= 0 && src < static_cast<std::ptrdiff_t>(T))
                        acc += x[c * T + static_cast<std::size_t>(src)] *
                               kernels[(o * C + c) * K + k];
                }
            y[o * T + t] = acc;
        }
    return y;
}

// Scalar-by-scalar transcription of one LSTM step, independent of the
// library's vectorized layout.
struct ScalarLstmOut {
    std::vector<double> h, c;
};

inline ScalarLstmOut scalar_lstm_step(std::size_t H, std::size_t D,
                                      const std::vector<double>& Ui, const std::vector<double>& Uo,
                                      const std::vector<double>& Uf, const std::vector<double>& Uc,
                                      const std::vector<double>& Vi, const std::vector<double>& Vo,
                                      const std::vector<double>& Vf, const std::vector<double>& Vc,
                                      const std::vector<double>& bi, const std::vector<double>& bo,
                                      const std::vector<double>& bf, const std::vector<double>& bc,
                                      const std::vector<double>& x, const std::vector<double>& h_prev,
                                      const std::vector<double>& c_prev) {
    const auto sigm = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
    ScalarLstmOut out;
    out.h.resize(H);
    out.c.resize(H);
    for (std::size_t r = 0; r < H; ++r) {
        double ai = bi[r], ao = bo[r], af = bf[r], ac = bc[r];
        for (std::size_t j = 0; j < D; ++j) {
            ai += Ui[r * D + j] * x[j];
            ao += Uo[r * D + j] * x[j];
            af += Uf[r * D + j] * x[j];
            ac += Uc[r * D + j] * x[j];
        }
        for (std::size_t j = 0; j < H; ++j) {
            ai += Vi[r * H + j] * h_prev[j];
            ao += Vo[r * H + j] * h_prev[j];
            af += Vf[r * H + j] * h_prev[j];
            ac += Vc[r * H + j] * h_prev[j];
        }
        const double i_t = sigm(ai), o_t = sigm(ao), f_t = sigm(af), g_t = std::tanh(ac);
        out.c[r] = i_t * g_t + f_t * c_prev[r];
        out.h[r] = o_t * std::tanh(out.c[r]);
    }
    return out;
}

// Gaussian tail: Q(x) = P(N(0,1) > x).
inline double qfunc(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Analytic Gray-QPSK bit error rate at Es/N0 (linear): Q(sqrt(Es/N0)).
inline double qpsk_ber(double esn0_linear) { return qfunc(std::sqrt(esn0_linear)); }

}  // namespace oracles
