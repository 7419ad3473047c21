// Window framing for the per-frame equalizers.
//
// A frame equalizes `payload` consecutive symbols at a time; `guard` extra
// symbols on each side give the model boundary context, so each input window
// spans payload + 2*guard symbols with two channels (in-phase, quadrature).
// Windows step by `stride` = payload, so payloads partition the sequence:
// window k covers absolute symbol indices [k*stride - guard,
// k*stride + payload + guard) and positions outside [0, len) are zero-filled.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqlab/tensor.hpp"
#include "eqlab/types.hpp"

namespace eqlab {

struct FrameSpec {
    std::size_t payload = 6;
    std::size_t guard = 3;
    std::size_t window = 12;
    std::size_t channels = 2;
    std::size_t stride = 6;

    void validate() const {
        if (payload == 0)
            throw std::invalid_argument("FrameSpec: payload must be positive");
        if (window != payload + 2 * guard)
            throw std::invalid_argument("FrameSpec: window must equal payload + 2*guard");
        if (stride != payload)
            throw std::invalid_argument("FrameSpec: stride must equal payload");
        if (channels != 2)
            throw std::invalid_argument("FrameSpec: exactly two channels (I, Q) supported");
    }
};

struct Frame {
    Tensor window;               // [2 x window] : row 0 = I, row 1 = Q
    std::size_t payload_begin;   // absolute index of the first payload symbol
    std::size_t payload_count;   // payload symbols that fall inside [0, len)
};

inline std::size_t frame_count(std::size_t sequence_len, const FrameSpec& spec) {
    return (sequence_len + spec.payload - 1) / spec.payload;  // ceil
}

inline std::vector<Frame> frame_stream(const IqSeq& received, const FrameSpec& spec) {
    spec.validate();
    const std::size_t len = received.size();
    const std::size_t n = frame_count(len, spec);
    std::vector<Frame> frames;
    frames.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        Frame f;
        f.window = Tensor({spec.channels, spec.window});
        const std::ptrdiff_t start =
            static_cast<std::ptrdiff_t>(k * spec.stride) - static_cast<std::ptrdiff_t>(spec.guard);
        for (std::size_t w = 0; w < spec.window; ++w) {
            const std::ptrdiff_t idx = start + static_cast<std::ptrdiff_t>(w);
            if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(len)) {
                f.window.at(0, w) = received[static_cast<std::size_t>(idx)].real();
                f.window.at(1, w) = received[static_cast<std::size_t>(idx)].imag();
            }
        }
        f.payload_begin = k * spec.stride;
        f.payload_count =
            f.payload_begin < len ? std::min(spec.payload, len - f.payload_begin) : 0;
        frames.push_back(std::move(f));
    }
    return frames;
}

struct TrainingPair {
    Tensor input;   // [2 x window]
    Tensor target;  // [2 * payload], interleaved (I0, Q0, I1, Q1, ...)
};

// Target for window k is the true transmitted payload, interleaved re/im;
// payload positions beyond the end of the sequence are zero-filled (they are
// dropped again when stitching).
inline std::vector<TrainingPair> make_training_pairs(const IqSeq& received,
                                                     const IqSeq& transmitted,
                                                     const FrameSpec& spec) {
    if (received.size() != transmitted.size())
        throw std::invalid_argument("make_training_pairs: received/transmitted length mismatch (" +
                                    std::to_string(received.size()) + " vs " +
                                    std::to_string(transmitted.size()) + ")");
    const auto frames = frame_stream(received, spec);
    std::vector<TrainingPair> pairs;
    pairs.reserve(frames.size());
    for (const auto& f : frames) {
        TrainingPair p;
        p.input = f.window;
        p.target = Tensor({2 * spec.payload});
        for (std::size_t i = 0; i < f.payload_count; ++i) {
            const Complex& s = transmitted[f.payload_begin + i];
            p.target[2 * i] = s.real();
            p.target[2 * i + 1] = s.imag();
        }
        pairs.push_back(std::move(p));
    }
    return pairs;
}

}  // namespace eqlab
