// Named, ordered view over a model's parameter tensors. The order is fixed
// by the model and shared by the optimizer state, the gradient buffers and
// the weight files.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqlab/rng.hpp"
#include "eqlab/tensor.hpp"

namespace eqlab::nn {

struct ParamRef {
    std::string name;
    Tensor* tensor;
};

using ParamRefs = std::vector<ParamRef>;

inline std::vector<Tensor> make_grad_buffers(const ParamRefs& refs) {
    std::vector<Tensor> grads;
    grads.reserve(refs.size());
    for (const auto& r : refs) grads.emplace_back(r.tensor->shape());
    return grads;
}

inline void zero_grads(std::vector<Tensor>& grads) {
    for (auto& g : grads) g.fill(0.0);
}

inline std::size_t total_parameters(const ParamRefs& refs) {
    std::size_t n = 0;
    for (const auto& r : refs) n += r.tensor->size();
    return n;
}

// Uniform init in +-sqrt(6 / (fan_in + fan_out)).
inline void init_glorot_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out,
                                SeededRng& rng) {
    const double lim = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-lim, lim);
}

// Uniform init in +-1/sqrt(hidden), used for the LSTM weight matrices.
inline void init_lstm_uniform(Tensor& t, std::size_t hidden, SeededRng& rng) {
    const double lim = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-lim, lim);
}

}  // namespace eqlab::nn
