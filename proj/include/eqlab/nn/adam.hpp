// Adam with bias correction, standard defaults.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "eqlab/nn/params.hpp"
#include "eqlab/tensor.hpp"

namespace eqlab::nn {

struct AdamState {
    double alpha = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t t = 0;
    std::vector<Tensor> m, v;  // first/second moments, one per parameter tensor

    AdamState() = default;

    explicit AdamState(const ParamRefs& refs, double alpha_ = 1e-3) : alpha(alpha_) {
        m.reserve(refs.size());
        v.reserve(refs.size());
        for (const auto& r : refs) {
            m.emplace_back(r.tensor->shape());
            v.emplace_back(r.tensor->shape());
        }
    }
};

inline void adam_step(AdamState& state, const ParamRefs& params,
                      const std::vector<Tensor>& grads) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: parameter/gradient/state count mismatch");
    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t p = 0; p < params.size(); ++p) {
        Tensor& theta = *params[p].tensor;
        const Tensor& g = grads[p];
        if (!theta.same_shape(g))
            throw std::invalid_argument("adam_step: gradient shape mismatch for " +
                                        params[p].name);
        Tensor& m = state.m[p];
        Tensor& v = state.v[p];
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            theta[i] -= state.alpha * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

}  // namespace eqlab::nn
