// Forward and backward passes for the dense, 1-D convolution, ReLU and MSE
// building blocks. All passes are plain sequential loops in a fixed order,
// so results are bit-reproducible for identical inputs.
//
// "Convolution" is cross-correlation (no kernel flip), the convention used
// throughout neural-network practice; the naive-loop oracles in the tests
// are written against the same definition.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "eqlab/tensor.hpp"

namespace eqlab::nn {

struct DenseLayer {
    Tensor weights;  // [out x in]
    Tensor bias;     // [out]

    DenseLayer() = default;
    DenseLayer(std::size_t out, std::size_t in)
        : weights(Tensor({out, in})), bias(Tensor({out})) {}

    std::size_t in_features() const { return weights.dim(1); }
    std::size_t out_features() const { return weights.dim(0); }
};

// y = W x + b on a flat input vector.
inline Tensor dense_forward(const DenseLayer& layer, const Tensor& x) {
    if (x.size() != layer.in_features())
        throw std::invalid_argument("dense_forward: input size " + std::to_string(x.size()) +
                                    " != in_features " + std::to_string(layer.in_features()));
    const std::size_t out = layer.out_features(), in = layer.in_features();
    Tensor y({out});
    const double* w = layer.weights.data();
    const double* xv = x.data();
    for (std::size_t o = 0; o < out; ++o) {
        double acc = layer.bias[o];
        const double* row = w + o * in;
        for (std::size_t i = 0; i < in; ++i) acc += row[i] * xv[i];
        y[o] = acc;
    }
    return y;
}

// Accumulates dW, db into grads (shapes must match the layer) and returns dx.
inline Tensor dense_backward(const DenseLayer& layer, const Tensor& x, const Tensor& dy,
                             Tensor& dweights, Tensor& dbias) {
    if (dy.size() != layer.out_features() || x.size() != layer.in_features())
        throw std::invalid_argument("dense_backward: gradient/input shape mismatch");
    dweights.require_shape(layer.weights.shape(), "dense_backward");
    dbias.require_shape(layer.bias.shape(), "dense_backward");
    const std::size_t out = layer.out_features(), in = layer.in_features();
    Tensor dx({in});
    for (std::size_t o = 0; o < out; ++o) {
        const double g = dy[o];
        dbias[o] += g;
        const double* row = layer.weights.data() + o * in;
        double* dw = dweights.data() + o * in;
        for (std::size_t i = 0; i < in; ++i) {
            dw[i] += g * x[i];
            dx[i] += g * row[i];
        }
    }
    return dx;
}

struct Conv1dLayer {
    Tensor kernels;  // [out_channels x in_channels x kernel_width]
    Tensor bias;     // [out_channels]

    Conv1dLayer() = default;
    Conv1dLayer(std::size_t out_ch, std::size_t in_ch, std::size_t width)
        : kernels(Tensor({out_ch, in_ch, width})), bias(Tensor({out_ch})) {
        if (width % 2 == 0)
            throw std::invalid_argument("Conv1dLayer: kernel width must be odd for same padding");
    }

    std::size_t out_channels() const { return kernels.dim(0); }
    std::size_t in_channels() const { return kernels.dim(1); }
    std::size_t width() const { return kernels.dim(2); }
};

// Same-padded sliding weighted sum: input [C_in x T] -> output [C_out x T],
// y[o][t] = b[o] + sum_{c,k} x[c][t + k - pad] * w[o][c][k], zero outside.
inline Tensor conv1d_forward(const Conv1dLayer& layer, const Tensor& x) {
    if (x.rank() != 2 || x.dim(0) != layer.in_channels())
        throw std::invalid_argument("conv1d_forward: expected input [" +
                                    std::to_string(layer.in_channels()) + " x T], got " +
                                    Tensor::shape_str(x.shape()));
    const std::size_t C = layer.in_channels(), O = layer.out_channels(), K = layer.width();
    const std::size_t T = x.dim(1);
    const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(K / 2);
    Tensor y({O, T});
    for (std::size_t o = 0; o < O; ++o) {
        for (std::size_t t = 0; t < T; ++t) {
            double acc = layer.bias[o];
            for (std::size_t c = 0; c < C; ++c) {
                const double* xrow = x.data() + c * T;
                const double* krow = layer.kernels.data() + (o * C + c) * K;
                for (std::size_t k = 0; k < K; ++k) {
                    const std::ptrdiff_t src =
                        static_cast<std::ptrdiff_t>(t + k) - pad;
                    if (src >= 0 && src < static_cast<std::ptrdiff_t>(T))
                        acc += xrow[src] * krow[k];
                }
            }
            y.at(o, t) = acc;
        }
    }
    return y;
}

inline Tensor conv1d_backward(const Conv1dLayer& layer, const Tensor& x, const Tensor& dy,
                              Tensor& dkernels, Tensor& dbias) {
    const std::size_t C = layer.in_channels(), O = layer.out_channels(), K = layer.width();
    const std::size_t T = x.dim(1);
    dy.require_shape({O, T}, "conv1d_backward");
    dkernels.require_shape(layer.kernels.shape(), "conv1d_backward");
    dbias.require_shape(layer.bias.shape(), "conv1d_backward");
    const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(K / 2);
    Tensor dx({C, T});
    for (std::size_t o = 0; o < O; ++o) {
        for (std::size_t t = 0; t < T; ++t) {
            const double g = dy.at(o, t);
            dbias[o] += g;
            for (std::size_t c = 0; c < C; ++c) {
                const double* xrow = x.data() + c * T;
                double* dxrow = dx.data() + c * T;
                const double* krow = layer.kernels.data() + (o * C + c) * K;
                double* dkrow = dkernels.data() + (o * C + c) * K;
                for (std::size_t k = 0; k < K; ++k) {
                    const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + k) - pad;
                    if (src >= 0 && src < static_cast<std::ptrdiff_t>(T)) {
                        dkrow[k] += g * xrow[src];
                        dxrow[src] += g * krow[k];
                    }
                }
            }
        }
    }
    return dx;
}

// Elementwise max{0, x}.
inline Tensor relu(const Tensor& x) {
    Tensor y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
    return y;
}

// Gradient masked by the forward *input* (derivative at 0 taken as 0).
inline Tensor relu_backward(const Tensor& x, const Tensor& dy) {
    if (!x.same_shape(dy))
        throw std::invalid_argument("relu_backward: shape mismatch");
    Tensor dx(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
    return dx;
}

// Mean over all elements of the squared difference; gradient w.r.t. pred is
// 2 (pred - target) / N.
inline std::pair<double, Tensor> mse_loss(const Tensor& pred, const Tensor& target) {
    if (!pred.same_shape(target))
        throw std::invalid_argument("mse_loss: shape mismatch " +
                                    Tensor::shape_str(pred.shape()) + " vs " +
                                    Tensor::shape_str(target.shape()));
    const double n = static_cast<double>(pred.size());
    double acc = 0.0;
    Tensor grad(pred.shape());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        acc += d * d;
        grad[i] = 2.0 * d / n;
    }
    return {acc / n, std::move(grad)};
}

}  // namespace eqlab::nn
