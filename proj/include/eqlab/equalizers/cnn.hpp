// Convolutional per-frame equalizer: two same-padded 1-D convolution layers
// with ReLU, then a linear dense layer producing the payload coordinates
// (payload symbols x 2 channels). Input is one frame window [2 x window].
#pragma once

#include <string>
#include <vector>

#include "eqlab/equalizers/framing.hpp"
#include "eqlab/nn/layers.hpp"
#include "eqlab/nn/params.hpp"
#include "eqlab/rng.hpp"
#include "eqlab/tensor.hpp"

namespace eqlab {

struct CnnEqualizerArch {
    std::size_t conv1_kernels = 32;
    std::size_t conv1_width = 3;
    std::size_t conv2_kernels = 16;
    std::size_t conv2_width = 3;
    FrameSpec frame{};

    std::string descriptor() const {
        return "cnn/v1 in=" + std::to_string(frame.channels) + "x" + std::to_string(frame.window) +
               " conv1=" + std::to_string(conv1_kernels) + "x" + std::to_string(conv1_width) +
               " conv2=" + std::to_string(conv2_kernels) + "x" + std::to_string(conv2_width) +
               " out=" + std::to_string(2 * frame.payload);
    }
};

class CnnEqualizer {
  public:
    using Arch = CnnEqualizerArch;

    struct Cache {
        Tensor x, a1, r1, a2, r2, flat;
    };

    explicit CnnEqualizer(const CnnEqualizerArch& arch)
        : arch_(arch),
          conv1_(arch.conv1_kernels, arch.frame.channels, arch.conv1_width),
          conv2_(arch.conv2_kernels, arch.conv1_kernels, arch.conv2_width),
          out_(2 * arch.frame.payload, arch.conv2_kernels * arch.frame.window) {
        arch.frame.validate();
    }

    const CnnEqualizerArch& arch() const { return arch_; }
    std::string descriptor() const { return arch_.descriptor(); }

    void init_weights(SeededRng& rng) {
        const auto fan = [](const nn::Conv1dLayer& l) {
            return std::pair<std::size_t, std::size_t>{l.in_channels() * l.width(),
                                                       l.out_channels() * l.width()};
        };
        auto [f1_in, f1_out] = fan(conv1_);
        nn::init_glorot_uniform(conv1_.kernels, f1_in, f1_out, rng);
        conv1_.bias.fill(0.0);
        auto [f2_in, f2_out] = fan(conv2_);
        nn::init_glorot_uniform(conv2_.kernels, f2_in, f2_out, rng);
        conv2_.bias.fill(0.0);
        nn::init_glorot_uniform(out_.weights, out_.in_features(), out_.out_features(), rng);
        out_.bias.fill(0.0);
    }

    nn::ParamRefs params() {
        return {{"conv1.kernels", &conv1_.kernels}, {"conv1.bias", &conv1_.bias},
                {"conv2.kernels", &conv2_.kernels}, {"conv2.bias", &conv2_.bias},
                {"out.weights", &out_.weights},     {"out.bias", &out_.bias}};
    }

    // window [2 x W] -> payload coordinates [2*payload].
    Tensor forward(const Tensor& window, Cache* cache = nullptr) const {
        Cache local;
        Cache& c = cache ? *cache : local;
        c.x = window;
        c.a1 = nn::conv1d_forward(conv1_, c.x);
        c.r1 = nn::relu(c.a1);
        c.a2 = nn::conv1d_forward(conv2_, c.r1);
        c.r2 = nn::relu(c.a2);
        c.flat = Tensor({c.r2.size()});
        for (std::size_t i = 0; i < c.r2.size(); ++i) c.flat[i] = c.r2[i];
        return nn::dense_forward(out_, c.flat);
    }

    // Accumulates parameter gradients (ordered as params()) for one sample.
    void backward(const Cache& cache, const Tensor& dout, std::vector<Tensor>& grads) const {
        Tensor dflat = nn::dense_backward(out_, cache.flat, dout, grads[4], grads[5]);
        Tensor dr2({arch_.conv2_kernels, arch_.frame.window});
        for (std::size_t i = 0; i < dr2.size(); ++i) dr2[i] = dflat[i];
        Tensor da2 = nn::relu_backward(cache.a2, dr2);
        Tensor dr1 = nn::conv1d_backward(conv2_, cache.r1, da2, grads[2], grads[3]);
        Tensor da1 = nn::relu_backward(cache.a1, dr1);
        nn::conv1d_backward(conv1_, cache.x, da1, grads[0], grads[1]);
    }

  private:
    CnnEqualizerArch arch_;
    nn::Conv1dLayer conv1_, conv2_;
    nn::DenseLayer out_;
};

}  // namespace eqlab
