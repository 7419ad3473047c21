// Recurrent per-frame equalizer: two bidirectional LSTM layers walk the
// window as a time series (window symbols x 2 features), followed by a ReLU
// dense hidden layer and a linear dense output producing the payload
// coordinates. Forward and reverse directions are separate cells whose
// per-step outputs are concatenated.
#pragma once

#include <string>
#include <vector>

#include "eqlab/equalizers/framing.hpp"
#include "eqlab/nn/layers.hpp"
#include "eqlab/nn/lstm.hpp"
#include "eqlab/nn/params.hpp"
#include "eqlab/rng.hpp"
#include "eqlab/tensor.hpp"

namespace eqlab {

struct RnnEqualizerArch {
    std::size_t lstm1_cells = 32;  // per direction
    std::size_t lstm2_cells = 32;  // per direction
    std::size_t dense_hidden = 32;
    FrameSpec frame{};

    std::string descriptor() const {
        return "rnn/v1 in=" + std::to_string(frame.window) + "x" + std::to_string(frame.channels) +
               " lstm1=" + std::to_string(lstm1_cells) + " lstm2=" + std::to_string(lstm2_cells) +
               " dense=" + std::to_string(dense_hidden) +
               " out=" + std::to_string(2 * frame.payload);
    }
};

class RnnEqualizer {
  public:
    using Arch = RnnEqualizerArch;

    struct Cache {
        Tensor seq;               // [T x 2] input as a time series
        nn::BilstmCache b1, b2;
        Tensor y1, y2;            // bilstm outputs [T x 2H]
        Tensor flat;              // flattened y2
        Tensor a_hidden, r_hidden;
    };

    explicit RnnEqualizer(const RnnEqualizerArch& arch)
        : arch_(arch),
          l1_fwd_(arch.lstm1_cells, arch.frame.channels),
          l1_bwd_(arch.lstm1_cells, arch.frame.channels),
          l2_fwd_(arch.lstm2_cells, 2 * arch.lstm1_cells),
          l2_bwd_(arch.lstm2_cells, 2 * arch.lstm1_cells),
          hidden_(arch.dense_hidden, arch.frame.window * 2 * arch.lstm2_cells),
          out_(2 * arch.frame.payload, arch.dense_hidden) {
        arch.frame.validate();
    }

    const RnnEqualizerArch& arch() const { return arch_; }
    std::string descriptor() const { return arch_.descriptor(); }

    void init_weights(SeededRng& rng) {
        const auto init_cell = [&](nn::LstmCellParams& p) {
            const std::size_t H = p.hidden();
            nn::init_lstm_uniform(p.U_i, H, rng);
            nn::init_lstm_uniform(p.U_o, H, rng);
            nn::init_lstm_uniform(p.U_f, H, rng);
            nn::init_lstm_uniform(p.U_c, H, rng);
            nn::init_lstm_uniform(p.V_i, H, rng);
            nn::init_lstm_uniform(p.V_o, H, rng);
            nn::init_lstm_uniform(p.V_f, H, rng);
            nn::init_lstm_uniform(p.V_c, H, rng);
            p.b_i.fill(0.0);
            p.b_o.fill(0.0);
            p.b_f.fill(1.0);  // open the forget gate at the start of training
            p.b_c.fill(0.0);
        };
        init_cell(l1_fwd_);
        init_cell(l1_bwd_);
        init_cell(l2_fwd_);
        init_cell(l2_bwd_);
        nn::init_glorot_uniform(hidden_.weights, hidden_.in_features(), hidden_.out_features(),
                                rng);
        hidden_.bias.fill(0.0);
        nn::init_glorot_uniform(out_.weights, out_.in_features(), out_.out_features(), rng);
        out_.bias.fill(0.0);
    }

    nn::ParamRefs params() {
        nn::ParamRefs refs;
        const auto add_cell = [&](const std::string& prefix, nn::LstmCellParams& p) {
            refs.push_back({prefix + ".U_i", &p.U_i});
            refs.push_back({prefix + ".U_o", &p.U_o});
            refs.push_back({prefix + ".U_f", &p.U_f});
            refs.push_back({prefix + ".U_c", &p.U_c});
            refs.push_back({prefix + ".V_i", &p.V_i});
            refs.push_back({prefix + ".V_o", &p.V_o});
            refs.push_back({prefix + ".V_f", &p.V_f});
            refs.push_back({prefix + ".V_c", &p.V_c});
            refs.push_back({prefix + ".b_i", &p.b_i});
            refs.push_back({prefix + ".b_o", &p.b_o});
            refs.push_back({prefix + ".b_f", &p.b_f});
            refs.push_back({prefix + ".b_c", &p.b_c});
        };
        add_cell("lstm1.fwd", l1_fwd_);
        add_cell("lstm1.bwd", l1_bwd_);
        add_cell("lstm2.fwd", l2_fwd_);
        add_cell("lstm2.bwd", l2_bwd_);
        refs.push_back({"hidden.weights", &hidden_.weights});
        refs.push_back({"hidden.bias", &hidden_.bias});
        refs.push_back({"out.weights", &out_.weights});
        refs.push_back({"out.bias", &out_.bias});
        return refs;
    }

    // window [2 x W] -> payload coordinates [2*payload]. The window rows are
    // (I, Q) channels; the recurrent layers walk it as W steps of 2 features.
    Tensor forward(const Tensor& window, Cache* cache = nullptr) const {
        Cache local;
        Cache& c = cache ? *cache : local;
        const std::size_t T = arch_.frame.window;
        window.require_shape({2, T}, "RnnEqualizer::forward");
        c.seq = Tensor({T, 2});
        for (std::size_t t = 0; t < T; ++t) {
            c.seq.at(t, 0) = window.at(0, t);
            c.seq.at(t, 1) = window.at(1, t);
        }
        c.y1 = nn::bilstm_forward(l1_fwd_, l1_bwd_, c.seq, &c.b1);
        c.y2 = nn::bilstm_forward(l2_fwd_, l2_bwd_, c.y1, &c.b2);
        c.flat = Tensor({c.y2.size()});
        for (std::size_t i = 0; i < c.y2.size(); ++i) c.flat[i] = c.y2[i];
        c.a_hidden = nn::dense_forward(hidden_, c.flat);
        c.r_hidden = nn::relu(c.a_hidden);
        return nn::dense_forward(out_, c.r_hidden);
    }

    void backward(const Cache& cache, const Tensor& dout, std::vector<Tensor>& grads) const {
        const std::size_t T = arch_.frame.window;
        // grads layout follows params(): 4 cells x 12 tensors, then dense pairs.
        Tensor dr_hidden = nn::dense_backward(out_, cache.r_hidden, dout, grads[50], grads[51]);
        Tensor da_hidden = nn::relu_backward(cache.a_hidden, dr_hidden);
        Tensor dflat = nn::dense_backward(hidden_, cache.flat, da_hidden, grads[48], grads[49]);
        Tensor dy2({T, 2 * arch_.lstm2_cells});
        for (std::size_t i = 0; i < dy2.size(); ++i) dy2[i] = dflat[i];

        nn::BilstmGrads bg2(l2_fwd_, l2_bwd_);
        Tensor dy1 = nn::bilstm_backward(l2_fwd_, l2_bwd_, cache.b2, dy2, bg2);
        nn::BilstmGrads bg1(l1_fwd_, l1_bwd_);
        nn::bilstm_backward(l1_fwd_, l1_bwd_, cache.b1, dy1, bg1);

        const auto add_cell_grads = [&](const nn::LstmGrads& g, std::size_t base) {
            const Tensor* src[12] = {&g.U_i, &g.U_o, &g.U_f, &g.U_c, &g.V_i, &g.V_o,
                                     &g.V_f, &g.V_c, &g.b_i, &g.b_o, &g.b_f, &g.b_c};
            for (std::size_t k = 0; k < 12; ++k) {
                Tensor& dst = grads[base + k];
                for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += (*src[k])[i];
            }
        };
        add_cell_grads(bg1.fwd, 0);
        add_cell_grads(bg1.bwd, 12);
        add_cell_grads(bg2.fwd, 24);
        add_cell_grads(bg2.bwd, 36);
    }

  private:
    RnnEqualizerArch arch_;
    nn::LstmCellParams l1_fwd_, l1_bwd_, l2_fwd_, l2_bwd_;
    nn::DenseLayer hidden_, out_;
};

}  // namespace eqlab
