// LSTM cell, sequence unrolling with backpropagation through time, and the
// bidirectional composition.
//
// Gate equations, with sigma the logistic sigmoid and o the elementwise
// product:
//   i_t = sigma(U_i x_t + V_i h_{t-1} + b_i)
//   o_t = sigma(U_o x_t + V_o h_{t-1} + b_o)
//   f_t = sigma(U_f x_t + V_f h_{t-1} + b_f)
//   c_t = i_t o tanh(U_c x_t + V_c h_{t-1} + b_c) + f_t o c_{t-1}
//   h_t = o_t o tanh(c_t)
// One (U, V, b) triple per gate plus the candidate, kept as separate tensors.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eqlab/tensor.hpp"

namespace eqlab::nn {

struct LstmCellParams {
    // Input weights [H x D], recurrent weights [H x H], biases [H].
    Tensor U_i, U_o, U_f, U_c;
    Tensor V_i, V_o, V_f, V_c;
    Tensor b_i, b_o, b_f, b_c;

    LstmCellParams() = default;
    LstmCellParams(std::size_t hidden, std::size_t input)
        : U_i({hidden, input}), U_o({hidden, input}), U_f({hidden, input}), U_c({hidden, input}),
          V_i({hidden, hidden}), V_o({hidden, hidden}), V_f({hidden, hidden}),
          V_c({hidden, hidden}), b_i({hidden}), b_o({hidden}), b_f({hidden}), b_c({hidden}) {}

    std::size_t hidden() const { return b_i.dim(0); }
    std::size_t input() const { return U_i.dim(1); }
};

namespace detail {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// gate = act(U x + V h_prev + b), written into out (length H).
inline void gate_preact(const Tensor& U, const Tensor& V, const Tensor& b, const double* x,
                        const double* h_prev, double* out) {
    const std::size_t H = b.dim(0), D = U.dim(1);
    for (std::size_t r = 0; r < H; ++r) {
        double acc = b[r];
        const double* urow = U.data() + r * D;
        for (std::size_t j = 0; j < D; ++j) acc += urow[j] * x[j];
        const double* vrow = V.data() + r * H;
        for (std::size_t j = 0; j < H; ++j) acc += vrow[j] * h_prev[j];
        out[r] = acc;
    }
}

}  // namespace detail

// Activations of one time step, retained for BPTT.
struct LstmStepCache {
    std::vector<double> i, o, f, g;   // post-activation gates; g = tanh candidate
    std::vector<double> c, tanh_c, h; // new cell state, tanh(c), new hidden
};

// Single cell update; x_t length D, h_prev/c_prev length H.
inline void lstm_step_into(const LstmCellParams& p, const double* x_t, const double* h_prev,
                           const double* c_prev, LstmStepCache& cache) {
    const std::size_t H = p.hidden();
    cache.i.resize(H);
    cache.o.resize(H);
    cache.f.resize(H);
    cache.g.resize(H);
    cache.c.resize(H);
    cache.tanh_c.resize(H);
    cache.h.resize(H);
    std::vector<double> pre(H);
    detail::gate_preact(p.U_i, p.V_i, p.b_i, x_t, h_prev, pre.data());
    for (std::size_t r = 0; r < H; ++r) cache.i[r] = detail::sigmoid(pre[r]);
    detail::gate_preact(p.U_o, p.V_o, p.b_o, x_t, h_prev, pre.data());
    for (std::size_t r = 0; r < H; ++r) cache.o[r] = detail::sigmoid(pre[r]);
    detail::gate_preact(p.U_f, p.V_f, p.b_f, x_t, h_prev, pre.data());
    for (std::size_t r = 0; r < H; ++r) cache.f[r] = detail::sigmoid(pre[r]);
    detail::gate_preact(p.U_c, p.V_c, p.b_c, x_t, h_prev, pre.data());
    for (std::size_t r = 0; r < H; ++r) cache.g[r] = std::tanh(pre[r]);
    for (std::size_t r = 0; r < H; ++r) {
        cache.c[r] = cache.i[r] * cache.g[r] + cache.f[r] * c_prev[r];
        cache.tanh_c[r] = std::tanh(cache.c[r]);
        cache.h[r] = cache.o[r] * cache.tanh_c[r];
    }
}

// Spec-level single-step API: returns (h_t, c_t) for tensors of shape [H].
inline std::pair<Tensor, Tensor> lstm_step(const LstmCellParams& p, const Tensor& x_t,
                                           const Tensor& h_prev, const Tensor& c_prev) {
    if (x_t.size() != p.input())
        throw std::invalid_argument("lstm_step: input size " + std::to_string(x_t.size()) +
                                    " != expected " + std::to_string(p.input()));
    if (h_prev.size() != p.hidden() || c_prev.size() != p.hidden())
        throw std::invalid_argument("lstm_step: state size mismatch");
    LstmStepCache cache;
    lstm_step_into(p, x_t.data(), h_prev.data(), c_prev.data(), cache);
    Tensor h({p.hidden()}), c({p.hidden()});
    for (std::size_t r = 0; r < p.hidden(); ++r) {
        h[r] = cache.h[r];
        c[r] = cache.c[r];
    }
    return {std::move(h), std::move(c)};
}

struct LstmSequenceCache {
    std::vector<LstmStepCache> steps;      // index by time
    std::vector<std::vector<double>> xs;   // inputs per step (copied for BPTT)
};

// Unidirectional unroll over xs[t] (each length D), zero initial state.
// hs_out[t] receives h_t (length H).
inline void lstm_forward(const LstmCellParams& p, const std::vector<const double*>& xs,
                         LstmSequenceCache& cache, std::vector<std::vector<double>>& hs_out) {
    const std::size_t T = xs.size(), H = p.hidden(), D = p.input();
    cache.steps.resize(T);
    cache.xs.resize(T);
    hs_out.resize(T);
    std::vector<double> h(H, 0.0), c(H, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        cache.xs[t].assign(xs[t], xs[t] + D);
        lstm_step_into(p, xs[t], h.data(), c.data(), cache.steps[t]);
        h = cache.steps[t].h;
        c = cache.steps[t].c;
        hs_out[t] = h;
    }
}

struct LstmGrads {
    Tensor U_i, U_o, U_f, U_c, V_i, V_o, V_f, V_c, b_i, b_o, b_f, b_c;

    explicit LstmGrads(const LstmCellParams& p)
        : U_i(p.U_i.shape()), U_o(p.U_o.shape()), U_f(p.U_f.shape()), U_c(p.U_c.shape()),
          V_i(p.V_i.shape()), V_o(p.V_o.shape()), V_f(p.V_f.shape()), V_c(p.V_c.shape()),
          b_i(p.b_i.shape()), b_o(p.b_o.shape()), b_f(p.b_f.shape()), b_c(p.b_c.shape()) {}
};

// BPTT over the cached forward pass. dhs[t] is the upstream gradient on h_t;
// parameter gradients accumulate into grads; dxs[t] receives the gradient on
// the step input.
inline void lstm_backward(const LstmCellParams& p, const LstmSequenceCache& cache,
                          const std::vector<std::vector<double>>& dhs, LstmGrads& grads,
                          std::vector<std::vector<double>>& dxs) {
    const std::size_t T = cache.steps.size(), H = p.hidden(), D = p.input();
    dxs.assign(T, std::vector<double>(D, 0.0));
    std::vector<double> dh(H, 0.0), dc(H, 0.0);
    std::vector<double> di(H), dof(H), df(H), dg(H);
    for (std::size_t t = T; t-- > 0;) {
        const LstmStepCache& s = cache.steps[t];
        const double* c_prev = t > 0 ? cache.steps[t - 1].c.data() : nullptr;
        const double* h_prev = t > 0 ? cache.steps[t - 1].h.data() : nullptr;
        for (std::size_t r = 0; r < H; ++r) dh[r] += dhs[t][r];
        for (std::size_t r = 0; r < H; ++r) {
            // h = o * tanh(c)
            const double d_o = dh[r] * s.tanh_c[r];
            dc[r] += dh[r] * s.o[r] * (1.0 - s.tanh_c[r] * s.tanh_c[r]);
            // c = i*g + f*c_prev
            const double d_i = dc[r] * s.g[r];
            const double d_g = dc[r] * s.i[r];
            const double cp = c_prev ? c_prev[r] : 0.0;
            const double d_f = dc[r] * cp;
            // through the activations
            di[r] = d_i * s.i[r] * (1.0 - s.i[r]);
            dof[r] = d_o * s.o[r] * (1.0 - s.o[r]);
            df[r] = d_f * s.f[r] * (1.0 - s.f[r]);
            dg[r] = d_g * (1.0 - s.g[r] * s.g[r]);
            // carry to t-1 through the forget path
            dc[r] *= s.f[r];
        }
        // Parameter and input/recurrent gradients for the four pre-activations.
        const double* x = cache.xs[t].data();
        double* dx = dxs[t].data();
        std::fill(dh.begin(), dh.end(), 0.0);
        const auto accumulate = [&](const std::vector<double>& dpre, const Tensor& U,
                                    const Tensor& V, Tensor& dU, Tensor& dV, Tensor& db) {
            for (std::size_t r = 0; r < H; ++r) {
                const double g = dpre[r];
                db[r] += g;
                double* durow = dU.data() + r * D;
                const double* urow = U.data() + r * D;
                for (std::size_t j = 0; j < D; ++j) {
                    durow[j] += g * x[j];
                    dx[j] += g * urow[j];
                }
                if (h_prev) {
                    double* dvrow = dV.data() + r * H;
                    const double* vrow = V.data() + r * H;
                    for (std::size_t j = 0; j < H; ++j) {
                        dvrow[j] += g * h_prev[j];
                        dh[j] += g * vrow[j];
                    }
                }
            }
        };
        accumulate(di, p.U_i, p.V_i, grads.U_i, grads.V_i, grads.b_i);
        accumulate(dof, p.U_o, p.V_o, grads.U_o, grads.V_o, grads.b_o);
        accumulate(df, p.U_f, p.V_f, grads.U_f, grads.V_f, grads.b_f);
        accumulate(dg, p.U_c, p.V_c, grads.U_c, grads.V_c, grads.b_c);
    }
}

// Bidirectional composition: the forward cell walks t = 0..T-1, the backward
// cell walks the input in reverse, and the per-step outputs are concatenated
// as [h_fwd[t], h_bwd[t]]. Input x is [T x D]; output is [T x 2H]. Both
// directions start from zero state.
struct BilstmCache {
    LstmSequenceCache fwd, bwd;
    std::size_t T = 0;
};

inline Tensor bilstm_forward(const LstmCellParams& fwd, const LstmCellParams& bwd,
                             const Tensor& x, BilstmCache* cache = nullptr) {
    if (x.rank() != 2)
        throw std::invalid_argument("bilstm_forward: expected input [T x D], got " +
                                    Tensor::shape_str(x.shape()));
    if (x.dim(1) != fwd.input() || x.dim(1) != bwd.input())
        throw std::invalid_argument("bilstm_forward: feature size mismatch");
    if (fwd.hidden() != bwd.hidden())
        throw std::invalid_argument("bilstm_forward: directions must share hidden size");
    const std::size_t T = x.dim(0), D = x.dim(1), H = fwd.hidden();

    std::vector<const double*> xs_f(T), xs_b(T);
    for (std::size_t t = 0; t < T; ++t) {
        xs_f[t] = x.data() + t * D;
        xs_b[t] = x.data() + (T - 1 - t) * D;
    }
    BilstmCache local;
    BilstmCache& cc = cache ? *cache : local;
    cc.T = T;
    std::vector<std::vector<double>> hs_f, hs_b;
    lstm_forward(fwd, xs_f, cc.fwd, hs_f);
    lstm_forward(bwd, xs_b, cc.bwd, hs_b);

    Tensor y({T, 2 * H});
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t r = 0; r < H; ++r) {
            y.at(t, r) = hs_f[t][r];
            y.at(t, H + r) = hs_b[T - 1 - t][r];  // un-reverse the backward walk
        }
    }
    return y;
}

struct BilstmGrads {
    LstmGrads fwd, bwd;
    BilstmGrads(const LstmCellParams& f, const LstmCellParams& b) : fwd(f), bwd(b) {}
};

// dy is [T x 2H]; returns dx [T x D].
inline Tensor bilstm_backward(const LstmCellParams& fwd, const LstmCellParams& bwd,
                              const BilstmCache& cache, const Tensor& dy, BilstmGrads& grads) {
    const std::size_t T = cache.T, H = fwd.hidden(), D = fwd.input();
    dy.require_shape({T, 2 * H}, "bilstm_backward");
    std::vector<std::vector<double>> dh_f(T, std::vector<double>(H)),
        dh_b(T, std::vector<double>(H));
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t r = 0; r < H; ++r) {
            dh_f[t][r] = dy.at(t, r);
            dh_b[T - 1 - t][r] = dy.at(t, H + r);
        }
    std::vector<std::vector<double>> dx_f, dx_b;
    lstm_backward(fwd, cache.fwd, dh_f, grads.fwd, dx_f);
    lstm_backward(bwd, cache.bwd, dh_b, grads.bwd, dx_b);
    Tensor dx({T, D});
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t j = 0; j < D; ++j)
            dx.at(t, j) = dx_f[t][j] + dx_b[T - 1 - t][j];
    return dx;
}

}  // namespace eqlab::nn
