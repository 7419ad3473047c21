// Mini-batch training with a held-out validation split and early stopping,
// plus full-sequence inference that stitches per-frame outputs back into one
// soft symbol stream.
//
// Split rule: the pair list is shuffled once with the derived "split" stream
// (so edge and interior windows both reach validation), then the trailing
// validation_fraction of it is held out. Batch order is reshuffled each
// epoch from the "order" stream; with a fixed seed the whole trajectory,
// including the per-epoch loss log, is bit-reproducible.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eqlab/equalizers/framing.hpp"
#include "eqlab/nn/adam.hpp"
#include "eqlab/nn/layers.hpp"
#include "eqlab/nn/params.hpp"
#include "eqlab/rng.hpp"
#include "eqlab/tensor.hpp"
#include "eqlab/types.hpp"

namespace eqlab {

struct TrainConfig {
    double validation_fraction = 0.20;
    std::size_t patience = 5;
    std::size_t max_epochs = 100;
    std::size_t batch_size = 128;
    double learning_rate = 1e-3;  // Adam alpha; beta/eps stay at the defaults
    std::uint64_t seed = 1;

    void validate() const {
        if (!(validation_fraction > 0.0) || !(validation_fraction < 1.0))
            throw std::invalid_argument("TrainConfig: validation_fraction must be in (0, 1)");
        if (patience < 1)
            throw std::invalid_argument("TrainConfig: patience must be >= 1");
        if (max_epochs < 1 || batch_size < 1)
            throw std::invalid_argument("TrainConfig: max_epochs and batch_size must be >= 1");
    }
};

struct EpochStats {
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainLog {
    std::vector<EpochStats> epochs;
    std::size_t best_epoch = 0;  // 1-based index of the epoch the weights come from
    double best_val_loss = std::numeric_limits<double>::infinity();
};

namespace detail {

template <typename T>
void seeded_shuffle(std::vector<T>& v, SeededRng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace detail

// Trains `model` in place (weights are initialized here from cfg.seed) and
// returns the per-epoch log. The model keeps the weights of the best
// validation epoch. Model is CnnEqualizer or RnnEqualizer.
template <typename Model>
TrainLog train_equalizer(Model& model, const std::vector<TrainingPair>& dataset,
                         const TrainConfig& cfg) {
    cfg.validate();
    if (dataset.empty())
        throw std::invalid_argument("train_equalizer: dataset must not be empty");
    if (dataset.size() < cfg.batch_size)
        throw std::invalid_argument("train_equalizer: dataset (" + std::to_string(dataset.size()) +
                                    " pairs) smaller than one batch of " +
                                    std::to_string(cfg.batch_size));

    SeededRng base(cfg.seed);
    SeededRng init_rng = base.derive("train/init");
    model.init_weights(init_rng);

    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    SeededRng split_rng = base.derive("train/split");
    detail::seeded_shuffle(order, split_rng);
    const std::size_t val_count = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(cfg.validation_fraction *
                                               static_cast<double>(dataset.size()))));
    const std::size_t train_count = dataset.size() - val_count;
    if (train_count == 0)
        throw std::invalid_argument("train_equalizer: nothing left to train on after the split");
    std::vector<std::size_t> train_idx(order.begin(), order.begin() + train_count);
    const std::vector<std::size_t> val_idx(order.begin() + train_count, order.end());

    auto refs = model.params();
    nn::AdamState adam(refs, cfg.learning_rate);
    std::vector<Tensor> grads = nn::make_grad_buffers(refs);

    // Best-epoch snapshot storage.
    std::vector<Tensor> best_weights;
    const auto snapshot = [&]() {
        best_weights.clear();
        for (const auto& r : refs) best_weights.push_back(*r.tensor);
    };
    const auto restore = [&]() {
        for (std::size_t i = 0; i < refs.size(); ++i) *refs[i].tensor = best_weights[i];
    };

    const auto eval_loss = [&](const std::vector<std::size_t>& idx) {
        double acc = 0.0;
        for (std::size_t i : idx) {
            const Tensor pred = model.forward(dataset[i].input);
            acc += nn::mse_loss(pred, dataset[i].target).first;
        }
        return acc / static_cast<double>(idx.size());
    };

    SeededRng order_rng = base.derive("train/order");
    TrainLog log;
    std::size_t epochs_since_best = 0;
    typename Model::Cache cache;

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        detail::seeded_shuffle(train_idx, order_rng);
        double train_loss_acc = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < train_idx.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, train_idx.size());
            const double scale = 1.0 / static_cast<double>(end - start);
            nn::zero_grads(grads);
            double batch_loss = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                const TrainingPair& pair = dataset[train_idx[k]];
                const Tensor pred = model.forward(pair.input, &cache);
                auto [loss, dpred] = nn::mse_loss(pred, pair.target);
                batch_loss += loss;
                for (std::size_t i = 0; i < dpred.size(); ++i) dpred[i] *= scale;
                model.backward(cache, dpred, grads);
            }
            batch_loss *= scale;
            if (!std::isfinite(batch_loss))
                throw std::runtime_error("train_equalizer: training diverged (non-finite loss) at epoch " +
                                         std::to_string(epoch));
            nn::adam_step(adam, refs, grads);
            train_loss_acc += batch_loss;
            ++batches;
        }

        EpochStats stats;
        stats.train_loss = train_loss_acc / static_cast<double>(batches);
        stats.val_loss = eval_loss(val_idx);
        if (!std::isfinite(stats.val_loss))
            throw std::runtime_error("train_equalizer: validation loss became non-finite");
        log.epochs.push_back(stats);

        if (stats.val_loss < log.best_val_loss) {
            log.best_val_loss = stats.val_loss;
            log.best_epoch = epoch;
            epochs_since_best = 0;
            snapshot();
        } else {
            ++epochs_since_best;
            if (epochs_since_best >= cfg.patience) break;
        }
    }
    restore();
    return log;
}

// Runs the model over every frame and stitches the payload outputs back into
// a sequence of soft symbols, same length and order as the input. Frames are
// independent, so processing order does not matter.
template <typename Model>
SoftSymbolSeq equalize_sequence(const Model& model, const IqSeq& received,
                                const FrameSpec& spec) {
    const auto frames = frame_stream(received, spec);
    SoftSymbolSeq out(received.size());
    for (const auto& f : frames) {
        const Tensor y = model.forward(f.window);
        for (std::size_t i = 0; i < f.payload_count; ++i)
            out[f.payload_begin + i] = Complex(y[2 * i], y[2 * i + 1]);
    }
    return out;
}

}  // namespace eqlab
