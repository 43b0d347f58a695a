#ifndef MAPPRED_TRAIN_HPP
#define MAPPRED_TRAIN_HPP

#include "mappred/cnp.hpp"
#include "mappred/dataset.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace mappred {

struct TrainConfig {
    int iterations = 20000;
    int batch_size = 4;
    double learning_rate = 1e-4;
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    // Per-example subsampling caps for one gradient step (0 = use all points).
    // Keeps a CPU training iteration tractable; evaluation always uses full sets.
    int context_cap = 256;
    int target_cap = 128;

    void validate() const {
        if (iterations < 1 || batch_size < 1 || learning_rate <= 0.0)
            throw ConfigError("TrainConfig: iterations >= 1, batch_size >= 1, lr > 0 required");
    }
};

namespace detail {

template <typename S> struct AdamState {
    Mlp<S> m, v;
    long step = 0;

    static AdamState like(const Mlp<S> &net) {
        AdamState st;
        st.m = net;
        st.v = net;
        for (auto &l : st.m.layers) {
            l.W.setZero();
            l.b.setZero();
        }
        st.v = st.m;
        return st;
    }

    void update(Mlp<S> &net, const Mlp<S> &grad, const TrainConfig &cfg) {
        ++step;
        const S b1 = static_cast<S>(cfg.beta1), b2 = static_cast<S>(cfg.beta2);
        const S corr1 = static_cast<S>(1.0 - std::pow(cfg.beta1, step));
        const S corr2 = static_cast<S>(1.0 - std::pow(cfg.beta2, step));
        const S lr = static_cast<S>(cfg.learning_rate);
        const S eps = static_cast<S>(cfg.epsilon);
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            auto upd = [&](auto &p, auto &mm, auto &vv, const auto &g) {
                mm = b1 * mm + (S(1) - b1) * g;
                vv = (b2 * vv.array() + (S(1) - b2) * g.array().square()).matrix();
                p.array() -=
                    lr * (mm.array() / corr1) / ((vv.array() / corr2).sqrt() + eps);
            };
            upd(net.layers[l].W, m.layers[l].W, v.layers[l].W, grad.layers[l].W);
            upd(net.layers[l].b, m.layers[l].b, v.layers[l].b, grad.layers[l].b);
        }
    }
};

inline std::vector<std::size_t> subsample_indices(std::size_t n, int cap, std::mt19937_64 &rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (cap > 0 && n > static_cast<std::size_t>(cap)) {
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(static_cast<std::size_t>(cap));
        std::sort(idx.begin(), idx.end());
    }
    return idx;
}

} // namespace detail

/// Adam training on mean batch NLL; returns one loss entry per iteration.
/// Aborts on a non-finite loss or gradient.
template <typename S>
std::vector<double> cnp_train(CnpModelT<S> &model, const std::vector<TrainingExample> &dataset,
                              const TrainConfig &cfg) {
    cfg.validate();
    if (dataset.empty())
        throw ConfigError("cnp_train: dataset is empty");
    model.check();

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> pick(0, dataset.size() - 1);
    auto adam_enc = detail::AdamState<S>::like(model.encoder);
    auto adam_dec = detail::AdamState<S>::like(model.decoder);
    Mlp<S> zero_enc = model.encoder, zero_dec = model.decoder;
    for (auto &l : zero_enc.layers) {
        l.W.setZero();
        l.b.setZero();
    }
    for (auto &l : zero_dec.layers) {
        l.W.setZero();
        l.b.setZero();
    }

    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(cfg.iterations));
    Mlp<S> grad_enc = zero_enc, grad_dec = zero_dec;
    std::vector<Vec2> ctx_xy, tgt_xy;
    std::vector<float> ctx_occ, tgt_y;
    for (int it = 0; it < cfg.iterations; ++it) {
        grad_enc = zero_enc;
        grad_dec = zero_dec;
        double batch_loss = 0.0;
        for (int b = 0; b < cfg.batch_size; ++b) {
            const TrainingExample &ex = dataset[pick(rng)];
            auto ci = detail::subsample_indices(ex.context_xy.size(), cfg.context_cap, rng);
            auto ti = detail::subsample_indices(ex.target_xy.size(), cfg.target_cap, rng);
            ctx_xy.clear();
            ctx_occ.clear();
            tgt_xy.clear();
            tgt_y.clear();
            for (std::size_t i : ci) {
                ctx_xy.push_back(ex.context_xy[i]);
                ctx_occ.push_back(ex.context_occ[i]);
            }
            for (std::size_t i : ti) {
                tgt_xy.push_back(ex.target_xy[i]);
                tgt_y.push_back(ex.target_y[i]);
            }
            batch_loss += cnp_loss_grad(model, ctx_xy, ctx_occ, tgt_xy, tgt_y, grad_enc,
                                        grad_dec, 1.0 / cfg.batch_size);
        }
        batch_loss /= cfg.batch_size;
        if (!std::isfinite(batch_loss))
            throw ModelError("cnp_train: non-finite loss at iteration " + std::to_string(it));
        adam_enc.update(model.encoder, grad_enc, cfg);
        adam_dec.update(model.decoder, grad_dec, cfg);
        history.push_back(batch_loss);
    }
    return history;
}

/// Mean NLL of the model over a set of examples, full context and targets.
template <typename S>
double cnp_evaluate(const CnpModelT<S> &model, const std::vector<TrainingExample> &examples) {
    double total = 0.0;
    std::size_t count = 0;
    for (const TrainingExample &ex : examples) {
        if (ex.target_xy.empty())
            continue;
        auto phi = cnp_predict(model, ex.context_xy, ex.context_occ, ex.target_xy);
        total += nll_loss(phi, ex.target_y) * static_cast<double>(ex.target_xy.size());
        count += ex.target_xy.size();
    }
    if (count == 0)
        throw ModelError("cnp_evaluate: no targets");
    return total / static_cast<double>(count);
}

} // namespace mappred

#endif
