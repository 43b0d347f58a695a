#ifndef MAPPRED_CNP_HPP
#define MAPPRED_CNP_HPP

#include "mappred/mlp.hpp"
#include "mappred/query.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <tuple>
#include <vector>

namespace mappred {

/// Conditional neural process for occupancy prediction: per-point encoder,
/// mean aggregation over the context, decoder with sigmoid output.
template <typename S> struct CnpModelT {
    using Mat = typename Mlp<S>::Mat;
    using Vec = typename Mlp<S>::Vec;

    Mlp<S> encoder; // input (x, y, occupancy), output embed_dim
    Mlp<S> decoder; // input (x, y, r), scalar logit -> sigmoid
    int embed_dim = 256;

    static CnpModelT make(std::uint64_t seed, int embed_dim = 256, int hidden = 256,
                          int n_weight_layers = 4) {
        std::mt19937_64 rng(seed);
        CnpModelT m;
        m.embed_dim = embed_dim;
        std::vector<int> enc{3};
        for (int l = 1; l < n_weight_layers; ++l)
            enc.push_back(hidden);
        enc.push_back(embed_dim);
        std::vector<int> dec{2 + embed_dim};
        for (int l = 1; l < n_weight_layers; ++l)
            dec.push_back(hidden);
        dec.push_back(1);
        m.encoder = Mlp<S>::random(enc, rng);
        m.decoder = Mlp<S>::random(dec, rng);
        return m;
    }

    void check() const {
        encoder.check_dims();
        decoder.check_dims();
        if (encoder.output_dim() != embed_dim || decoder.input_dim() != embed_dim + 2 ||
            decoder.output_dim() != 1)
            throw ModelError("CnpModel: encoder/decoder dimensions inconsistent with embed_dim");
    }
};

using CnpModel = CnpModelT<float>;

namespace detail {

/// Canonical multiset view of a context: unique points sorted by (x, y, occ)
/// with integer multiplicities. Makes the mean aggregation bit-identical
/// under permutation and under duplication of the whole multiset.
template <typename S>
std::pair<typename Mlp<S>::Mat, std::vector<double>>
canonical_context(const std::vector<Vec2> &xy, const std::vector<float> &occ) {
    std::vector<std::size_t> order(xy.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(xy[a].x(), xy[a].y(), occ[a]) < std::tie(xy[b].x(), xy[b].y(), occ[b]);
    });
    typename Mlp<S>::Mat pts(3, static_cast<Eigen::Index>(xy.size()));
    std::vector<double> counts;
    Eigen::Index u = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        std::size_t i = order[k];
        if (u > 0 && static_cast<S>(xy[i].x()) == pts(0, u - 1) &&
            static_cast<S>(xy[i].y()) == pts(1, u - 1) &&
            static_cast<S>(occ[i]) == pts(2, u - 1)) {
            counts.back() += 1.0;
            continue;
        }
        pts(0, u) = static_cast<S>(xy[i].x());
        pts(1, u) = static_cast<S>(xy[i].y());
        pts(2, u) = static_cast<S>(occ[i]);
        counts.push_back(1.0);
        ++u;
    }
    pts.conservativeResize(3, u);
    return {pts, counts};
}

template <typename S> typename Mlp<S>::Mat target_matrix(const std::vector<Vec2> &xy) {
    typename Mlp<S>::Mat t(2, static_cast<Eigen::Index>(xy.size()));
    for (std::size_t i = 0; i < xy.size(); ++i) {
        t(0, static_cast<Eigen::Index>(i)) = static_cast<S>(xy[i].x());
        t(1, static_cast<Eigen::Index>(i)) = static_cast<S>(xy[i].y());
    }
    return t;
}

} // namespace detail

/// Occupancy probabilities for each target, in target order. Empty context
/// falls back to a zero scene encoding.
template <typename S>
std::vector<double> cnp_predict(const CnpModelT<S> &model, const std::vector<Vec2> &context_xy,
                                const std::vector<float> &context_occ,
                                const std::vector<Vec2> &target_xy) {
    model.check();
    if (context_xy.size() != context_occ.size())
        throw ModelError("cnp_predict: context size mismatch");
    using Mat = typename Mlp<S>::Mat;
    using Vec = typename Mlp<S>::Vec;

    Vec r = Vec::Zero(model.embed_dim);
    if (!context_xy.empty()) {
        auto [pts, counts] = detail::canonical_context<S>(context_xy, context_occ);
        Mat emb = model.encoder.forward(pts);
        double total = 0.0;
        Vec sum = Vec::Zero(model.embed_dim);
        for (Eigen::Index j = 0; j < emb.cols(); ++j) {
            sum += emb.col(j) * static_cast<S>(counts[static_cast<std::size_t>(j)]);
            total += counts[static_cast<std::size_t>(j)];
        }
        r = sum / static_cast<S>(total);
    }

    Mat din(2 + model.embed_dim, static_cast<Eigen::Index>(target_xy.size()));
    din.topRows(2) = detail::target_matrix<S>(target_xy);
    din.bottomRows(model.embed_dim).colwise() = r;
    Mat logits = model.decoder.forward(din);

    std::vector<double> phi(target_xy.size());
    for (std::size_t k = 0; k < phi.size(); ++k) {
        double z = static_cast<double>(logits(0, static_cast<Eigen::Index>(k)));
        phi[k] = 1.0 / (1.0 + std::exp(-z));
    }
    return phi;
}

template <typename S>
std::vector<double> cnp_predict(const CnpModelT<S> &model, const QuerySet &query) {
    return cnp_predict(model, query.context_xy, query.context_occ, query.target_xy);
}

/// Mean Bernoulli negative log-likelihood; probabilities are clamped to
/// [delta, 1 - delta] before the logs.
inline double nll_loss(const std::vector<double> &phi, const std::vector<float> &y,
                       double delta = 1e-7) {
    if (phi.size() != y.size() || phi.empty())
        throw ModelError("nll_loss: length mismatch or empty input");
    double total = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        double p = std::min(1.0 - delta, std::max(delta, phi[i]));
        total += -(static_cast<double>(y[i]) * std::log(p) +
                   (1.0 - static_cast<double>(y[i])) * std::log1p(-p));
    }
    return total / static_cast<double>(phi.size());
}

/// NLL of one (context, targets, labels) example plus parameter gradients,
/// accumulated into grad_enc / grad_dec (shapes matching the model).
template <typename S>
double cnp_loss_grad(const CnpModelT<S> &model, const std::vector<Vec2> &context_xy,
                     const std::vector<float> &context_occ, const std::vector<Vec2> &target_xy,
                     const std::vector<float> &target_y, Mlp<S> &grad_enc, Mlp<S> &grad_dec,
                     double scale = 1.0) {
    using Mat = typename Mlp<S>::Mat;
    using Vec = typename Mlp<S>::Vec;
    if (target_xy.empty())
        throw ModelError("cnp_loss_grad: empty target set");

    // Forward with caches.
    auto [pts, counts] = detail::canonical_context<S>(context_xy, context_occ);
    double total_weight =
        std::accumulate(counts.begin(), counts.end(), 0.0);
    std::vector<Mat> enc_acts;
    Vec r = Vec::Zero(model.embed_dim);
    Mat emb;
    if (pts.cols() > 0) {
        emb = model.encoder.forward_cached(pts, enc_acts);
        Vec sum = Vec::Zero(model.embed_dim);
        for (Eigen::Index j = 0; j < emb.cols(); ++j)
            sum += emb.col(j) * static_cast<S>(counts[static_cast<std::size_t>(j)]);
        r = sum / static_cast<S>(total_weight);
    }
    const Eigen::Index t = static_cast<Eigen::Index>(target_xy.size());
    Mat din(2 + model.embed_dim, t);
    din.topRows(2) = detail::target_matrix<S>(target_xy);
    din.bottomRows(model.embed_dim).colwise() = r;
    std::vector<Mat> dec_acts;
    Mat logits = model.decoder.forward_cached(din, dec_acts);

    // Loss and dL/dlogit in double.
    double loss = 0.0;
    Mat dlogit(1, t);
    for (Eigen::Index k = 0; k < t; ++k) {
        double z = static_cast<double>(logits(0, k));
        double p = 1.0 / (1.0 + std::exp(-z));
        double yk = static_cast<double>(target_y[static_cast<std::size_t>(k)]);
        constexpr double delta = 1e-7;
        double pc = std::min(1.0 - delta, std::max(delta, p));
        loss += -(yk * std::log(pc) + (1.0 - yk) * std::log1p(-pc));
        dlogit(0, k) = static_cast<S>(scale * (p - yk) / static_cast<double>(t));
    }
    loss /= static_cast<double>(t);

    // Backward: decoder, then mean aggregation, then encoder.
    Mat ddin = model.decoder.backward(dec_acts, dlogit, grad_dec);
    if (pts.cols() > 0) {
        Vec dr = ddin.bottomRows(model.embed_dim).rowwise().sum();
        Mat demb(model.embed_dim, emb.cols());
        for (Eigen::Index j = 0; j < emb.cols(); ++j)
            demb.col(j) =
                dr * static_cast<S>(counts[static_cast<std::size_t>(j)] / total_weight);
        model.encoder.backward(enc_acts, demb, grad_enc);
    }
    return loss;
}

} // namespace mappred

#endif
