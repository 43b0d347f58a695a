#ifndef MAPPRED_MLP_HPP
#define MAPPRED_MLP_HPP

#include "mappred/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <random>
#include <vector>

namespace mappred {

/// Fully-connected feedforward network with ReLU on all hidden layers and a
/// linear final layer. Columns of the input matrix are points, so a whole set
/// is pushed through as one GEMM chain.
template <typename S> struct Mlp {
    using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

    struct Layer {
        Mat W; // out x in
        Vec b; // out
    };
    std::vector<Layer> layers;

    int input_dim() const { return static_cast<int>(layers.front().W.cols()); }
    int output_dim() const { return static_cast<int>(layers.back().W.rows()); }

    /// He-style uniform fan-in initialization.
    static Mlp random(const std::vector<int> &dims, std::mt19937_64 &rng) {
        Mlp net;
        for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
            Layer layer;
            int in = dims[l], out = dims[l + 1];
            S limit = static_cast<S>(std::sqrt(6.0 / in));
            std::uniform_real_distribution<double> dist(-static_cast<double>(limit),
                                                        static_cast<double>(limit));
            layer.W.resize(out, in);
            for (int r = 0; r < out; ++r)
                for (int c = 0; c < in; ++c)
                    layer.W(r, c) = static_cast<S>(dist(rng));
            layer.b = Vec::Zero(out);
            net.layers.push_back(std::move(layer));
        }
        return net;
    }

    static Mlp zeros(const std::vector<int> &dims) {
        Mlp net;
        for (std::size_t l = 0; l + 1 < dims.size(); ++l)
            net.layers.push_back(Layer{Mat::Zero(dims[l + 1], dims[l]), Vec::Zero(dims[l + 1])});
        return net;
    }

    void check_dims() const {
        for (std::size_t l = 0; l + 1 < layers.size(); ++l)
            if (layers[l].W.rows() != layers[l + 1].W.cols())
                throw ModelError("Mlp: consecutive layer dimensions do not chain");
    }

    Mat forward(const Mat &x) const {
        Mat a = x;
        for (std::size_t l = 0; l < layers.size(); ++l) {
            a = (layers[l].W * a).colwise() + layers[l].b;
            if (l + 1 < layers.size())
                a = a.cwiseMax(S(0));
        }
        return a;
    }

    /// Forward pass keeping post-activation values for backprop.
    /// acts[0] = input, acts[l+1] = output of layer l (after ReLU if hidden).
    Mat forward_cached(const Mat &x, std::vector<Mat> &acts) const {
        acts.clear();
        acts.push_back(x);
        Mat a = x;
        for (std::size_t l = 0; l < layers.size(); ++l) {
            a = (layers[l].W * a).colwise() + layers[l].b;
            if (l + 1 < layers.size())
                a = a.cwiseMax(S(0));
            acts.push_back(a);
        }
        return a;
    }

    /// Backpropagate dL/d(output); accumulates parameter gradients into
    /// `grad` (same shapes as *this) and returns dL/d(input).
    Mat backward(const std::vector<Mat> &acts, const Mat &dout, Mlp &grad) const {
        Mat delta = dout;
        for (std::size_t li = layers.size(); li-- > 0;) {
            if (li + 1 < layers.size()) {
                // ReLU mask of this layer's post-activation output.
                delta = delta.cwiseProduct(
                    (acts[li + 1].array() > S(0)).template cast<S>().matrix());
            }
            grad.layers[li].W.noalias() += delta * acts[li].transpose();
            grad.layers[li].b += delta.rowwise().sum();
            delta = (layers[li].W.transpose() * delta).eval();
        }
        return delta; // dL/d(input)
    }
};

} // namespace mappred

#endif
