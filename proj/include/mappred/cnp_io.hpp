#ifndef MAPPRED_CNP_IO_HPP
#define MAPPRED_CNP_IO_HPP

#include "mappred/cnp.hpp"
#include "mappred/dataset.hpp" // put_f32/get_f32

#include <fstream>
#include <sstream>
#include <string>

namespace mappred {

/// Weight file: magic `CNPW1`, a UTF-8 key-value metadata block terminated by
/// a `data` line, then little-endian f32 parameter arrays in declaration order
/// (per layer: W row-major, then b).
inline void save_cnp(const CnpModel &model, std::ostream &out) {
    out << "CNPW1\n";
    out << "embed_dim = " << model.embed_dim << '\n';
    out << "activation = relu\n";
    auto shapes = [&](const char *name, const Mlp<float> &net) {
        out << name << "_layers = " << net.layers.size() << '\n';
        for (std::size_t l = 0; l < net.layers.size(); ++l)
            out << name << "_shape_" << l << " = " << net.layers[l].W.rows() << ' '
                << net.layers[l].W.cols() << '\n';
    };
    shapes("encoder", model.encoder);
    shapes("decoder", model.decoder);
    out << "data\n";
    auto dump = [&](const Mlp<float> &net) {
        for (const auto &layer : net.layers) {
            for (Eigen::Index r = 0; r < layer.W.rows(); ++r)
                for (Eigen::Index c = 0; c < layer.W.cols(); ++c)
                    detail::put_f32(out, layer.W(r, c));
            for (Eigen::Index r = 0; r < layer.b.size(); ++r)
                detail::put_f32(out, layer.b(r));
        }
    };
    dump(model.encoder);
    dump(model.decoder);
}

inline CnpModel load_cnp(std::istream &in) {
    std::string line;
    if (!std::getline(in, line) || line != "CNPW1")
        throw IoError("cnp weights: bad magic");
    CnpModel model;
    std::vector<std::pair<int, int>> enc_shapes, dec_shapes;
    int enc_layers = 0, dec_layers = 0;
    while (std::getline(in, line)) {
        if (line == "data")
            break;
        std::istringstream ls(line);
        std::string key, eq;
        ls >> key >> eq;
        if (key == "embed_dim")
            ls >> model.embed_dim;
        else if (key == "encoder_layers") {
            ls >> enc_layers;
            enc_shapes.resize(static_cast<std::size_t>(enc_layers));
        } else if (key == "decoder_layers") {
            ls >> dec_layers;
            dec_shapes.resize(static_cast<std::size_t>(dec_layers));
        } else if (key.rfind("encoder_shape_", 0) == 0) {
            std::size_t l = std::stoul(key.substr(14));
            if (l >= enc_shapes.size())
                throw IoError("cnp weights: encoder shape out of order");
            ls >> enc_shapes[l].first >> enc_shapes[l].second;
        } else if (key.rfind("decoder_shape_", 0) == 0) {
            std::size_t l = std::stoul(key.substr(14));
            if (l >= dec_shapes.size())
                throw IoError("cnp weights: decoder shape out of order");
            ls >> dec_shapes[l].first >> dec_shapes[l].second;
        }
    }
    if (line != "data")
        throw IoError("cnp weights: missing data block");
    auto read_net = [&](const std::vector<std::pair<int, int>> &shapes) {
        Mlp<float> net;
        for (auto [rows, cols] : shapes) {
            typename Mlp<float>::Layer layer;
            layer.W.resize(rows, cols);
            layer.b.resize(rows);
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c)
                    layer.W(r, c) = detail::get_f32(in);
            for (int r = 0; r < rows; ++r)
                layer.b(r) = detail::get_f32(in);
            net.layers.push_back(std::move(layer));
        }
        return net;
    };
    model.encoder = read_net(enc_shapes);
    model.decoder = read_net(dec_shapes);
    if (!in)
        throw IoError("cnp weights: truncated data");
    model.check();
    return model;
}

inline void save_cnp(const CnpModel &model, const std::string &path) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open for writing: " + path);
    save_cnp(model, f);
}

inline CnpModel load_cnp(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open: " + path);
    return load_cnp(f);
}

} // namespace mappred

#endif
