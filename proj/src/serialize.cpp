#include "dual/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

#include "dual/errors.hpp"
#include "dual/io.hpp"

namespace dual {

namespace {

std::string to_hex_float(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

double from_hex_float(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
        throw ContractViolation("params_from_json: bad float literal '" + s + "'");
    return v;
}

nlohmann::ordered_json matrix_to_json(const Matrix& m) {
    nlohmann::ordered_json entry;
    entry["rows"] = m.rows();
    entry["cols"] = m.cols();
    auto& values = entry["values"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.size(); ++i) values.push_back(to_hex_float(m.data()[i]));
    return entry;
}

Matrix matrix_from_json(const nlohmann::ordered_json& entry) {
    const std::size_t rows = entry.at("rows").get<std::size_t>();
    const std::size_t cols = entry.at("cols").get<std::size_t>();
    const auto& values = entry.at("values");
    if (values.size() != rows * cols)
        throw ContractViolation("params_from_json: value count does not match shape");
    std::vector<double> data(rows * cols);
    for (std::size_t i = 0; i < data.size(); ++i)
        data[i] = from_hex_float(values[i].get<std::string>());
    return Matrix(rows, cols, std::move(data));
}

}  // namespace

nlohmann::ordered_json params_to_json(const DualNetwork& net) {
    nlohmann::ordered_json doc;
    for (const auto& ref : net.params()) doc[ref.name] = matrix_to_json(*ref.value);
    return doc;
}

DualNetwork params_from_json(const nlohmann::ordered_json& doc) {
    auto layer_count = [&doc](const std::string& prefix) {
        std::size_t count = 0;
        while (doc.contains(prefix + std::to_string(count) + ".weight")) ++count;
        return count;
    };
    const std::size_t enc_layers = layer_count("encoder.");
    const std::size_t dec_layers = layer_count("decoder.");
    if (enc_layers == 0 || dec_layers == 0 || !doc.contains("selection.q") ||
        !doc.contains("selection.p"))
        throw ContractViolation("params_from_json: incomplete parameter document");

    DualNetwork net;
    for (std::size_t l = 0; l < enc_layers; ++l) {
        DenseLayer layer;
        layer.weight = matrix_from_json(doc.at("encoder." + std::to_string(l) + ".weight"));
        layer.bias = matrix_from_json(doc.at("encoder." + std::to_string(l) + ".bias"));
        layer.activation = Activation::relu;
        net.encoder.push_back(std::move(layer));
    }
    for (std::size_t l = 0; l < dec_layers; ++l) {
        DenseLayer layer;
        layer.weight = matrix_from_json(doc.at("decoder." + std::to_string(l) + ".weight"));
        layer.bias = matrix_from_json(doc.at("decoder." + std::to_string(l) + ".bias"));
        layer.activation = l + 1 == dec_layers ? Activation::identity : Activation::relu;
        net.decoder.push_back(std::move(layer));
    }
    net.q = matrix_from_json(doc.at("selection.q"));
    net.p = matrix_from_json(doc.at("selection.p"));
    net.latent_dim = net.encoder.back().out_width();
    return net;
}

void save_params(const DualNetwork& net, const std::filesystem::path& path) {
    write_text_atomic(path, params_to_json(net).dump(2) + "\n");
}

DualNetwork load_params(const std::filesystem::path& path) {
    return params_from_json(nlohmann::ordered_json::parse(read_text(path)));
}

}  // namespace dual
