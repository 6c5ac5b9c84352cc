#pragma once

// Structured-text container shared by the learned components. Floats are
// written through double, which round-trips every float value exactly.

#include <string>

#include "anyplace/mlp.hpp"
#include "anyplace/text_io.hpp"
#include "json.hpp"

namespace anyplace::detail {

inline nlohmann::json mlp_to_json(const Mlp& net)
{
    nlohmann::json j;
    j["layer_sizes"] = net.sizes;
    j["activation"] = "relu";
    j["layout"] = "row-major [out][in]";
    auto& layers = j["layers"] = nlohmann::json::array();
    for (int l = 0; l < net.layers(); ++l) {
        const auto& w = net.weights[l];
        std::vector<double> wv(w.data(), w.data() + w.size());
        std::vector<double> bv(net.biases[l].data(), net.biases[l].data() + net.biases[l].size());
        layers.push_back({{"rows", w.rows()}, {"cols", w.cols()}, {"weight", wv}, {"bias", bv}});
    }
    return j;
}

inline Mlp mlp_from_json(const nlohmann::json& j)
{
    Mlp net(j.at("layer_sizes").get<std::vector<int>>());
    const auto& layers = j.at("layers");
    if (static_cast<int>(layers.size()) != net.layers()) {
        throw FormatError("checkpoint layer count does not match layer_sizes");
    }
    for (int l = 0; l < net.layers(); ++l) {
        const auto& e = layers[l];
        auto wv = e.at("weight").get<std::vector<double>>();
        auto bv = e.at("bias").get<std::vector<double>>();
        if (e.at("rows").get<int>() != net.weights[l].rows() || e.at("cols").get<int>() != net.weights[l].cols() ||
            static_cast<Eigen::Index>(wv.size()) != net.weights[l].size() ||
            static_cast<Eigen::Index>(bv.size()) != net.biases[l].size()) {
            throw FormatError("checkpoint layer " + std::to_string(l) + " has the wrong shape");
        }
        for (std::size_t i = 0; i < wv.size(); ++i) {
            net.weights[l].data()[i] = static_cast<float>(wv[i]);
        }
        for (std::size_t i = 0; i < bv.size(); ++i) {
            net.biases[l][static_cast<Eigen::Index>(i)] = static_cast<float>(bv[i]);
        }
    }
    if (!net.finite()) {
        throw FormatError("checkpoint contains non-finite parameters");
    }
    return net;
}

inline nlohmann::json adam_to_json(const AdamOptions& a)
{
    return {{"lr", a.lr}, {"beta1", a.beta1}, {"beta2", a.beta2}, {"weight_decay", a.weight_decay}, {"eps", a.eps}};
}

inline AdamOptions adam_from_json(const nlohmann::json& j)
{
    AdamOptions a;
    a.lr = j.at("lr").get<double>();
    a.beta1 = j.at("beta1").get<double>();
    a.beta2 = j.at("beta2").get<double>();
    a.weight_decay = j.at("weight_decay").get<double>();
    a.eps = j.at("eps").get<double>();
    return a;
}

inline nlohmann::json parse_checkpoint(const std::string& text, const std::string& kind)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text, nullptr, true, true);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("checkpoint is not valid JSON: ") + e.what());
    }
    if (j.value("format", "") != "anyplace-checkpoint" || j.value("kind", "") != kind) {
        throw FormatError("not an anyplace " + kind + " checkpoint");
    }
    return j;
}

}  // namespace anyplace::detail
