#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "medsynth/errors.hpp"
#include "medsynth/numeric/layers.hpp"
#include "medsynth/records/schema.hpp"
#include "medsynth/vae/model.hpp"

namespace medsynth {

// ---------------------------------------------------------------------------
// Model persistence. JSON with explicit matrix shapes; doubles are written
// with shortest-round-trip precision, so save -> load is bit-exact.
// ---------------------------------------------------------------------------

inline std::string activation_name(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Sigmoid: return "sigmoid";
    }
    throw FormatError("activation_name: unknown activation");
}

inline Activation activation_from_name(const std::string& name) {
    if (name == "identity") return Activation::Identity;
    if (name == "relu") return Activation::Relu;
    if (name == "tanh") return Activation::Tanh;
    if (name == "sigmoid") return Activation::Sigmoid;
    throw FormatError("model file: unknown activation \"" + name + "\"");
}

namespace detail {

inline nlohmann::json layer_to_json(const AffineLayer& layer) {
    return nlohmann::json{{"activation", activation_name(layer.activation)},
                          {"weights",
                           {{"rows", layer.weights.rows},
                            {"cols", layer.weights.cols},
                            {"data", layer.weights.entries}}},
                          {"bias", layer.bias}};
}

inline AffineLayer layer_from_json(const nlohmann::json& j, const std::string& name,
                                   std::size_t rows, std::size_t cols) {
    AffineLayer layer;
    layer.activation = activation_from_name(j.at("activation").get<std::string>());
    const auto& w = j.at("weights");
    layer.weights.rows = w.at("rows").get<std::size_t>();
    layer.weights.cols = w.at("cols").get<std::size_t>();
    layer.weights.entries = w.at("data").get<Vector>();
    layer.bias = j.at("bias").get<Vector>();
    if (layer.weights.rows != rows || layer.weights.cols != cols)
        throw ShapeError("model file: layer " + name + " is " +
                         std::to_string(layer.weights.rows) + "x" +
                         std::to_string(layer.weights.cols) + ", expected " +
                         std::to_string(rows) + "x" + std::to_string(cols));
    if (layer.weights.entries.size() != rows * cols)
        throw ShapeError("model file: layer " + name + " has " +
                         std::to_string(layer.weights.entries.size()) +
                         " weights for shape " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    if (layer.bias.size() != rows)
        throw ShapeError("model file: layer " + name + " has " +
                         std::to_string(layer.bias.size()) + " biases for " +
                         std::to_string(rows) + " outputs");
    return layer;
}

inline nlohmann::json config_to_json(const VaeConfig& c) {
    return nlohmann::json{{"input_dim", c.input_dim},
                          {"hidden_dim", c.hidden_dim},
                          {"latent_dim", c.latent_dim},
                          {"epochs", c.epochs},
                          {"batch_size", c.batch_size},
                          {"learning_rate", c.learning_rate},
                          {"kl_warmup_epochs", c.kl_warmup_epochs},
                          {"seed", c.seed},
                          {"age_sigma", c.age_sigma},
                          {"snapshot_epochs", c.snapshot_epochs}};
}

inline VaeConfig config_from_json(const nlohmann::json& j) {
    VaeConfig c;
    c.input_dim = j.at("input_dim").get<std::size_t>();
    c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
    c.latent_dim = j.at("latent_dim").get<std::size_t>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.kl_warmup_epochs = j.at("kl_warmup_epochs").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.age_sigma = j.at("age_sigma").get<double>();
    c.snapshot_epochs = j.at("snapshot_epochs").get<std::vector<std::size_t>>();
    return c;
}

}  // namespace detail

inline nlohmann::json model_to_json(const VaeModel& model) {
    return nlohmann::json{{"format_version", model.format_version},
                          {"diagnosis", model.diagnosis},
                          {"schema", schema_to_json(model.schema)},
                          {"config", detail::config_to_json(model.config)},
                          {"encoder",
                           {{"hidden", detail::layer_to_json(model.encoder.hidden)},
                            {"mu_head", detail::layer_to_json(model.encoder.mu_head)},
                            {"logvar_head", detail::layer_to_json(model.encoder.logvar_head)}}},
                          {"decoder",
                           {{"hidden", detail::layer_to_json(model.decoder.hidden)},
                            {"output", detail::layer_to_json(model.decoder.output)}}}};
}

inline VaeModel model_from_json(const nlohmann::json& j) {
    VaeModel model;
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion)
            throw FormatError("model file: unsupported format_version " +
                              std::to_string(version) + " (expected " +
                              std::to_string(kModelFormatVersion) + ")");
        model.format_version = version;
        model.diagnosis = j.at("diagnosis").get<std::string>();
        model.schema = schema_from_json(j.at("schema"));
        model.config = detail::config_from_json(j.at("config"));
        model.layout = FeatureLayout::for_schema(model.schema);
        if (model.config.input_dim != model.layout.total_dim)
            throw ShapeError("model file: config input_dim " +
                             std::to_string(model.config.input_dim) +
                             " but schema encodes " +
                             std::to_string(model.layout.total_dim) + " features");
        validate_config(model.config);
        const std::size_t D = model.config.input_dim;
        const std::size_t H = model.config.hidden_dim;
        const std::size_t L = model.config.latent_dim;
        const auto& enc = j.at("encoder");
        model.encoder.hidden = detail::layer_from_json(enc.at("hidden"), "encoder.hidden", H, D);
        model.encoder.mu_head =
            detail::layer_from_json(enc.at("mu_head"), "encoder.mu_head", L, H);
        model.encoder.logvar_head =
            detail::layer_from_json(enc.at("logvar_head"), "encoder.logvar_head", L, H);
        const auto& dec = j.at("decoder");
        model.decoder.hidden = detail::layer_from_json(dec.at("hidden"), "decoder.hidden", H, L);
        model.decoder.output = detail::layer_from_json(dec.at("output"), "decoder.output", D, H);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model file: missing or malformed field: ") + e.what());
    }
    return model;
}

inline void save_model(const VaeModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("save_model: cannot open " + path.string());
    out << model_to_json(model).dump(2) << '\n';
    if (!out) throw FormatError("save_model: write failed for " + path.string());
}

inline VaeModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("load_model: cannot open " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("model file: truncated or invalid JSON: " + std::string(e.what()));
    }
    return model_from_json(j);
}

}  // namespace medsynth
