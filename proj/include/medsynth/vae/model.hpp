#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "medsynth/errors.hpp"
#include "medsynth/numeric/layers.hpp"
#include "medsynth/numeric/random.hpp"
#include "medsynth/records/codec.hpp"
#include "medsynth/records/schema.hpp"

namespace medsynth {

inline constexpr int kModelFormatVersion = 1;
inline constexpr double kLogvarClamp = 10.0;
inline constexpr double kProbClamp = 1e-7;

// The 5-layer architecture is fixed: input, encoder hidden (tanh), latent,
// decoder hidden (tanh), output. Hidden widths work best kept below the
// input width so the latent bottleneck actually compresses; defaults are
// sized for datasets of a few hundred records.
struct VaeConfig {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 32;
    std::size_t latent_dim = 4;
    std::size_t epochs = 90;
    std::size_t batch_size = 16;
    double learning_rate = 1e-3;
    std::size_t kl_warmup_epochs = 10;
    std::uint64_t seed = 0;
    double age_sigma = 0.1;  // age observation noise, in normalized units
    std::vector<std::size_t> snapshot_epochs = {0, 30, 60, 90};
};

inline std::vector<std::size_t> default_snapshot_epochs(std::size_t epochs) {
    std::vector<std::size_t> out;
    for (std::size_t e : {0, 30, 60, 90})
        if (e <= epochs) out.push_back(e);
    return out;
}

inline void validate_config(const VaeConfig& c) {
    if (c.latent_dim < 1 || c.latent_dim >= c.input_dim)
        throw ShapeError("config: need 1 <= latent_dim < input_dim, got latent " +
                         std::to_string(c.latent_dim) + " vs input " +
                         std::to_string(c.input_dim));
    if (c.hidden_dim < c.latent_dim)
        throw ShapeError("config: hidden_dim " + std::to_string(c.hidden_dim) +
                         " below latent_dim " + std::to_string(c.latent_dim));
    if (c.epochs < 1) throw FormatError("config: epochs must be >= 1");
    if (c.batch_size < 1) throw FormatError("config: batch_size must be >= 1");
    if (!(c.learning_rate > 0.0)) throw FormatError("config: learning_rate must be > 0");
    if (!(c.age_sigma > 0.0)) throw FormatError("config: age_sigma must be > 0");
    for (std::size_t e : c.snapshot_epochs)
        if (e > c.epochs)
            throw FormatError("config: snapshot epoch " + std::to_string(e) +
                              " beyond epochs " + std::to_string(c.epochs));
}

struct EncoderParams {
    AffineLayer hidden;       // D -> H, tanh
    AffineLayer mu_head;      // H -> L, identity
    AffineLayer logvar_head;  // H -> L, identity
};

struct DecoderParams {
    AffineLayer hidden;  // L -> H, tanh
    AffineLayer output;  // H -> D, identity; group link functions applied separately
};

// Per-example variational parameters; logvar is clamped to [-10, 10].
struct GaussianLatent {
    Vector mu;
    Vector logvar;
};

struct VaeModel {
    DataSchema schema;
    FeatureLayout layout;
    VaeConfig config;
    EncoderParams encoder;
    DecoderParams decoder;
    std::string diagnosis;
    int format_version = kModelFormatVersion;
};

inline EncoderParams init_encoder(std::size_t input_dim, std::size_t hidden_dim,
                                  std::size_t latent_dim, RandomSource& rng) {
    EncoderParams enc;
    enc.hidden = init_affine_layer(hidden_dim, input_dim, Activation::Tanh, rng);
    enc.mu_head = init_affine_layer(latent_dim, hidden_dim, Activation::Identity, rng);
    enc.logvar_head = init_affine_layer(latent_dim, hidden_dim, Activation::Identity, rng);
    return enc;
}

inline DecoderParams init_decoder(std::size_t input_dim, std::size_t hidden_dim,
                                  std::size_t latent_dim, RandomSource& rng) {
    DecoderParams dec;
    dec.hidden = init_affine_layer(hidden_dim, latent_dim, Activation::Tanh, rng);
    dec.output = init_affine_layer(input_dim, hidden_dim, Activation::Identity, rng);
    return dec;
}

// Xavier-uniform weights, zero biases, layers initialized in the fixed
// order encoder hidden, mu head, logvar head, decoder hidden, decoder
// output so a given seed always yields the same model.
inline VaeModel init_model(const VaeConfig& config, const DataSchema& schema,
                           const std::string& diagnosis, RandomSource& rng) {
    const FeatureLayout layout = FeatureLayout::for_schema(schema);
    if (config.input_dim != layout.total_dim)
        throw ShapeError("init_model: config input_dim " + std::to_string(config.input_dim) +
                         " but schema encodes " + std::to_string(layout.total_dim) +
                         " features");
    validate_config(config);
    VaeModel model;
    model.schema = schema;
    model.layout = layout;
    model.config = config;
    model.diagnosis = diagnosis;
    model.encoder = init_encoder(config.input_dim, config.hidden_dim, config.latent_dim, rng);
    model.decoder = init_decoder(config.input_dim, config.hidden_dim, config.latent_dim, rng);
    return model;
}

// ---------------------------------------------------------------------------
// Forward passes
// ---------------------------------------------------------------------------

struct EncoderCache {
    LayerCache hidden;
    LayerCache mu_head;
    LayerCache logvar_head;
    GaussianLatent latent;
    std::vector<bool> logvar_unclamped;  // false where the +-10 clamp bound
};

inline EncoderCache encoder_forward_cached(const EncoderParams& enc, const Vector& x) {
    EncoderCache cache;
    cache.hidden = affine_forward(enc.hidden, x);
    cache.mu_head = affine_forward(enc.mu_head, cache.hidden.output);
    cache.logvar_head = affine_forward(enc.logvar_head, cache.hidden.output);
    cache.latent.mu = cache.mu_head.output;
    cache.latent.logvar = cache.logvar_head.output;
    cache.logvar_unclamped.assign(cache.latent.logvar.size(), true);
    for (std::size_t i = 0; i < cache.latent.logvar.size(); ++i) {
        double& lv = cache.latent.logvar[i];
        if (lv < -kLogvarClamp || lv > kLogvarClamp) {
            lv = std::clamp(lv, -kLogvarClamp, kLogvarClamp);
            cache.logvar_unclamped[i] = false;
        }
    }
    return cache;
}

inline GaussianLatent encoder_forward(const VaeModel& model, const FeatureVector& x) {
    auto cache = encoder_forward_cached(model.encoder, x.values);
    if (!all_finite(cache.latent.mu) || !all_finite(cache.latent.logvar))
        throw NumericError("encoder_forward: non-finite latent parameters");
    return std::move(cache.latent);
}

// z = mu + exp(logvar / 2) * eps
inline Vector reparameterize(const GaussianLatent& latent, const Vector& eps) {
    if (eps.size() != latent.mu.size())
        throw ShapeError("reparameterize: eps has length " + std::to_string(eps.size()) +
                         " but latent has " + std::to_string(latent.mu.size()));
    Vector z(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i)
        z[i] = latent.mu[i] + std::exp(0.5 * latent.logvar[i]) * eps[i];
    return z;
}

namespace detail {

// Clamp each probability to [1e-7, 1 - 1e-7], then renormalize the simplex
// so it still sums to 1 when a clamp bound was active.
inline Vector clamped_simplex(const Vector& probs) {
    Vector out(probs.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        out[i] = std::clamp(probs[i], kProbClamp, 1.0 - kProbClamp);
        sum += out[i];
    }
    for (auto& p : out) p /= sum;
    return out;
}

inline Vector slice(const Vector& v, const FeatureRange& range) {
    return Vector(v.begin() + static_cast<std::ptrdiff_t>(range.offset),
                  v.begin() + static_cast<std::ptrdiff_t>(range.offset + range.length));
}

}  // namespace detail

// Splits the raw decoder output by feature group and applies the link
// functions: softmax over each categorical group, sigmoid on symptom slots
// and the age slot.
inline DecodedParams apply_output_links(const Vector& raw, const FeatureLayout& layout) {
    if (raw.size() != layout.total_dim)
        throw ShapeError("apply_output_links: raw output has length " +
                         std::to_string(raw.size()) + " but layout has " +
                         std::to_string(layout.total_dim));
    DecodedParams params;
    params.gender_probs = detail::clamped_simplex(softmax(detail::slice(raw, layout.gender)));
    params.month_probs = detail::clamped_simplex(softmax(detail::slice(raw, layout.month)));
    params.symptom_probs.resize(layout.symptoms.length);
    for (std::size_t i = 0; i < layout.symptoms.length; ++i)
        params.symptom_probs[i] = std::clamp(sigmoid(raw[layout.symptoms.offset + i]),
                                             kProbClamp, 1.0 - kProbClamp);
    params.age_mean =
        std::clamp(sigmoid(raw[layout.age.offset]), kProbClamp, 1.0 - kProbClamp);
    return params;
}

struct DecoderCache {
    LayerCache hidden;
    LayerCache output;
    DecodedParams params;
};

inline DecoderCache decoder_forward_cached(const DecoderParams& dec,
                                           const FeatureLayout& layout, const Vector& z) {
    DecoderCache cache;
    cache.hidden = affine_forward(dec.hidden, z);
    cache.output = affine_forward(dec.output, cache.hidden.output);
    cache.params = apply_output_links(cache.output.output, layout);
    return cache;
}

inline DecodedParams decoder_forward(const VaeModel& model, const Vector& z) {
    auto cache = decoder_forward_cached(model.decoder, model.layout, z);
    if (!all_finite(cache.params.gender_probs) || !all_finite(cache.params.month_probs) ||
        !all_finite(cache.params.symptom_probs) || !std::isfinite(cache.params.age_mean))
        throw NumericError("decoder_forward: non-finite output distribution");
    return std::move(cache.params);
}

// ---------------------------------------------------------------------------
// Parameter flattening (fixed order: encoder hidden W,b; mu head W,b;
// logvar head W,b; decoder hidden W,b; decoder output W,b — matrices
// row-major). Adam state and gradient checking both run over this view.
// ---------------------------------------------------------------------------

inline std::size_t param_count(const EncoderParams& enc, const DecoderParams& dec) {
    auto layer_count = [](const AffineLayer& l) {
        return l.weights.entries.size() + l.bias.size();
    };
    return layer_count(enc.hidden) + layer_count(enc.mu_head) + layer_count(enc.logvar_head) +
           layer_count(dec.hidden) + layer_count(dec.output);
}

namespace detail {

template <typename Fn>
void for_each_layer(EncoderParams& enc, DecoderParams& dec, Fn&& fn) {
    fn(enc.hidden);
    fn(enc.mu_head);
    fn(enc.logvar_head);
    fn(dec.hidden);
    fn(dec.output);
}

template <typename Fn>
void for_each_layer(const EncoderParams& enc, const DecoderParams& dec, Fn&& fn) {
    fn(enc.hidden);
    fn(enc.mu_head);
    fn(enc.logvar_head);
    fn(dec.hidden);
    fn(dec.output);
}

}  // namespace detail

inline Vector flatten_params(const EncoderParams& enc, const DecoderParams& dec) {
    Vector flat;
    flat.reserve(param_count(enc, dec));
    detail::for_each_layer(enc, dec, [&](const AffineLayer& l) {
        flat.insert(flat.end(), l.weights.entries.begin(), l.weights.entries.end());
        flat.insert(flat.end(), l.bias.begin(), l.bias.end());
    });
    return flat;
}

inline void set_params(EncoderParams& enc, DecoderParams& dec, const Vector& flat) {
    if (flat.size() != param_count(enc, dec))
        throw ShapeError("set_params: " + std::to_string(flat.size()) + " values for " +
                         std::to_string(param_count(enc, dec)) + " parameters");
    std::size_t pos = 0;
    detail::for_each_layer(enc, dec, [&](AffineLayer& l) {
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                    l.weights.entries.size(), l.weights.entries.begin());
        pos += l.weights.entries.size();
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), l.bias.size(),
                    l.bias.begin());
        pos += l.bias.size();
    });
}

}  // namespace medsynth
