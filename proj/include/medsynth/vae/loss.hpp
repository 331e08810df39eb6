#pragma once

#include <cmath>
#include <string>

#include "medsynth/errors.hpp"
#include "medsynth/numeric/layers.hpp"
#include "medsynth/vae/model.hpp"

namespace medsynth {

// ---------------------------------------------------------------------------
// Negative ELBO = reconstruction NLL + beta * KL(q(z|x) || N(0, I)).
// Per feature group the reconstruction term is the matching likelihood:
// categorical cross-entropy for gender and month, Bernoulli cross-entropy
// per symptom, and a fixed-variance Gaussian for normalized age.
// ---------------------------------------------------------------------------

struct ElboTerms {
    double reconstruction = 0.0;
    double kl = 0.0;
    double total = 0.0;
};

inline double reconstruction_nll(const DecodedParams& params, const FeatureVector& x,
                                 const FeatureLayout& layout, double age_sigma) {
    if (x.values.size() != layout.total_dim)
        throw ShapeError("reconstruction_nll: feature vector has length " +
                         std::to_string(x.values.size()) + " but layout has " +
                         std::to_string(layout.total_dim));
    if (params.gender_probs.size() != layout.gender.length ||
        params.month_probs.size() != layout.month.length ||
        params.symptom_probs.size() != layout.symptoms.length)
        throw ShapeError("reconstruction_nll: decoded params do not match layout");

    double nll = 0.0;
    for (std::size_t i = 0; i < layout.gender.length; ++i)
        nll -= x.values[layout.gender.offset + i] * std::log(params.gender_probs[i]);
    for (std::size_t i = 0; i < layout.month.length; ++i)
        nll -= x.values[layout.month.offset + i] * std::log(params.month_probs[i]);
    for (std::size_t i = 0; i < layout.symptoms.length; ++i) {
        const double t = x.values[layout.symptoms.offset + i];
        const double p = params.symptom_probs[i];
        nll -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    }
    const double diff = x.values[layout.age.offset] - params.age_mean;
    nll += diff * diff / (2.0 * age_sigma * age_sigma);
    nll += std::log(age_sigma * std::sqrt(2.0 * M_PI));
    return nll;
}

// Closed form: 0.5 * sum(mu^2 + exp(logvar) - 1 - logvar).
inline double kl_to_standard_normal(const GaussianLatent& latent) {
    if (latent.logvar.size() != latent.mu.size())
        throw ShapeError("kl_to_standard_normal: mu has length " +
                         std::to_string(latent.mu.size()) + " but logvar has " +
                         std::to_string(latent.logvar.size()));
    double kl = 0.0;
    for (std::size_t i = 0; i < latent.mu.size(); ++i)
        kl += latent.mu[i] * latent.mu[i] + std::exp(latent.logvar[i]) - 1.0 -
              latent.logvar[i];
    return 0.5 * kl;
}

struct VaeForwardCache {
    EncoderCache encoder;
    Vector z;
    DecoderCache decoder;
};

inline VaeForwardCache vae_forward(const EncoderParams& enc, const DecoderParams& dec,
                                   const FeatureLayout& layout, const Vector& x,
                                   const Vector& eps) {
    VaeForwardCache cache;
    cache.encoder = encoder_forward_cached(enc, x);
    cache.z = reparameterize(cache.encoder.latent, eps);
    cache.decoder = decoder_forward_cached(dec, layout, cache.z);
    return cache;
}

inline ElboTerms elbo_terms(const VaeForwardCache& cache, const FeatureLayout& layout,
                            double age_sigma, const Vector& x, double beta) {
    ElboTerms terms;
    terms.reconstruction =
        reconstruction_nll(cache.decoder.params, FeatureVector{x}, layout, age_sigma);
    terms.kl = kl_to_standard_normal(cache.encoder.latent);
    terms.total = terms.reconstruction + beta * terms.kl;
    return terms;
}

inline ElboTerms negative_elbo(const EncoderParams& enc, const DecoderParams& dec,
                               const FeatureLayout& layout, double age_sigma,
                               const Vector& x, const Vector& eps, double beta) {
    const auto cache = vae_forward(enc, dec, layout, x, eps);
    return elbo_terms(cache, layout, age_sigma, x, beta);
}

inline ElboTerms negative_elbo(const VaeModel& model, const FeatureVector& x,
                               const Vector& eps, double beta) {
    return negative_elbo(model.encoder, model.decoder, model.layout,
                         model.config.age_sigma, x.values, eps, beta);
}

// ---------------------------------------------------------------------------
// Backward pass. Gradients are derived by hand; the link functions fold
// into the usual compact forms (softmax + cross-entropy and sigmoid +
// Bernoulli both give p - t at the raw output). The probability clamp and
// simplex renormalization are treated as identity for gradients — they only
// bind when a probability is within 1e-7 of the boundary.
// ---------------------------------------------------------------------------

struct VaeGradients {
    LayerGrads enc_hidden;
    LayerGrads enc_mu;
    LayerGrads enc_logvar;
    LayerGrads dec_hidden;
    LayerGrads dec_output;
};

inline VaeGradients zero_vae_gradients(const EncoderParams& enc, const DecoderParams& dec) {
    return VaeGradients{zero_grads_like(enc.hidden), zero_grads_like(enc.mu_head),
                        zero_grads_like(enc.logvar_head), zero_grads_like(dec.hidden),
                        zero_grads_like(dec.output)};
}

inline void scale_gradients(VaeGradients& grads, double factor) {
    auto scale = [factor](LayerGrads& g) {
        for (auto& w : g.weights.entries) w *= factor;
        for (auto& b : g.bias) b *= factor;
    };
    scale(grads.enc_hidden);
    scale(grads.enc_mu);
    scale(grads.enc_logvar);
    scale(grads.dec_hidden);
    scale(grads.dec_output);
}

// Same order as flatten_params.
inline Vector flatten_grads(const VaeGradients& grads) {
    Vector flat;
    auto append = [&flat](const LayerGrads& g) {
        flat.insert(flat.end(), g.weights.entries.begin(), g.weights.entries.end());
        flat.insert(flat.end(), g.bias.begin(), g.bias.end());
    };
    append(grads.enc_hidden);
    append(grads.enc_mu);
    append(grads.enc_logvar);
    append(grads.dec_hidden);
    append(grads.dec_output);
    return flat;
}

// Accumulates d(total)/d(params) for one example into `into` and returns the
// loss terms from the same forward pass.
inline ElboTerms elbo_backward(const EncoderParams& enc, const DecoderParams& dec,
                               const FeatureLayout& layout, double age_sigma,
                               const Vector& x, const Vector& eps, double beta,
                               VaeGradients& into) {
    const auto cache = vae_forward(enc, dec, layout, x, eps);
    const ElboTerms terms = elbo_terms(cache, layout, age_sigma, x, beta);
    const DecodedParams& params = cache.decoder.params;

    // Gradient at the raw decoder output.
    Vector g_raw(layout.total_dim, 0.0);
    for (std::size_t i = 0; i < layout.gender.length; ++i)
        g_raw[layout.gender.offset + i] =
            params.gender_probs[i] - x[layout.gender.offset + i];
    for (std::size_t i = 0; i < layout.month.length; ++i)
        g_raw[layout.month.offset + i] = params.month_probs[i] - x[layout.month.offset + i];
    for (std::size_t i = 0; i < layout.symptoms.length; ++i)
        g_raw[layout.symptoms.offset + i] =
            params.symptom_probs[i] - x[layout.symptoms.offset + i];
    const double a = params.age_mean;
    g_raw[layout.age.offset] =
        (a - x[layout.age.offset]) / (age_sigma * age_sigma) * a * (1.0 - a);

    // Decoder.
    Vector g_dec_hidden = affine_backward(dec.output, cache.decoder.output, g_raw,
                                          into.dec_output);
    Vector g_z = affine_backward(dec.hidden, cache.decoder.hidden, g_dec_hidden,
                                 into.dec_hidden);

    // Through the reparameterization, plus the KL term's own gradients.
    const GaussianLatent& latent = cache.encoder.latent;
    Vector g_mu(latent.mu.size());
    Vector g_logvar(latent.mu.size());
    for (std::size_t i = 0; i < latent.mu.size(); ++i) {
        const double sd = std::exp(0.5 * latent.logvar[i]);
        g_mu[i] = g_z[i] + beta * latent.mu[i];
        g_logvar[i] = g_z[i] * eps[i] * 0.5 * sd +
                      beta * 0.5 * (std::exp(latent.logvar[i]) - 1.0);
        if (!cache.encoder.logvar_unclamped[i]) g_logvar[i] = 0.0;
    }

    // Encoder: both heads feed the shared hidden layer.
    Vector g_enc_hidden =
        affine_backward(enc.mu_head, cache.encoder.mu_head, g_mu, into.enc_mu);
    const Vector g_from_logvar =
        affine_backward(enc.logvar_head, cache.encoder.logvar_head, g_logvar, into.enc_logvar);
    for (std::size_t i = 0; i < g_enc_hidden.size(); ++i)
        g_enc_hidden[i] += g_from_logvar[i];
    affine_backward(enc.hidden, cache.encoder.hidden, g_enc_hidden, into.enc_hidden);

    return terms;
}

}  // namespace medsynth
