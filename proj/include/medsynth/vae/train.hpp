#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "medsynth/errors.hpp"
#include "medsynth/numeric/adam.hpp"
#include "medsynth/numeric/random.hpp"
#include "medsynth/records/codec.hpp"
#include "medsynth/records/record.hpp"
#include "medsynth/vae/loss.hpp"
#include "medsynth/vae/model.hpp"

namespace medsynth {

inline constexpr std::size_t kSnapshotSampleCount = 200;

// KL weight for a 0-based epoch index: ramps linearly 0 -> 1 over the
// warm-up epochs, then stays at 1. Warm-up 0 means the plain objective.
inline double kl_beta(std::size_t epoch, std::size_t warmup_epochs) {
    if (warmup_epochs == 0) return 1.0;
    return std::min(1.0, static_cast<double>(epoch) / static_cast<double>(warmup_epochs));
}

struct EpochStats {
    std::size_t epoch = 0;  // 1-based; epoch e covers the e-th pass over the data
    double mean_reconstruction = 0.0;
    double mean_kl = 0.0;
    double mean_total = 0.0;
    double beta = 0.0;
};

struct GenerationSnapshot {
    std::size_t epoch = 0;  // number of completed epochs when captured
    std::vector<FeatureVector> samples;
};

struct TrainingTrace {
    std::vector<EpochStats> epochs;
    std::vector<GenerationSnapshot> snapshots;
};

// ---------------------------------------------------------------------------
// Generation: draw z from the standard-normal prior, decode, and readout.
// ---------------------------------------------------------------------------

inline std::vector<PatientRecord> generate(const VaeModel& model, std::size_t n,
                                           RandomSource& rng, DecodeMode mode) {
    std::vector<PatientRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vector z = rng.standard_normal_vector(model.config.latent_dim);
        const DecodedParams params = decoder_forward(model, z);
        out.push_back(decode_params(params, model.schema, model.diagnosis, mode, rng));
    }
    return out;
}

namespace detail {

inline GenerationSnapshot capture_snapshot(const VaeModel& model, std::size_t epoch) {
    // Dedicated stream per snapshot so capturing never perturbs training.
    RandomSource rng =
        seeded_rng(derive_seed(model.config.seed, "snapshot-" + std::to_string(epoch)));
    GenerationSnapshot snap;
    snap.epoch = epoch;
    snap.samples.reserve(kSnapshotSampleCount);
    for (const PatientRecord& rec :
         generate(model, kSnapshotSampleCount, rng, DecodeMode::Sample))
        snap.samples.push_back(encode_record(rec, model.schema));
    return snap;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Training loop. Per epoch: seeded shuffle, minibatches, per-example
// gradients averaged, one Adam step per batch. A snapshot of generated
// feature vectors is captured whenever the completed-epoch count is listed
// in config.snapshot_epochs (0 = before any update).
// ---------------------------------------------------------------------------

inline TrainingTrace train(VaeModel& model, const std::vector<PatientRecord>& records,
                           const VaeConfig& config, RandomSource& rng) {
    if (records.empty()) throw FormatError("train: no records for " + model.diagnosis);
    for (const auto& rec : records)
        if (rec.diagnosis != model.diagnosis)
            throw FormatError("train: record with diagnosis \"" + rec.diagnosis +
                              "\" in batch for \"" + model.diagnosis + "\"");
    validate_config(config);
    if (config.input_dim != model.layout.total_dim)
        throw ShapeError("train: config input_dim " + std::to_string(config.input_dim) +
                         " but model encodes " + std::to_string(model.layout.total_dim) +
                         " features");
    model.config = config;

    std::vector<FeatureVector> features;
    features.reserve(records.size());
    for (const auto& rec : records) features.push_back(encode_record(rec, model.schema));

    auto snapshot_wanted = [&config](std::size_t epoch) {
        return std::find(config.snapshot_epochs.begin(), config.snapshot_epochs.end(),
                         epoch) != config.snapshot_epochs.end();
    };

    TrainingTrace trace;
    if (snapshot_wanted(0)) trace.snapshots.push_back(detail::capture_snapshot(model, 0));

    Vector params = flatten_params(model.encoder, model.decoder);
    AdamState adam(params.size(), AdamHyper{config.learning_rate});

    const std::size_t n = features.size();
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const double beta = kl_beta(epoch - 1, config.kl_warmup_epochs);
        const std::vector<std::size_t> order = rng.permutation(n);

        double sum_recon = 0.0, sum_kl = 0.0, sum_total = 0.0;
        for (std::size_t start = 0, batch_index = 0; start < n;
             start += config.batch_size, ++batch_index) {
            const std::size_t stop = std::min(start + config.batch_size, n);
            VaeGradients grads = zero_vae_gradients(model.encoder, model.decoder);
            for (std::size_t i = start; i < stop; ++i) {
                const Vector eps = rng.standard_normal_vector(config.latent_dim);
                const ElboTerms terms =
                    elbo_backward(model.encoder, model.decoder, model.layout,
                                  config.age_sigma, features[order[i]].values, eps, beta,
                                  grads);
                if (!std::isfinite(terms.total))
                    throw NumericError("train: non-finite loss at epoch " +
                                       std::to_string(epoch) + ", batch " +
                                       std::to_string(batch_index));
                sum_recon += terms.reconstruction;
                sum_kl += terms.kl;
                sum_total += terms.total;
            }
            scale_gradients(grads, 1.0 / static_cast<double>(stop - start));
            adam_step(params, flatten_grads(grads), adam);
            set_params(model.encoder, model.decoder, params);
        }

        trace.epochs.push_back(EpochStats{epoch, sum_recon / static_cast<double>(n),
                                          sum_kl / static_cast<double>(n),
                                          sum_total / static_cast<double>(n), beta});
        if (snapshot_wanted(epoch))
            trace.snapshots.push_back(detail::capture_snapshot(model, epoch));
    }
    return trace;
}

}  // namespace medsynth
