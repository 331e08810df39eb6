#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "medsynth/errors.hpp"
#include "medsynth/eval/pca.hpp"
#include "medsynth/numeric/adam.hpp"
#include "medsynth/numeric/layers.hpp"
#include "medsynth/numeric/random.hpp"

namespace medsynth {

// ---------------------------------------------------------------------------
// Can a simple classifier tell synthetic records from real ones? Near-chance
// results mean the synthetic data is hard to distinguish. The report keeps
// all four confusion percentages plus accuracy and AUC.
// ---------------------------------------------------------------------------

struct DiscriminatorReport {
    std::size_t test_synthetic_count = 0;
    std::size_t test_real_count = 0;
    std::size_t synthetic_as_synthetic_count = 0;
    std::size_t real_as_synthetic_count = 0;
    double synthetic_as_synthetic_pct = 0.0;
    double real_as_synthetic_pct = 0.0;
    double synthetic_as_real_pct = 0.0;
    double real_as_real_pct = 0.0;
    double accuracy = 0.0;
    double auc = 0.5;
};

inline DiscriminatorReport discriminator_report_from_counts(
    std::size_t synthetic_as_synthetic, std::size_t test_synthetic,
    std::size_t real_as_synthetic, std::size_t test_real) {
    if (test_synthetic == 0 || test_real == 0)
        throw FormatError("discriminator report: empty test class");
    DiscriminatorReport r;
    r.test_synthetic_count = test_synthetic;
    r.test_real_count = test_real;
    r.synthetic_as_synthetic_count = synthetic_as_synthetic;
    r.real_as_synthetic_count = real_as_synthetic;
    const auto pct = [](std::size_t num, std::size_t den) {
        return 100.0 * static_cast<double>(num) / static_cast<double>(den);
    };
    r.synthetic_as_synthetic_pct = pct(synthetic_as_synthetic, test_synthetic);
    r.synthetic_as_real_pct = pct(test_synthetic - synthetic_as_synthetic, test_synthetic);
    r.real_as_synthetic_pct = pct(real_as_synthetic, test_real);
    r.real_as_real_pct = pct(test_real - real_as_synthetic, test_real);
    r.accuracy = static_cast<double>(synthetic_as_synthetic +
                                     (test_real - real_as_synthetic)) /
                 static_cast<double>(test_synthetic + test_real);
    return r;
}

namespace detail {

// AUC via the rank-sum identity with midranks for ties; identical to the
// trapezoidal area under the ROC curve.
inline double ranked_auc(const std::vector<double>& scores,
                         const std::vector<int>& labels) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;  // ranks are 1-based
        for (std::size_t t = i; t <= j; ++t) rank[order[t]] = mid;
        i = j + 1;
    }
    double positive_rank_sum = 0.0;
    std::size_t positives = 0;
    for (std::size_t t = 0; t < n; ++t)
        if (labels[t] == 1) {
            positive_rank_sum += rank[t];
            ++positives;
        }
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0)
        throw FormatError("ranked_auc: need both classes in the test set");
    return (positive_rank_sum -
            0.5 * static_cast<double>(positives) * static_cast<double>(positives + 1)) /
           (static_cast<double>(positives) * static_cast<double>(negatives));
}

}  // namespace detail

// Stratified seeded 70/30 split, then zero-initialized logistic regression
// (one affine layer + sigmoid, label synthetic = 1) trained full-batch for
// 200 epochs with Adam at lr 0.05. Test predictions threshold at 0.5.
inline DiscriminatorReport fit_discriminator(const std::vector<FeatureVector>& real,
                                             const std::vector<FeatureVector>& synthetic,
                                             RandomSource& rng) {
    constexpr std::size_t kMinPerClass = 10;
    if (real.size() < kMinPerClass || synthetic.size() < kMinPerClass)
        throw FormatError("fit_discriminator: need at least " +
                          std::to_string(kMinPerClass) + " examples per class, got " +
                          std::to_string(real.size()) + " real and " +
                          std::to_string(synthetic.size()) + " synthetic");
    const std::size_t dim = real.front().values.size();
    for (const auto& fv : synthetic)
        if (fv.values.size() != dim)
            throw ShapeError("fit_discriminator: synthetic feature length " +
                             std::to_string(fv.values.size()) + " vs real " +
                             std::to_string(dim));

    // Per-class shuffle (real first, then synthetic), 70% to train.
    struct Example {
        const Vector* x;
        int label;  // synthetic = 1
    };
    std::vector<Example> train, test;
    auto split = [&](const std::vector<FeatureVector>& cls, int label) {
        const std::vector<std::size_t> perm = rng.permutation(cls.size());
        const std::size_t n_train =
            static_cast<std::size_t>(0.7 * static_cast<double>(cls.size()));
        for (std::size_t i = 0; i < cls.size(); ++i)
            (i < n_train ? train : test).push_back(Example{&cls[perm[i]].values, label});
    };
    split(real, 0);
    split(synthetic, 1);

    // Full-batch logistic regression over flattened (weights, bias).
    Vector params(dim + 1, 0.0);
    AdamState adam(params.size(), AdamHyper{0.05});
    for (std::size_t epoch = 0; epoch < 200; ++epoch) {
        Vector grad(dim + 1, 0.0);
        for (const auto& ex : train) {
            double logit = params[dim];
            for (std::size_t i = 0; i < dim; ++i) logit += params[i] * (*ex.x)[i];
            const double residual = sigmoid(logit) - ex.label;
            for (std::size_t i = 0; i < dim; ++i) grad[i] += residual * (*ex.x)[i];
            grad[dim] += residual;
        }
        for (auto& g : grad) g /= static_cast<double>(train.size());
        adam_step(params, grad, adam);
    }

    std::vector<double> scores;
    std::vector<int> labels;
    scores.reserve(test.size());
    labels.reserve(test.size());
    std::size_t syn_total = 0, real_total = 0, syn_flagged = 0, real_flagged = 0;
    for (const auto& ex : test) {
        double logit = params[dim];
        for (std::size_t i = 0; i < dim; ++i) logit += params[i] * (*ex.x)[i];
        const double score = sigmoid(logit);
        scores.push_back(score);
        labels.push_back(ex.label);
        const bool flagged = score >= 0.5;
        if (ex.label == 1) {
            ++syn_total;
            if (flagged) ++syn_flagged;
        } else {
            ++real_total;
            if (flagged) ++real_flagged;
        }
    }

    DiscriminatorReport report =
        discriminator_report_from_counts(syn_flagged, syn_total, real_flagged, real_total);
    report.auc = detail::ranked_auc(scores, labels);
    return report;
}

// Three-row text table in the classic presentation.
inline std::string render_discriminator_table(const DiscriminatorReport& report) {
    char buf[96];
    std::string out;
    std::snprintf(buf, sizeof(buf), "Synthetic identified as synthetic %.1f%%\n",
                  report.synthetic_as_synthetic_pct);
    out += buf;
    std::snprintf(buf, sizeof(buf), "Real identified as synthetic %.1f%%\n",
                  report.real_as_synthetic_pct);
    out += buf;
    std::snprintf(buf, sizeof(buf), "Synthetic identified as real %.1f%%\n",
                  report.synthetic_as_real_pct);
    out += buf;
    return out;
}

inline nlohmann::json discriminator_report_to_json(const DiscriminatorReport& r) {
    return nlohmann::json{{"test_synthetic_count", r.test_synthetic_count},
                          {"test_real_count", r.test_real_count},
                          {"synthetic_as_synthetic_count", r.synthetic_as_synthetic_count},
                          {"real_as_synthetic_count", r.real_as_synthetic_count},
                          {"synthetic_as_synthetic_pct", r.synthetic_as_synthetic_pct},
                          {"real_as_synthetic_pct", r.real_as_synthetic_pct},
                          {"synthetic_as_real_pct", r.synthetic_as_real_pct},
                          {"real_as_real_pct", r.real_as_real_pct},
                          {"accuracy", r.accuracy},
                          {"auc", r.auc}};
}

}  // namespace medsynth
