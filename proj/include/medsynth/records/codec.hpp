#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "medsynth/errors.hpp"
#include "medsynth/numeric/matrix.hpp"
#include "medsynth/numeric/random.hpp"
#include "medsynth/records/record.hpp"
#include "medsynth/records/schema.hpp"

namespace medsynth {

// Encoded record: one-hot gender (Female, Male) and month, min-max
// normalized age in [0,1], multi-hot symptoms.
struct FeatureVector {
    Vector values;
};

// Distribution parameters emitted by a decoder: one simplex per categorical
// group, a Bernoulli probability per symptom slot, and the mean of the age
// distribution in normalized units.
struct DecodedParams {
    Vector gender_probs;
    Vector month_probs;
    Vector symptom_probs;
    double age_mean = 0.5;
};

enum class DecodeMode { Argmax, Sample };

inline double normalize_age(double age_years, const DataSchema& schema) {
    const double t = (age_years - schema.age_min) / (schema.age_max - schema.age_min);
    return std::clamp(t, 0.0, 1.0);
}

inline FeatureVector encode_record(const PatientRecord& record, const DataSchema& schema) {
    const FeatureLayout layout = FeatureLayout::for_schema(schema);
    FeatureVector fv;
    fv.values.assign(layout.total_dim, 0.0);
    fv.values[layout.gender.offset + (record.gender == Gender::Female ? 0 : 1)] = 1.0;
    fv.values[layout.age.offset] = normalize_age(record.age_years, schema);
    fv.values[layout.month.offset + static_cast<std::size_t>(record.month)] = 1.0;
    for (const auto& s : record.symptoms) {
        const auto it = std::lower_bound(schema.symptom_vocab.begin(),
                                         schema.symptom_vocab.end(), s);
        if (it == schema.symptom_vocab.end() || *it != s)
            throw FormatError("encode_record: symptom not in vocabulary: '" + s + "'");
        fv.values[layout.symptoms.offset +
                  static_cast<std::size_t>(it - schema.symptom_vocab.begin())] = 1.0;
    }
    return fv;
}

namespace detail {

inline std::size_t argmax(const Vector& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

}  // namespace detail

// Converts decoder distribution parameters back into a record. Argmax mode
// takes the most likely category and thresholds symptoms at 0.5; sample
// mode draws categoricals and independent Bernoullis. The age mean is
// denormalized to years and rounded to one decimal place in both modes.
// Sample-mode draw order: gender, month, then symptoms in vocabulary order.
inline PatientRecord decode_params(const DecodedParams& params, const DataSchema& schema,
                                   const std::string& diagnosis, DecodeMode mode,
                                   RandomSource& rng) {
    if (params.symptom_probs.size() != schema.symptom_vocab.size())
        throw ShapeError("decode_params: " + std::to_string(params.symptom_probs.size()) +
                         " symptom probs vs vocabulary of " +
                         std::to_string(schema.symptom_vocab.size()));
    PatientRecord rec;
    if (mode == DecodeMode::Argmax) {
        rec.gender = detail::argmax(params.gender_probs) == 0 ? Gender::Female : Gender::Male;
        rec.month = static_cast<Month>(detail::argmax(params.month_probs));
        for (std::size_t i = 0; i < params.symptom_probs.size(); ++i)
            if (params.symptom_probs[i] >= 0.5) rec.symptoms.insert(schema.symptom_vocab[i]);
    } else {
        rec.gender = rng.categorical(params.gender_probs) == 0 ? Gender::Female : Gender::Male;
        rec.month = static_cast<Month>(rng.categorical(params.month_probs));
        for (std::size_t i = 0; i < params.symptom_probs.size(); ++i)
            if (rng.bernoulli(params.symptom_probs[i]))
                rec.symptoms.insert(schema.symptom_vocab[i]);
    }
    const double age = schema.age_min + params.age_mean * (schema.age_max - schema.age_min);
    rec.age_years = std::max(0.0, std::round(age * 10.0) / 10.0);
    rec.diagnosis = diagnosis;
    return rec;
}

}  // namespace medsynth
