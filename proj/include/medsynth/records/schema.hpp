#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "medsynth/errors.hpp"
#include "medsynth/records/record.hpp"

namespace medsynth {

inline constexpr int kSchemaFormatVersion = 1;

// Column dictionary a model is trained against: the symptom vocabulary and
// the age normalization bounds. Immutable after creation.
struct DataSchema {
    std::vector<std::string> symptom_vocab;  // lexicographically sorted, unique
    double age_min = 0.0;
    double age_max = 1.0;
    int version = kSchemaFormatVersion;
};

// Vocabulary = sorted union of all symptoms. Age bounds = observed range
// widened by 5% of the span on each side, with a 1.0-year minimum span and
// a floor at 0, so boundary ages stay encodable without saturating.
inline DataSchema infer_schema(const std::vector<PatientRecord>& records) {
    if (records.empty()) throw FormatError("infer_schema: no records");
    DataSchema schema;
    double lo = records.front().age_years;
    double hi = lo;
    std::vector<std::string> vocab;
    for (const auto& r : records) {
        lo = std::min(lo, r.age_years);
        hi = std::max(hi, r.age_years);
        for (const auto& s : r.symptoms) vocab.push_back(s);
    }
    std::sort(vocab.begin(), vocab.end());
    vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
    schema.symptom_vocab = std::move(vocab);

    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    if (lo < 0.0) lo = 0.0;
    if (hi - lo < 1.0) {
        const double mid = 0.5 * (lo + hi);
        lo = mid - 0.5;
        hi = mid + 0.5;
        if (lo < 0.0) {
            hi -= lo;
            lo = 0.0;
        }
    }
    schema.age_min = lo;
    schema.age_max = hi;
    return schema;
}

// Feature groups laid out contiguously in the fixed order gender, age,
// month, symptoms. Schema-derived layouts always use group sizes
// 2 / 1 / 12 / |vocab|, total dimension 15 + |vocab|.
struct FeatureRange {
    std::size_t offset = 0;
    std::size_t length = 0;
};

struct FeatureLayout {
    FeatureRange gender;
    FeatureRange age;
    FeatureRange month;
    FeatureRange symptoms;
    std::size_t total_dim = 0;

    static FeatureLayout for_schema(const DataSchema& schema) {
        FeatureLayout layout;
        layout.gender = {0, 2};
        layout.age = {2, 1};
        layout.month = {3, kMonthCount};
        layout.symptoms = {3 + kMonthCount, schema.symptom_vocab.size()};
        layout.total_dim = layout.symptoms.offset + layout.symptoms.length;
        return layout;
    }
};

inline nlohmann::json schema_to_json(const DataSchema& schema) {
    return nlohmann::json{{"version", schema.version},
                          {"symptom_vocab", schema.symptom_vocab},
                          {"age_min", schema.age_min},
                          {"age_max", schema.age_max}};
}

inline DataSchema schema_from_json(const nlohmann::json& j) {
    DataSchema schema;
    try {
        schema.version = j.at("version").get<int>();
        schema.symptom_vocab = j.at("symptom_vocab").get<std::vector<std::string>>();
        schema.age_min = j.at("age_min").get<double>();
        schema.age_max = j.at("age_max").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("schema: malformed JSON: ") + e.what());
    }
    if (schema.version != kSchemaFormatVersion)
        throw FormatError("schema: unsupported version " + std::to_string(schema.version));
    if (!std::is_sorted(schema.symptom_vocab.begin(), schema.symptom_vocab.end()) ||
        std::adjacent_find(schema.symptom_vocab.begin(), schema.symptom_vocab.end()) !=
            schema.symptom_vocab.end())
        throw FormatError("schema: symptom_vocab must be sorted and duplicate-free");
    if (!(schema.age_min >= 0.0) || !(schema.age_max > schema.age_min))
        throw FormatError("schema: need 0 <= age_min < age_max");
    return schema;
}

}  // namespace medsynth
