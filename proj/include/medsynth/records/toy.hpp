#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "medsynth/errors.hpp"
#include "medsynth/numeric/random.hpp"
#include "medsynth/records/record.hpp"

namespace medsynth {

// Sampling recipe for the toy dataset generator: independent Bernoulli
// symptoms, Bernoulli gender, categorical month, Gaussian age truncated at
// zero (resampled while negative).
struct ToySpec {
    std::string diagnosis = "ToyDisease";
    std::vector<std::pair<std::string, double>> symptoms;  // sorted by name
    double female_p = 0.5;
    std::array<double, kMonthCount> month_weights{};
    double age_mean = 30.0;
    double age_sd = 8.0;
};

inline void validate_toy_spec(const ToySpec& spec) {
    if (spec.diagnosis.empty()) throw FormatError("toy spec: empty diagnosis");
    for (const auto& [name, p] : spec.symptoms) {
        if (name.empty() || name != ascii_lower(name))
            throw FormatError("toy spec: symptom names must be nonempty lowercase");
        if (!(p >= 0.0 && p <= 1.0))
            throw FormatError("toy spec: probability for '" + name + "' outside [0,1]");
    }
    if (!(spec.female_p >= 0.0 && spec.female_p <= 1.0))
        throw FormatError("toy spec: female_p outside [0,1]");
    double weight_sum = 0.0;
    for (double w : spec.month_weights) {
        if (!(w >= 0.0)) throw FormatError("toy spec: negative month weight");
        weight_sum += w;
    }
    if (!(weight_sum > 0.0)) throw FormatError("toy spec: month weights sum to zero");
    if (!std::isfinite(spec.age_mean) || !(spec.age_sd >= 0.0))
        throw FormatError("toy spec: invalid age distribution");
}

// The distribution the bundled workflows use when no spec file is given:
// four symptoms at 0.9/0.7/0.5/0.1, balanced gender, months split 60/40
// between April and November, age ~ N(30, 8) truncated at 0.
inline ToySpec default_toy_spec() {
    ToySpec spec;
    spec.symptoms = {{"cough", 0.7}, {"fever", 0.9}, {"headache", 0.5}, {"vomiting", 0.1}};
    spec.month_weights[static_cast<std::size_t>(Month::April)] = 0.6;
    spec.month_weights[static_cast<std::size_t>(Month::November)] = 0.4;
    return spec;
}

// Draw order per record: gender, month, age (resampled while negative),
// then each symptom in sorted-name order. Ages are rounded to one decimal.
inline std::vector<PatientRecord> generate_toy_dataset(const ToySpec& spec, std::size_t n,
                                                       RandomSource& rng) {
    validate_toy_spec(spec);
    if (n < 1) throw FormatError("toy spec: need n >= 1");
    const std::vector<double> month_weights(spec.month_weights.begin(),
                                            spec.month_weights.end());
    std::vector<PatientRecord> records;
    records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        PatientRecord rec;
        rec.gender = rng.bernoulli(spec.female_p) ? Gender::Female : Gender::Male;
        rec.month = static_cast<Month>(rng.categorical(month_weights));
        double age;
        do {
            age = spec.age_mean + spec.age_sd * rng.standard_normal();
        } while (age < 0.0);
        rec.age_years = std::round(age * 10.0) / 10.0;
        for (const auto& [name, p] : spec.symptoms)
            if (rng.bernoulli(p)) rec.symptoms.insert(name);
        rec.diagnosis = spec.diagnosis;
        records.push_back(std::move(rec));
    }
    return records;
}

inline nlohmann::json toy_spec_to_json(const ToySpec& spec) {
    nlohmann::json symptoms = nlohmann::json::object();
    for (const auto& [name, p] : spec.symptoms) symptoms[name] = p;
    nlohmann::json months = nlohmann::json::object();
    for (std::size_t i = 0; i < kMonthCount; ++i)
        if (spec.month_weights[i] > 0.0) months[month_names()[i]] = spec.month_weights[i];
    return nlohmann::json{{"diagnosis", spec.diagnosis}, {"symptoms", symptoms},
                          {"female_p", spec.female_p},   {"month_weights", months},
                          {"age_mean", spec.age_mean},   {"age_sd", spec.age_sd}};
}

inline ToySpec toy_spec_from_json(const nlohmann::json& j) {
    ToySpec spec;
    try {
        spec.diagnosis = j.at("diagnosis").get<std::string>();
        for (const auto& [name, p] : j.at("symptoms").items())
            spec.symptoms.emplace_back(ascii_lower(trim(name)), p.get<double>());
        std::sort(spec.symptoms.begin(), spec.symptoms.end());
        spec.female_p = j.at("female_p").get<double>();
        spec.month_weights.fill(0.0);
        for (const auto& [name, w] : j.at("month_weights").items()) {
            const auto month = parse_month(name);
            if (!month) throw FormatError("toy spec: unknown month '" + name + "'");
            spec.month_weights[static_cast<std::size_t>(*month)] = w.get<double>();
        }
        spec.age_mean = j.at("age_mean").get<double>();
        spec.age_sd = j.at("age_sd").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("toy spec: malformed JSON: ") + e.what());
    }
    validate_toy_spec(spec);
    return spec;
}

}  // namespace medsynth
