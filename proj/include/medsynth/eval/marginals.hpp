#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "medsynth/errors.hpp"
#include "medsynth/records/record.hpp"
#include "medsynth/records/schema.hpp"

namespace medsynth {

// ---------------------------------------------------------------------------
// Simple empirical marginals for eyeballing real-vs-synthetic agreement:
// per-symptom frequencies, gender mix, month histogram, and age moments.
// ---------------------------------------------------------------------------

struct MarginalReport {
    std::size_t record_count = 0;
    std::vector<std::string> vocab;  // schema vocabulary the report was built against
    std::map<std::string, double> symptom_frequencies;
    double female_frequency = 0.0;
    double male_frequency = 0.0;
    std::array<std::size_t, kMonthCount> month_histogram{};
    double age_mean = 0.0;
    double age_std = 0.0;  // sample standard deviation (divisor n - 1)
};

inline MarginalReport marginal_report(const std::vector<PatientRecord>& records,
                                      const DataSchema& schema) {
    if (records.empty()) throw FormatError("marginal_report: no records");
    MarginalReport report;
    report.record_count = records.size();
    report.vocab = schema.symptom_vocab;

    std::map<std::string, std::size_t> symptom_counts;
    for (const auto& s : schema.symptom_vocab) symptom_counts[s] = 0;
    std::size_t female = 0;
    double age_sum = 0.0;
    for (const auto& rec : records) {
        if (rec.gender == Gender::Female) ++female;
        ++report.month_histogram[static_cast<std::size_t>(rec.month)];
        age_sum += rec.age_years;
        for (const auto& s : rec.symptoms) {
            // Symptoms outside the schema vocabulary are not reported.
            auto it = symptom_counts.find(s);
            if (it != symptom_counts.end()) ++it->second;
        }
    }

    const double n = static_cast<double>(records.size());
    for (const auto& [name, count] : symptom_counts)
        report.symptom_frequencies[name] = static_cast<double>(count) / n;
    report.female_frequency = static_cast<double>(female) / n;
    report.male_frequency = 1.0 - report.female_frequency;
    report.age_mean = age_sum / n;
    if (records.size() > 1) {
        double ss = 0.0;
        for (const auto& rec : records) {
            const double d = rec.age_years - report.age_mean;
            ss += d * d;
        }
        report.age_std = std::sqrt(ss / (n - 1.0));
    }
    return report;
}

struct MarginalDivergence {
    double max_symptom_diff = 0.0;
    double age_mean_diff = 0.0;
    double month_l1 = 0.0;  // L1 between the count-normalized histograms
};

inline MarginalDivergence compare_marginals(const MarginalReport& a,
                                            const MarginalReport& b) {
    if (a.vocab != b.vocab)
        throw FormatError("compare_marginals: reports built against different schemas");
    MarginalDivergence d;
    for (const auto& [name, freq] : a.symptom_frequencies)
        d.max_symptom_diff =
            std::max(d.max_symptom_diff, std::abs(freq - b.symptom_frequencies.at(name)));
    d.age_mean_diff = std::abs(a.age_mean - b.age_mean);
    const double na = static_cast<double>(a.record_count);
    const double nb = static_cast<double>(b.record_count);
    for (std::size_t m = 0; m < kMonthCount; ++m)
        d.month_l1 += std::abs(static_cast<double>(a.month_histogram[m]) / na -
                               static_cast<double>(b.month_histogram[m]) / nb);
    return d;
}

inline nlohmann::json marginal_report_to_json(const MarginalReport& r) {
    nlohmann::json genders{{"female", r.female_frequency}, {"male", r.male_frequency}};
    nlohmann::json months = nlohmann::json::array();
    for (std::size_t m = 0; m < kMonthCount; ++m) months.push_back(r.month_histogram[m]);
    return nlohmann::json{{"record_count", r.record_count},
                          {"vocab", r.vocab},
                          {"symptom_frequencies", r.symptom_frequencies},
                          {"gender_frequencies", genders},
                          {"month_histogram", months},  // calendar order
                          {"age_mean", r.age_mean},
                          {"age_std", r.age_std}};
}

inline nlohmann::json divergence_to_json(const MarginalDivergence& d) {
    return nlohmann::json{{"max_symptom_diff", d.max_symptom_diff},
                          {"age_mean_diff", d.age_mean_diff},
                          {"month_l1", d.month_l1}};
}

}  // namespace medsynth
