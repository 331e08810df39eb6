#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "medsynth/errors.hpp"

namespace medsynth {

enum class Gender { Female, Male };

enum class Month {
    January, February, March, April, May, June,
    July, August, September, October, November, December
};

inline constexpr std::size_t kMonthCount = 12;

inline const std::array<std::string, kMonthCount>& month_names() {
    static const std::array<std::string, kMonthCount> names = {
        "January", "February", "March",     "April",   "May",      "June",
        "July",    "August",   "September", "October", "November", "December"};
    return names;
}

inline std::string to_string(Month m) { return month_names()[static_cast<std::size_t>(m)]; }

inline std::string to_string(Gender g) { return g == Gender::Female ? "Female" : "Male"; }

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::optional<Month> parse_month(std::string_view text) {
    const std::string lowered = ascii_lower(trim(text));
    for (std::size_t i = 0; i < kMonthCount; ++i)
        if (lowered == ascii_lower(month_names()[i])) return static_cast<Month>(i);
    return std::nullopt;
}

inline std::optional<Gender> parse_gender(std::string_view text) {
    const std::string lowered = ascii_lower(trim(text));
    if (lowered == "female") return Gender::Female;
    if (lowered == "male") return Gender::Male;
    return std::nullopt;
}

// One patient visit. Symptoms are lowercase, deduplicated, never empty
// strings; age may be fractional (0.5 for infants).
struct PatientRecord {
    Gender gender = Gender::Female;
    double age_years = 0.0;
    Month month = Month::January;
    std::set<std::string> symptoms;
    std::string diagnosis;
};

inline void validate_record(const PatientRecord& r) {
    if (!(r.age_years >= 0.0) || !std::isfinite(r.age_years))
        throw FormatError("record: age must be finite and non-negative");
    if (r.diagnosis.empty()) throw FormatError("record: empty diagnosis");
    for (const auto& s : r.symptoms) {
        if (s.empty()) throw FormatError("record: empty symptom string");
        if (s != ascii_lower(s)) throw FormatError("record: symptom not lowercase: " + s);
    }
}

}  // namespace medsynth
