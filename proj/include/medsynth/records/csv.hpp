#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "medsynth/errors.hpp"
#include "medsynth/records/record.hpp"

namespace medsynth {

inline constexpr std::string_view kCsvHeader = "gender,age,month,symptoms,diagnosis";

struct ParseResult {
    std::vector<PatientRecord> records;
    std::vector<std::string> issues;  // "line N: <problem>" per skipped row
};

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.emplace_back(s.substr(start));
            return parts;
        }
        parts.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

inline bool parse_double(const std::string& text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

}  // namespace detail

// Parses the record CSV. The header gender,age,month,symptoms,diagnosis is
// required (fatal on mismatch). Symptom cells are |-separated, trimmed,
// lowercased and deduplicated. Malformed rows are skipped and reported with
// their line numbers; bad rows never abort the parse.
inline ParseResult parse_records(std::string_view csv_text) {
    // Tolerate a UTF-8 BOM and CRLF line endings.
    if (csv_text.substr(0, 3) == "\xEF\xBB\xBF") csv_text.remove_prefix(3);

    ParseResult result;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos <= csv_text.size()) {
        const std::size_t nl = csv_text.find('\n', pos);
        std::string_view line = csv_text.substr(
            pos, nl == std::string_view::npos ? csv_text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? csv_text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        if (!header_seen) {
            if (trim(line).empty()) continue;
            if (trim(line) != kCsvHeader)
                throw FormatError("csv: expected header '" + std::string(kCsvHeader) +
                                  "', got '" + trim(line) + "'");
            header_seen = true;
            continue;
        }
        if (trim(line).empty()) continue;

        const auto cells = detail::split(line, ',');
        const std::string where = "line " + std::to_string(line_no);
        if (cells.size() != 5) {
            result.issues.push_back(where + ": expected 5 fields, got " +
                                    std::to_string(cells.size()));
            continue;
        }
        PatientRecord rec;
        const auto gender = parse_gender(cells[0]);
        if (!gender) {
            result.issues.push_back(where + ": unknown gender '" + trim(cells[0]) + "'");
            continue;
        }
        rec.gender = *gender;
        double age = 0.0;
        if (!detail::parse_double(cells[1], age) || !std::isfinite(age) || age < 0.0) {
            result.issues.push_back(where + ": invalid age '" + trim(cells[1]) + "'");
            continue;
        }
        rec.age_years = age;
        const auto month = parse_month(cells[2]);
        if (!month) {
            result.issues.push_back(where + ": unknown month '" + trim(cells[2]) + "'");
            continue;
        }
        rec.month = *month;
        for (const auto& raw : detail::split(cells[3], '|')) {
            const std::string symptom = ascii_lower(trim(raw));
            if (!symptom.empty()) rec.symptoms.insert(symptom);
        }
        rec.diagnosis = trim(cells[4]);
        if (rec.diagnosis.empty()) {
            result.issues.push_back(where + ": empty diagnosis");
            continue;
        }
        result.records.push_back(std::move(rec));
    }
    if (!header_seen)
        throw FormatError("csv: missing header '" + std::string(kCsvHeader) + "'");
    return result;
}

// Ages are written with one decimal, matching generated-record formatting.
inline std::string write_records(const std::vector<PatientRecord>& records) {
    std::string out(kCsvHeader);
    out += '\n';
    char age_buf[32];
    for (const auto& r : records) {
        std::snprintf(age_buf, sizeof(age_buf), "%.1f", r.age_years);
        out += to_string(r.gender);
        out += ',';
        out += age_buf;
        out += ',';
        out += to_string(r.month);
        out += ',';
        bool first = true;
        for (const auto& s : r.symptoms) {
            if (!first) out += '|';
            out += s;
            first = false;
        }
        out += ',';
        out += r.diagnosis;
        out += '\n';
    }
    return out;
}

// Stable partition: input order is preserved within each group; keys are
// the diagnosis strings after trimming.
inline std::map<std::string, std::vector<PatientRecord>> partition_by_diagnosis(
    const std::vector<PatientRecord>& records) {
    std::map<std::string, std::vector<PatientRecord>> groups;
    for (const auto& r : records) groups[trim(r.diagnosis)].push_back(r);
    return groups;
}

}  // namespace medsynth
