#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vdkit/common.hpp"
#include "vdkit/parser.hpp"

namespace vdkit {

enum class Label { Vulnerable, NonVulnerable };

// One C/C++ function record in the corpus format: line-delimited JSON with
// the fields below. Unknown fields ride along in `extra` and survive
// round-trips untouched.
struct SourceFunction {
    std::string id;
    std::string code;
    Language language = Language::C;
    std::string project;
    std::string commit_id;
    std::string commit_date;  // ISO-8601 calendar date, e.g. "2024-03-17"
    std::vector<std::string> cwe_ids;
    Label label = Label::NonVulnerable;
    std::optional<std::string> pair_id;
    nlohmann::json extra = nlohmann::json::object();

    bool vulnerable() const { return label == Label::Vulnerable; }

    // Grouping key for CWE-based partitioning: first listed CWE, or "NONE".
    std::string primary_cwe() const { return cwe_ids.empty() ? "NONE" : cwe_ids.front(); }
};

inline bool is_valid_iso_date(std::string_view s) {
    // Accepts YYYY-MM-DD, optionally followed by a time suffix ("T..." or " ...").
    if (s.size() < 10) return false;
    for (const size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (s[i] < '0' || s[i] > '9') return false;
    }
    if (s[4] != '-' || s[7] != '-') return false;
    const int month = (s[5] - '0') * 10 + (s[6] - '0');
    const int day = (s[8] - '0') * 10 + (s[9] - '0');
    if (month < 1 || month > 12 || day < 1 || day > 31) return false;
    if (s.size() == 10) return true;
    return s[10] == 'T' || s[10] == ' ';
}

inline const char* to_string(Language lang) {
    return lang == Language::C ? "C" : "CPP";
}

inline const char* to_string(Label label) {
    return label == Label::Vulnerable ? "vulnerable" : "non-vulnerable";
}

namespace detail {

inline Language parse_language(const nlohmann::json& v) {
    if (!v.is_string()) throw FormatError("'language' must be a string");
    std::string s = v.get<std::string>();
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "c") return Language::C;
    if (s == "cpp" || s == "c++" || s == "cxx" || s == "cc") return Language::Cpp;
    throw FormatError("unknown language '" + v.get<std::string>() + "'");
}

inline Label parse_label(const nlohmann::json& v) {
    if (v.is_number_integer()) {
        const auto n = v.get<int64_t>();
        if (n == 0) return Label::NonVulnerable;
        if (n == 1) return Label::Vulnerable;
        throw FormatError("'label' integer must be 0 or 1");
    }
    if (v.is_boolean()) return v.get<bool>() ? Label::Vulnerable : Label::NonVulnerable;
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (s == "vulnerable" || s == "1") return Label::Vulnerable;
        if (s == "non-vulnerable" || s == "nonvulnerable" || s == "0") {
            return Label::NonVulnerable;
        }
    }
    throw FormatError("'label' must be 0/1 or vulnerable/non-vulnerable");
}

}  // namespace detail

// Field-level decode; throws FormatError on schema violations. Parseability
// and pair consistency are ingest-level checks, not done here.
inline SourceFunction record_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw FormatError("record is not a JSON object");
    SourceFunction fn;
    for (const char* field : {"id", "code", "label"}) {
        if (!j.contains(field)) throw FormatError(std::string("missing field '") + field + "'");
    }
    if (!j.at("id").is_string()) throw FormatError("'id' must be a string");
    fn.id = j.at("id").get<std::string>();
    if (!j.at("code").is_string()) throw FormatError("'code' must be a string");
    fn.code = j.at("code").get<std::string>();
    fn.label = detail::parse_label(j.at("label"));
    if (j.contains("language")) fn.language = detail::parse_language(j.at("language"));
    if (j.contains("project") && j.at("project").is_string()) {
        fn.project = j.at("project").get<std::string>();
    }
    if (j.contains("commit_id") && j.at("commit_id").is_string()) {
        fn.commit_id = j.at("commit_id").get<std::string>();
    }
    if (j.contains("commit_date")) {
        if (!j.at("commit_date").is_string()) throw FormatError("'commit_date' must be a string");
        fn.commit_date = j.at("commit_date").get<std::string>();
        if (!is_valid_iso_date(fn.commit_date)) {
            throw FormatError("'commit_date' is not an ISO-8601 date: " + fn.commit_date);
        }
    }
    if (j.contains("cwe_ids")) {
        const auto& c = j.at("cwe_ids");
        if (c.is_string()) {
            fn.cwe_ids.push_back(c.get<std::string>());
        } else if (c.is_array()) {
            for (const auto& e : c) {
                if (!e.is_string()) throw FormatError("'cwe_ids' entries must be strings");
                fn.cwe_ids.push_back(e.get<std::string>());
            }
        } else if (!c.is_null()) {
            throw FormatError("'cwe_ids' must be an array of strings");
        }
    }
    if (j.contains("pair_id") && !j.at("pair_id").is_null()) {
        if (!j.at("pair_id").is_string()) throw FormatError("'pair_id' must be a string");
        fn.pair_id = j.at("pair_id").get<std::string>();
    }
    static const std::vector<std::string> known = {
        "id", "code", "language", "project", "commit_id",
        "commit_date", "cwe_ids", "label", "pair_id",
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            fn.extra[it.key()] = it.value();
        }
    }
    return fn;
}

inline nlohmann::json record_to_json(const SourceFunction& fn) {
    nlohmann::json j = fn.extra;
    j["id"] = fn.id;
    j["code"] = fn.code;
    j["language"] = to_string(fn.language);
    j["project"] = fn.project;
    j["commit_id"] = fn.commit_id;
    j["commit_date"] = fn.commit_date;
    j["cwe_ids"] = fn.cwe_ids;
    j["label"] = fn.label == Label::Vulnerable ? 1 : 0;
    if (fn.pair_id) {
        j["pair_id"] = *fn.pair_id;
    } else {
        j["pair_id"] = nullptr;
    }
    return j;
}

// Strict reader: any malformed line throws. Use dataset::ingest for the
// tolerant, report-producing path.
inline std::vector<SourceFunction> read_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FatalIo("cannot open corpus file: " + path);
    std::vector<SourceFunction> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(record_from_json(j));
    }
    return out;
}

inline void write_corpus(const std::string& path, const std::vector<SourceFunction>& records) {
    std::ofstream out(path);
    if (!out) throw FatalIo("cannot open output file: " + path);
    for (const auto& fn : records) {
        out << record_to_json(fn).dump() << "\n";
    }
    if (!out) throw FatalIo("write failed: " + path);
}

inline SyntaxTree parse_function(const SourceFunction& fn) {
    if (fn.code.empty()) throw ParseFailure("record '" + fn.id + "' has empty code");
    return parse_function(fn.code, ParseOptions{fn.language});
}

inline std::vector<Token> tokenize(const SourceFunction& fn, LexOptions opt = {}) {
    if (!is_valid_utf8(fn.code)) {
        throw EncodingError("record '" + fn.id + "' is not valid UTF-8");
    }
    return lex(fn.code, opt);
}

}  // namespace vdkit
