#pragma once

#include <string>
#include <string_view>

#include "vdkit/common.hpp"

namespace vdkit {

enum class NormalizationRule {
    CodexGlueCleaner,  // collapse every whitespace run (incl. newlines) to one space
    PdbertCleaner,     // collapse spaces/tabs, keep newlines, trim line ends
    NoNormalization,
};

inline const char* to_string(NormalizationRule rule) {
    switch (rule) {
        case NormalizationRule::CodexGlueCleaner: return "codexglue";
        case NormalizationRule::PdbertCleaner: return "pdbert";
        case NormalizationRule::NoNormalization: return "none";
    }
    return "none";
}

namespace detail {

inline bool is_space_any(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

inline bool is_space_horizontal(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

inline std::string codexglue_clean(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending = false;
    for (const char c : text) {
        if (is_space_any(c)) {
            pending = !out.empty();
            continue;
        }
        if (pending) out += ' ';
        pending = false;
        out += c;
    }
    return out;
}

inline std::string pdbert_clean(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) {
        size_t eol = text.find('\n', i);
        const bool has_newline = eol != std::string_view::npos;
        if (!has_newline) eol = text.size();
        std::string_view line = text.substr(i, eol - i);
        // trim trailing horizontal whitespace
        size_t end = line.size();
        while (end > 0 && is_space_horizontal(line[end - 1])) --end;
        bool pending = false;
        for (size_t k = 0; k < end; ++k) {
            const char c = line[k];
            if (is_space_horizontal(c)) {
                pending = true;
                continue;
            }
            if (pending) out += ' ';
            pending = false;
            out += c;
        }
        if (has_newline) out += '\n';
        i = eol + 1;
    }
    return out;
}

}  // namespace detail

// Total on any text; identity for NoNormalization, idempotent for all rules.
inline std::string normalize(std::string_view code, NormalizationRule rule) {
    switch (rule) {
        case NormalizationRule::CodexGlueCleaner: return detail::codexglue_clean(code);
        case NormalizationRule::PdbertCleaner: return detail::pdbert_clean(code);
        case NormalizationRule::NoNormalization: return std::string(code);
    }
    return std::string(code);
}

}  // namespace vdkit
