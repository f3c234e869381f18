#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "vdkit/common.hpp"

namespace vdkit {

enum class TokenKind {
    Identifier,
    Keyword,
    Number,
    String,
    CharLiteral,
    Punct,
    Preproc,   // one logical preprocessor line, kept opaque
    Comment,
};

struct Token {
    std::string text;
    ByteSpan span;
    uint32_t line = 1;  // 1-based
    TokenKind kind = TokenKind::Punct;
    // 1-based count of this token among all tokens with identical text,
    // in stream order. This is the "relative position" used by the
    // data-flow narration.
    uint32_t occurrence_index_by_name = 1;
};

struct LexOptions {
    bool include_comments = false;
};

namespace detail {

inline const std::unordered_set<std::string_view>& keyword_set() {
    static const std::unordered_set<std::string_view> kw = {
        "auto", "break", "case", "char", "const", "continue", "default", "do",
        "double", "else", "enum", "extern", "float", "for", "goto", "if",
        "inline", "int", "long", "register", "restrict", "return", "short",
        "signed", "sizeof", "static", "struct", "switch", "typedef", "union",
        "unsigned", "void", "volatile", "while",
        "_Bool", "_Complex", "_Atomic", "_Alignas", "_Alignof", "_Noreturn",
        "_Static_assert", "_Thread_local",
        // C++ subset that shows up in function-level corpora
        "bool", "true", "false", "nullptr", "new", "delete", "class",
        "namespace", "template", "typename", "operator", "this", "throw",
        "try", "catch", "using", "constexpr", "noexcept", "public",
        "private", "protected", "virtual", "override", "final", "mutable",
        "decltype", "static_cast", "dynamic_cast", "const_cast",
        "reinterpret_cast",
    };
    return kw;
}

// Multi-char punctuators, longest first within each leading char.
inline const std::vector<std::string_view>& punct_table() {
    static const std::vector<std::string_view> table = {
        "<<=", ">>=", "...", "->*", "<=>",
        "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
        "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "::", ".*", "##",
    };
    return table;
}

inline bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$';
}

inline bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9');
}

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline bool is_hspace(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

}  // namespace detail

// Splits C/C++ source into tokens. Comments are dropped unless requested;
// a preprocessor line (including backslash continuations) becomes a single
// opaque token.
inline std::vector<Token> lex(std::string_view code, LexOptions opt = {}) {
    using namespace detail;
    std::vector<Token> out;
    const size_t n = code.size();
    size_t i = 0;
    uint32_t line = 1;
    bool at_line_start = true;

    auto push = [&](size_t begin, size_t end, TokenKind kind, uint32_t tok_line) {
        Token t;
        t.text.assign(code.substr(begin, end - begin));
        t.span = {static_cast<uint32_t>(begin), static_cast<uint32_t>(end)};
        t.line = tok_line;
        t.kind = kind;
        out.push_back(std::move(t));
    };

    while (i < n) {
        const char c = code[i];
        if (c == '\n') {
            ++line;
            ++i;
            at_line_start = true;
            continue;
        }
        if (is_hspace(c)) {
            ++i;
            continue;
        }
        const size_t start = i;
        const uint32_t tok_line = line;

        // Preprocessor directive: '#' first on the line, consumed to the end
        // of the logical line.
        if (c == '#' && at_line_start) {
            ++i;
            while (i < n) {
                if (code[i] == '\\' && i + 1 < n && code[i + 1] == '\n') {
                    ++line;
                    i += 2;
                    continue;
                }
                if (code[i] == '\n') break;
                ++i;
            }
            // Trim trailing horizontal whitespace off the directive text.
            size_t end = i;
            while (end > start && is_hspace(code[end - 1])) --end;
            push(start, end, TokenKind::Preproc, tok_line);
            at_line_start = true;
            continue;
        }
        at_line_start = false;

        // Comments.
        if (c == '/' && i + 1 < n && (code[i + 1] == '/' || code[i + 1] == '*')) {
            if (code[i + 1] == '/') {
                i += 2;
                while (i < n && code[i] != '\n') ++i;
            } else {
                i += 2;
                while (i + 1 < n && !(code[i] == '*' && code[i + 1] == '/')) {
                    if (code[i] == '\n') ++line;
                    ++i;
                }
                i = (i + 1 < n) ? i + 2 : n;
            }
            if (opt.include_comments) push(start, i, TokenKind::Comment, tok_line);
            continue;
        }

        // String / char literals, with optional encoding prefix.
        if (c == '"' || c == '\'' ||
            ((c == 'L' || c == 'u' || c == 'U') && i + 1 < n &&
             (code[i + 1] == '"' || code[i + 1] == '\'')) ||
            (c == 'u' && i + 2 < n && code[i + 1] == '8' && code[i + 2] == '"')) {
            size_t j = i;
            while (j < n && code[j] != '"' && code[j] != '\'') ++j;  // skip prefix
            const char quote = code[j];
            ++j;
            while (j < n && code[j] != quote) {
                if (code[j] == '\\' && j + 1 < n) {
                    if (code[j + 1] == '\n') ++line;
                    j += 2;
                    continue;
                }
                if (code[j] == '\n') {
                    ++line;  // unterminated; keep scanning to the quote
                }
                ++j;
            }
            i = (j < n) ? j + 1 : n;
            push(start, i, quote == '"' ? TokenKind::String : TokenKind::CharLiteral, tok_line);
            continue;
        }

        // Numbers (handles hex/bin/octal/float, digit separators, suffixes,
        // and exponent signs).
        if (is_digit(c) || (c == '.' && i + 1 < n && is_digit(code[i + 1]))) {
            ++i;
            while (i < n) {
                const char d = code[i];
                if (is_ident_char(d) || d == '.' || d == '\'') {
                    ++i;
                    continue;
                }
                if ((d == '+' || d == '-') && (code[i - 1] == 'e' || code[i - 1] == 'E' ||
                                               code[i - 1] == 'p' || code[i - 1] == 'P')) {
                    ++i;
                    continue;
                }
                break;
            }
            push(start, i, TokenKind::Number, tok_line);
            continue;
        }

        // Identifiers / keywords.
        if (is_ident_start(c)) {
            ++i;
            while (i < n && is_ident_char(code[i])) ++i;
            const std::string_view word = code.substr(start, i - start);
            push(start, i, keyword_set().count(word) ? TokenKind::Keyword : TokenKind::Identifier,
                 tok_line);
            continue;
        }

        // Punctuation, longest match first.
        size_t len = 1;
        for (const auto p : punct_table()) {
            if (code.substr(i, p.size()) == p) {
                len = p.size();
                break;
            }
        }
        i += len;
        push(start, i, TokenKind::Punct, tok_line);
    }

    // Occurrence bookkeeping over the emitted stream.
    std::unordered_map<std::string_view, uint32_t> seen;
    for (auto& t : out) {
        t.occurrence_index_by_name = ++seen[std::string_view(t.text)];
    }
    return out;
}

}  // namespace vdkit
