#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vdkit {

// Half-open byte range into a source buffer.
struct ByteSpan {
    uint32_t begin = 0;
    uint32_t end = 0;

    uint32_t size() const { return end - begin; }
    bool contains(const ByteSpan& other) const {
        return begin <= other.begin && other.end <= end;
    }
    bool operator==(const ByteSpan&) const = default;
};

inline std::string_view slice(std::string_view text, ByteSpan span) {
    return text.substr(span.begin, span.end - span.begin);
}

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EncodingError : Error {
    using Error::Error;
};

struct ParseFailure : Error {
    using Error::Error;
};

struct IneligibleSite : Error {
    using Error::Error;
};

// Internal bug guard: a rewrite emitted text that no longer parses.
struct RewriteProducedParseError : Error {
    using Error::Error;
};

struct EmptySlice : Error {
    using Error::Error;
};

struct FormatError : Error {
    using Error::Error;
};

struct FatalIo : Error {
    using Error::Error;
};

struct MissingDate : Error {
    using Error::Error;
};

struct InsufficientShots : Error {
    using Error::Error;
};

struct EndpointError : Error {
    using Error::Error;
};

struct AuthError : Error {
    using Error::Error;
};

struct EmptyInput : Error {
    using Error::Error;
};

// True iff `text` is well-formed UTF-8.
inline bool is_valid_utf8(std::string_view text) {
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        const auto c = static_cast<unsigned char>(text[i]);
        size_t extra = 0;
        if (c < 0x80) {
            i += 1;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            if (c < 0xC2) return false;  // overlong
            extra = 1;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
        } else if ((c & 0xF8) == 0xF0) {
            if (c > 0xF4) return false;  // > U+10FFFF
            extra = 3;
        } else {
            return false;
        }
        if (i + extra >= n) return false;
        for (size_t k = 1; k <= extra; ++k) {
            if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) return false;
        }
        // Reject surrogates and a few overlong forms.
        if (extra == 2) {
            const auto c1 = static_cast<unsigned char>(text[i + 1]);
            if (c == 0xE0 && c1 < 0xA0) return false;
            if (c == 0xED && c1 >= 0xA0) return false;
        } else if (extra == 3) {
            const auto c1 = static_cast<unsigned char>(text[i + 1]);
            if (c == 0xF0 && c1 < 0x90) return false;
            if (c == 0xF4 && c1 >= 0x90) return false;
        }
        i += extra + 1;
    }
    return true;
}

// English ordinal: 1 -> "1st", 2 -> "2nd", 11 -> "11th", 23 -> "23rd".
inline std::string ordinal(uint32_t n) {
    const uint32_t mod100 = n % 100;
    const uint32_t mod10 = n % 10;
    const char* suffix = "th";
    if (mod100 < 11 || mod100 > 13) {
        if (mod10 == 1) suffix = "st";
        else if (mod10 == 2) suffix = "nd";
        else if (mod10 == 3) suffix = "rd";
    }
    return std::to_string(n) + suffix;
}

// FNV-1a, used for content hashing in the duplicate audits. Stable across
// platforms, unlike std::hash.
inline uint64_t fnv1a64(std::string_view text) {
    uint64_t h = 1469598103934665603ull;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace vdkit
