#include <doctest.h>

#include "vdkit/normalize.hpp"

using namespace vdkit;

TEST_CASE("codexglue collapses all whitespace runs to single spaces") {
    CHECK(normalize("a  +\tb\nc", NormalizationRule::CodexGlueCleaner) == "a + b c");
    CHECK(normalize("  leading\n\n  and   trailing  \n", NormalizationRule::CodexGlueCleaner) ==
          "leading and trailing");
}

TEST_CASE("pdbert keeps newlines, collapses spaces/tabs, trims line ends") {
    CHECK(normalize("a  +\tb\nc", NormalizationRule::PdbertCleaner) == "a + b\nc");
    CHECK(normalize("x   =  1;   \ny\t\t= 2;\t\n", NormalizationRule::PdbertCleaner) ==
          "x = 1;\ny = 2;\n");
}

TEST_CASE("no normalization is the identity") {
    const std::string code = "int  f( )\t{\n  return\t0; \n}";
    CHECK(normalize(code, NormalizationRule::NoNormalization) == code);
}

TEST_CASE("every rule is idempotent") {
    const char* snippets[] = {
        "a  +\tb\nc",
        "int f(int x) {\n\treturn  x ;\n}\n",
        "",
        "   ",
        "no_whitespace",
        "line1\r\nline2\r\n",
        "deep\n\n\n\nblank runs\n",
    };
    for (const auto rule :
         {NormalizationRule::CodexGlueCleaner, NormalizationRule::PdbertCleaner,
          NormalizationRule::NoNormalization}) {
        for (const char* s : snippets) {
            const std::string once = normalize(s, rule);
            CHECK(normalize(once, rule) == once);
        }
    }
}

TEST_CASE("rules differ on newline-bearing input") {
    const std::string code = "if (x)\n    y = 1;\n";
    const std::string codexglue = normalize(code, NormalizationRule::CodexGlueCleaner);
    const std::string pdbert = normalize(code, NormalizationRule::PdbertCleaner);
    const std::string none = normalize(code, NormalizationRule::NoNormalization);
    CHECK(codexglue != pdbert);
    CHECK(pdbert != none);
    CHECK(codexglue != none);
    CHECK(codexglue.find('\n') == std::string::npos);
    CHECK(pdbert.find('\n') != std::string::npos);
}
