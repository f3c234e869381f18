#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support/generators.hpp"
#include "vdkit/vdkit.hpp"

#ifndef VDKIT_BIN
#define VDKIT_BIN "vdkit"
#endif

using namespace vdkit;

namespace {

namespace fs = std::filesystem;

struct CliWorkdir {
    fs::path dir;
    CliWorkdir() {
        dir = fs::temp_directory_path() / ("vdkit_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~CliWorkdir() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(VDKIT_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("cli pipeline equals in-process library composition") {
    CliWorkdir wd;
    vdtest::CorpusSpec spec;
    spec.target_records = 60;
    spec.seed = 5;
    const auto records = vdtest::make_synthetic_corpus(spec);
    write_corpus(wd.path("in.jsonl"), records);

    SUBCASE("split") {
        REQUIRE(run_cli("split " + wd.path("in.jsonl") + " -o " + wd.path("splits.json") +
                        " --ratios 8:1:1") == 0);
        const auto from_cli =
            SplitAssignment::from_json(nlohmann::json::parse(slurp(wd.path("splits.json"))));
        const auto from_lib = split_by_cwe_time(records);
        CHECK(from_cli.by_id == from_lib.by_id);
    }

    SUBCASE("normalize golden equality") {
        REQUIRE(run_cli("normalize " + wd.path("in.jsonl") + " -o " + wd.path("norm.jsonl") +
                        " --rule codexglue") == 0);
        const auto out = read_corpus(wd.path("norm.jsonl"));
        REQUIRE(out.size() == records.size());
        for (size_t i = 0; i < out.size(); ++i) {
            CHECK(out[i].code == normalize(records[i].code,
                                           NormalizationRule::CodexGlueCleaner));
        }
    }

    SUBCASE("transform golden equality") {
        REQUIRE(run_cli("transform " + wd.path("in.jsonl") + " -o " + wd.path("var.jsonl") +
                        " --kind all --workers 3") == 0);
        size_t expected = 0;
        for (const auto& r : records) {
            expected += generate_variants(r, all_transform_kinds()).size();
        }
        size_t lines = 0;
        std::ifstream in(wd.path("var.jsonl"));
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto j = nlohmann::json::parse(line);
            CHECK(j.contains("transform_kind"));
            CHECK(j.contains("site_index"));
            CHECK(j.contains("origin_id"));
            ++lines;
        }
        CHECK(lines == expected);
    }

    SUBCASE("views attach the three fields") {
        REQUIRE(run_cli("views " + wd.path("in.jsonl") + " -o " + wd.path("views.jsonl")) == 0);
        std::ifstream in(wd.path("views.jsonl"));
        std::string line;
        std::getline(in, line);
        const auto j = nlohmann::json::parse(line);
        CHECK(j.contains("view_flat_ast"));
        CHECK(j.contains("view_api_calls"));
        CHECK(j.contains("view_data_flow"));
    }
}

TEST_CASE("audit exits nonzero on a leaky split") {
    CliWorkdir wd;
    std::vector<SourceFunction> records;
    for (int i = 0; i < 2; ++i) {
        SourceFunction fn;
        fn.id = i == 0 ? "vuln" : "fixed";
        fn.code = "int f(int a) { return a + " + std::to_string(i) + "; }";
        fn.label = i == 0 ? Label::Vulnerable : Label::NonVulnerable;
        fn.commit_id = "c1";
        fn.commit_date = "2024-01-01";
        fn.pair_id = "p1";
        records.push_back(fn);
    }
    write_corpus(wd.path("in.jsonl"), records);
    {
        std::ofstream out(wd.path("splits.json"));
        out << R"({"assignments":{"vuln":"test","fixed":"train"}})";
    }
    CHECK(run_cli("audit " + wd.path("splits.json") + " " + wd.path("in.jsonl") + " -o " +
                  wd.path("audit.json")) == 1);
    const auto report = nlohmann::json::parse(slurp(wd.path("audit.json")));
    CHECK(report.at("case1_violations").size() == 1);
    CHECK(report.at("passes") == false);
}

TEST_CASE("cli subcommands are idempotent on identical inputs and seeds") {
    CliWorkdir wd;
    vdtest::CorpusSpec spec;
    spec.target_records = 30;
    spec.seed = 3;
    write_corpus(wd.path("in.jsonl"), vdtest::make_synthetic_corpus(spec));

    REQUIRE(run_cli("split " + wd.path("in.jsonl") + " -o " + wd.path("s1.json")) == 0);
    REQUIRE(run_cli("split " + wd.path("in.jsonl") + " -o " + wd.path("s2.json")) == 0);
    CHECK(slurp(wd.path("s1.json")) == slurp(wd.path("s2.json")));

    REQUIRE(run_cli("balance " + wd.path("s1.json") + " " + wd.path("in.jsonl") + " -o " +
                    wd.path("b1.json") + " --seed 11") == 0);
    REQUIRE(run_cli("balance " + wd.path("s1.json") + " " + wd.path("in.jsonl") + " -o " +
                    wd.path("b2.json") + " --seed 11") == 0);
    CHECK(slurp(wd.path("b1.json")) == slurp(wd.path("b2.json")));

    REQUIRE(run_cli("prompt " + wd.path("in.jsonl") + " -o " + wd.path("p1.jsonl") +
                    " --type flat_ast --setting zero_shot") == 0);
    REQUIRE(run_cli("prompt " + wd.path("in.jsonl") + " -o " + wd.path("p2.jsonl") +
                    " --type flat_ast --setting zero_shot") == 0);
    CHECK(slurp(wd.path("p1.jsonl")) == slurp(wd.path("p2.jsonl")));
}

TEST_CASE("usage errors exit nonzero") {
    CHECK(run_cli("split") != 0);
    CHECK(run_cli("no_such_command") != 0);
    CHECK(run_cli("transform missing.jsonl -o x.jsonl --kind bogus") != 0);
}

TEST_CASE("slice subcommand honors the budget flag") {
    CliWorkdir wd;
    std::vector<SourceFunction> records;
    SourceFunction fn;
    fn.id = "s1";
    fn.code =
        "int f(int n) {\n    int a = 0;\n    int b = n;\n    a = b + 1;\n    return a;\n}\n";
    fn.label = Label::NonVulnerable;
    fn.commit_date = "2024-01-01";
    records.push_back(fn);
    write_corpus(wd.path("in.jsonl"), records);
    REQUIRE(run_cli("slice " + wd.path("in.jsonl") + " -o " + wd.path("out.jsonl") +
                    " --budget 16") == 0);
    std::ifstream in(wd.path("out.jsonl"));
    std::string line;
    std::getline(in, line);
    const auto j = nlohmann::json::parse(line);
    REQUIRE(j.contains("slice_token_count"));
    CHECK(j.at("slice_token_count").get<size_t>() <= 16);
    CHECK(j.at("slice_budget") == 16);
}
