#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "support/mock_endpoint.hpp"
#include "vdkit/inference.hpp"

using namespace vdkit;

namespace {

PromptBundle make_bundle(const std::string& id, const std::string& user) {
    PromptBundle b;
    b.system = kSystemRole;
    b.user = user;
    b.record_id = id;
    return b;
}

}  // namespace

TEST_CASE("verdict parsing finds the first standalone yes/no") {
    CHECK(parse_verdict("Yes, this function is vulnerable") == Verdict::Vulnerable);
    CHECK(parse_verdict("no") == Verdict::NonVulnerable);
    CHECK(parse_verdict("NO.") == Verdict::NonVulnerable);
    CHECK(parse_verdict("  \n YES") == Verdict::Vulnerable);
    CHECK(parse_verdict("I cannot determine") == Verdict::Abstain);
    CHECK(parse_verdict("") == Verdict::Abstain);
    CHECK(parse_verdict("unknown; yesterday was fine") == Verdict::Abstain);
    CHECK(parse_verdict("Answer: No, but yes in spirit") == Verdict::NonVulnerable);
    CHECK(parse_verdict("The answer is yes") == Verdict::Vulnerable);
}

TEST_CASE("scripted mock endpoint: verdicts equal the script") {
    vdtest::MockEndpoint mock([](const std::string& user) {
        if (user.find("memcpy") != std::string::npos) return "Yes";
        if (user.find("shrug") != std::string::npos) return "Hard to say.";
        return "No";
    });
    EndpointConfig config;
    config.url = mock.url();
    config.workers = 2;

    std::vector<PromptBundle> bundles = {
        make_bundle("a", "does memcpy scare you"),
        make_bundle("b", "plain code"),
        make_bundle("c", "shrug emoji"),
    };
    const auto results = run_inference(bundles, config);
    REQUIRE(results.size() == 3);
    CHECK(results[0].verdict == Verdict::Vulnerable);
    CHECK(results[1].verdict == Verdict::NonVulnerable);
    CHECK(results[2].verdict == Verdict::Abstain);
    // output order matches input order even with concurrent workers
    CHECK(results[0].record_id == "a");
    CHECK(results[1].record_id == "b");
    CHECK(results[2].record_id == "c");
}

TEST_CASE("requests carry the pinned decoding settings") {
    vdtest::MockEndpoint mock([](const std::string&) { return "No"; });
    EndpointConfig config;
    config.url = mock.url();
    config.workers = 1;
    run_inference({make_bundle("a", "x")}, config);
    const auto bodies = mock.seen_bodies();
    REQUIRE(bodies.size() == 1);
    CHECK(bodies[0].at("temperature") == 0.0);
    CHECK(bodies[0].at("top_p") == 0.9);
    CHECK(bodies[0].at("max_tokens") == 10);
}

TEST_CASE("transient failures retry with backoff and then succeed") {
    vdtest::MockEndpoint mock([](const std::string&) { return "Yes"; });
    mock.fail_first(2);
    EndpointConfig config;
    config.url = mock.url();
    config.workers = 1;
    config.backoff_ms = 1;
    const auto results = run_inference({make_bundle("a", "x")}, config);
    REQUIRE(results.size() == 1);
    CHECK(results[0].verdict == Verdict::Vulnerable);
    CHECK(results[0].attempts == 3);
}

TEST_CASE("exhausted retries raise EndpointError") {
    vdtest::MockEndpoint mock([](const std::string&) { return "Yes"; });
    mock.fail_first(1000);
    EndpointConfig config;
    config.url = mock.url();
    config.workers = 1;
    config.max_retries = 2;
    config.backoff_ms = 1;
    CHECK_THROWS_AS(run_inference({make_bundle("a", "x")}, config), EndpointError);
}

TEST_CASE("raw replies persist to the log for replay") {
    const auto log_path = std::filesystem::temp_directory_path() /
                          ("vdkit_log_" + std::to_string(::getpid()) + ".jsonl");
    {
        vdtest::MockEndpoint mock([](const std::string&) { return "Yes, definitely"; });
        EndpointConfig config;
        config.url = mock.url();
        config.workers = 1;
        config.log_path = log_path.string();
        run_inference({make_bundle("a", "x"), make_bundle("b", "y")}, config);
    }
    std::ifstream in(log_path);
    REQUIRE(in.good());
    size_t lines = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        CHECK(j.at("raw_reply") == "Yes, definitely");
        CHECK(j.contains("request"));
        ++lines;
    }
    CHECK(lines == 2);
    std::filesystem::remove(log_path);
}

TEST_CASE("endpoint config round-trips through json") {
    const nlohmann::json j = {{"url", "http://10.0.0.1:8000/v1/chat/completions"},
                              {"model", "demo"},
                              {"temperature", 0.0},
                              {"top_p", 0.9},
                              {"max_new_tokens", 10},
                              {"workers", 8}};
    const auto config = EndpointConfig::from_json(j);
    CHECK(config.url == "http://10.0.0.1:8000/v1/chat/completions");
    CHECK(config.model == "demo");
    CHECK(config.max_new_tokens == 10);
    CHECK(config.workers == 8);
}
