#include <doctest.h>

#include "vdkit/prompt.hpp"

using namespace vdkit;

namespace {

SourceFunction make_fn(const std::string& id, const char* code, Label label,
                       const std::string& pair = "") {
    SourceFunction fn;
    fn.id = id;
    fn.code = code;
    fn.label = label;
    if (!pair.empty()) fn.pair_id = pair;
    return fn;
}

std::vector<SourceFunction> make_pool(size_t n_pairs) {
    std::vector<SourceFunction> pool;
    for (size_t i = 0; i < n_pairs; ++i) {
        const std::string p = "p" + std::to_string(i);
        const std::string tag = std::to_string(i);
        pool.push_back(make_fn("v" + tag,
                               ("int f" + tag + "(int a) { return a / 0; }").c_str(),
                               Label::Vulnerable, p));
        pool.push_back(make_fn("n" + tag,
                               ("int f" + tag + "(int a) { return a / 2; }").c_str(),
                               Label::NonVulnerable, p));
    }
    return pool;
}

}  // namespace

TEST_CASE("zero-shot raw code: system role plus a single user message") {
    const auto fn = make_fn("q", "int f(void){ return 7; }", Label::NonVulnerable);
    const auto bundle = build_prompt(fn, PromptType::RawCode, PromptSetting::ZeroShot);
    CHECK(bundle.system ==
          "You are a code security expert who excels at detecting vulnerabilities");
    CHECK(bundle.shots.empty());
    CHECK(bundle.user.find("Is the following function vulnerable? Please answer Yes or No.") ==
          0);
    CHECK(bundle.user.find("int f(void){ return 7; }") != std::string::npos);
    const auto msgs = bundle.messages();
    REQUIRE(msgs.size() == 2);
    CHECK(msgs[0]["role"] == "system");
    CHECK(msgs[1]["role"] == "user");
}

TEST_CASE("the bundle never truncates the target function") {
    std::string big = "int f(void) {\n";
    for (int i = 0; i < 2000; ++i) big += "    g(" + std::to_string(i) + ");\n";
    big += "    return 0;\n}\n";
    const auto fn = make_fn("big", big.c_str(), Label::NonVulnerable);
    const auto bundle = build_prompt(fn, PromptType::RawCode, PromptSetting::ZeroShot);
    CHECK(bundle.user.find(big) != std::string::npos);
}

TEST_CASE("structural prompt types append their view under a label") {
    const auto fn = make_fn("q", "void f(char *d){ memcpy(d, d, 1); }", Label::Vulnerable);
    const auto flat = build_prompt(fn, PromptType::FlatAst, PromptSetting::ZeroShot);
    CHECK(flat.user.find("Flattened AST:\n<AST#function_definition#Left>") != std::string::npos);
    const auto api = build_prompt(fn, PromptType::ApiCalls, PromptSetting::ZeroShot);
    CHECK(api.user.find("API call:\nThe program calls memcpy.") != std::string::npos);
}

TEST_CASE("a function with no edges renders No data flow in the prompt") {
    const auto fn = make_fn("q", "void f(){ a = a + 1; }", Label::NonVulnerable);
    const auto bundle = build_prompt(fn, PromptType::DataFlow, PromptSetting::ZeroShot);
    CHECK(bundle.user.find("Data flow:\nNo data flow.") != std::string::npos);
}

TEST_CASE("few-shot draws two pairs, vulnerable first, answers match labels") {
    const auto fn = make_fn("q", "int f(void){ return 7; }", Label::NonVulnerable);
    const auto pool = make_pool(5);
    const auto bundle = build_prompt(fn, PromptType::RawCode, PromptSetting::FewShot, pool, 42);
    REQUIRE(bundle.shots.size() == 4);
    CHECK(bundle.shots[0].second == "Yes");
    CHECK(bundle.shots[1].second == "No");
    CHECK(bundle.shots[2].second == "Yes");
    CHECK(bundle.shots[3].second == "No");
    const auto msgs = bundle.messages();
    CHECK(msgs.size() == 2 + 4 * 2);  // system + 4 exchanges + final user
}

TEST_CASE("few-shot is deterministic per seed") {
    const auto fn = make_fn("q", "int f(void){ return 7; }", Label::NonVulnerable);
    const auto pool = make_pool(6);
    const auto a = build_prompt(fn, PromptType::RawCode, PromptSetting::FewShot, pool, 9);
    const auto b = build_prompt(fn, PromptType::RawCode, PromptSetting::FewShot, pool, 9);
    CHECK(a.to_json() == b.to_json());
    const auto c = build_prompt(fn, PromptType::RawCode, PromptSetting::FewShot, pool, 10);
    CHECK(a.to_json() != c.to_json());
}

TEST_CASE("few-shot shots render with the query's prompt type") {
    const auto fn = make_fn("q", "int f(void){ return g(); }", Label::NonVulnerable);
    const auto pool = make_pool(2);
    const auto bundle = build_prompt(fn, PromptType::ApiCalls, PromptSetting::FewShot, pool, 1);
    for (const auto& [user, assistant] : bundle.shots) {
        CHECK(user.find("API call:") != std::string::npos);
    }
}

TEST_CASE("few-shot needs at least two complete pairs") {
    const auto fn = make_fn("q", "int f(void){ return 7; }", Label::NonVulnerable);
    CHECK_THROWS_AS(build_prompt(fn, PromptType::RawCode, PromptSetting::FewShot, {}, 1),
                    InsufficientShots);
    const auto one_pair = make_pool(1);
    CHECK_THROWS_AS(
        build_prompt(fn, PromptType::RawCode, PromptSetting::FewShot, one_pair, 1),
        InsufficientShots);
    // incomplete pairs don't count
    std::vector<SourceFunction> broken = make_pool(1);
    broken.push_back(make_fn("lonely", "int f(void){ return 1; }", Label::Vulnerable, "px"));
    CHECK_THROWS_AS(build_prompt(fn, PromptType::RawCode, PromptSetting::FewShot, broken, 1),
                    InsufficientShots);
}

TEST_CASE("bundles serialize to chat-completion message arrays and back") {
    const auto fn = make_fn("q", "int f(void){ return 7; }", Label::NonVulnerable);
    const auto pool = make_pool(3);
    const auto bundle = build_prompt(fn, PromptType::DataFlow, PromptSetting::FewShot, pool, 5);
    const auto parsed = PromptBundle::from_json(bundle.to_json());
    CHECK(parsed.system == bundle.system);
    CHECK(parsed.user == bundle.user);
    CHECK(parsed.shots == bundle.shots);
    CHECK(parsed.record_id == bundle.record_id);
    CHECK(parsed.prompt_type == bundle.prompt_type);
    CHECK(parsed.setting == bundle.setting);
}
