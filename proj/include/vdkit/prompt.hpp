#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vdkit/common.hpp"
#include "vdkit/rng.hpp"
#include "vdkit/source_function.hpp"
#include "vdkit/views.hpp"

namespace vdkit {

enum class PromptType { RawCode, FlatAst, ApiCalls, DataFlow };
enum class PromptSetting { ZeroShot, FewShot };

inline const char* to_string(PromptType t) {
    switch (t) {
        case PromptType::RawCode: return "raw_code";
        case PromptType::FlatAst: return "flat_ast";
        case PromptType::ApiCalls: return "api_calls";
        case PromptType::DataFlow: return "data_flow";
    }
    return "?";
}

inline std::optional<PromptType> prompt_type_from_string(std::string_view s) {
    if (s == "raw_code" || s == "raw") return PromptType::RawCode;
    if (s == "flat_ast" || s == "ast") return PromptType::FlatAst;
    if (s == "api_calls" || s == "api") return PromptType::ApiCalls;
    if (s == "data_flow" || s == "flow") return PromptType::DataFlow;
    return std::nullopt;
}

inline const char* to_string(PromptSetting s) {
    return s == PromptSetting::ZeroShot ? "zero_shot" : "few_shot";
}

inline std::optional<PromptSetting> prompt_setting_from_string(std::string_view s) {
    if (s == "zero_shot" || s == "zero" || s == "0-shot") return PromptSetting::ZeroShot;
    if (s == "few_shot" || s == "few" || s == "icl") return PromptSetting::FewShot;
    return std::nullopt;
}

inline constexpr const char* kSystemRole =
    "You are a code security expert who excels at detecting vulnerabilities";
inline constexpr const char* kQuestion =
    "Is the following function vulnerable? Please answer Yes or No.";

// Role-tagged chat messages; model-specific chat templating belongs to the
// serving endpoint, not here.
struct PromptBundle {
    std::string system;
    std::vector<std::pair<std::string, std::string>> shots;  // (user, assistant)
    std::string user;
    PromptType prompt_type = PromptType::RawCode;
    PromptSetting setting = PromptSetting::ZeroShot;
    std::string record_id;

    nlohmann::json messages() const {
        nlohmann::json msgs = nlohmann::json::array();
        msgs.push_back({{"role", "system"}, {"content", system}});
        for (const auto& [shot_user, shot_assistant] : shots) {
            msgs.push_back({{"role", "user"}, {"content", shot_user}});
            msgs.push_back({{"role", "assistant"}, {"content", shot_assistant}});
        }
        msgs.push_back({{"role", "user"}, {"content", user}});
        return msgs;
    }

    nlohmann::json to_json() const {
        return {{"record_id", record_id},
                {"prompt_type", to_string(prompt_type)},
                {"setting", to_string(setting)},
                {"messages", messages()}};
    }

    static PromptBundle from_json(const nlohmann::json& j) {
        PromptBundle b;
        b.record_id = j.value("record_id", std::string());
        if (auto t = prompt_type_from_string(j.value("prompt_type", "raw_code"))) {
            b.prompt_type = *t;
        }
        if (auto s = prompt_setting_from_string(j.value("setting", "zero_shot"))) {
            b.setting = *s;
        }
        const auto& msgs = j.at("messages");
        std::optional<std::string> pending_user;
        for (const auto& m : msgs) {
            const std::string role = m.at("role").get<std::string>();
            const std::string content = m.at("content").get<std::string>();
            if (role == "system") {
                b.system = content;
            } else if (role == "user") {
                if (pending_user) b.user = *pending_user;  // only the last stays
                pending_user = content;
            } else if (role == "assistant") {
                if (pending_user) {
                    b.shots.emplace_back(*pending_user, content);
                    pending_user.reset();
                }
            }
        }
        if (pending_user) b.user = *pending_user;
        return b;
    }
};

// The question, the function, and (for the structural types) the
// corresponding view appended under its label.
inline std::string render_user_content(const SourceFunction& fn, PromptType type) {
    std::string content = std::string(kQuestion) + "\n" + fn.code;
    if (type == PromptType::RawCode) return content;
    const SyntaxTree tree = parse_function(fn);
    switch (type) {
        case PromptType::FlatAst:
            content += "\n\nFlattened AST:\n" + flatten_ast(tree).text;
            break;
        case PromptType::ApiCalls:
            content += "\n\nAPI call:\n" + api_call_view(tree);
            break;
        case PromptType::DataFlow: {
            const auto toks = lex(fn.code);
            content += "\n\nData flow:\n" + data_flow_view(tree, toks).second;
            break;
        }
        case PromptType::RawCode:
            break;
    }
    return content;
}

// Complete patch pairs available as few-shot material, in first-appearance
// order: (vulnerable, non-vulnerable).
inline std::vector<std::pair<const SourceFunction*, const SourceFunction*>> complete_pairs(
    const std::vector<SourceFunction>& pool) {
    std::vector<std::pair<const SourceFunction*, const SourceFunction*>> out;
    std::map<std::string, std::pair<const SourceFunction*, const SourceFunction*>> partial;
    std::vector<std::string> order;
    for (const auto& r : pool) {
        if (!r.pair_id) continue;
        auto [it, inserted] = partial.try_emplace(*r.pair_id);
        if (inserted) order.push_back(*r.pair_id);
        (r.vulnerable() ? it->second.first : it->second.second) = &r;
    }
    for (const auto& pair_id : order) {
        const auto& [vuln, nonvuln] = partial[pair_id];
        if (vuln && nonvuln) out.emplace_back(vuln, nonvuln);
    }
    return out;
}

// Zero-shot: system + question. Few-shot: 4 shots from 2 seeded-random patch
// pairs, vulnerable first within each pair, every shot rendered with the
// query's prompt type and answered "Yes"/"No" per its label.
inline PromptBundle build_prompt(const SourceFunction& fn, PromptType type,
                                 PromptSetting setting,
                                 const std::vector<SourceFunction>& train_pool = {},
                                 uint64_t seed = 0) {
    PromptBundle bundle;
    bundle.system = kSystemRole;
    bundle.prompt_type = type;
    bundle.setting = setting;
    bundle.record_id = fn.id;
    bundle.user = render_user_content(fn, type);

    if (setting == PromptSetting::FewShot) {
        const auto pairs = complete_pairs(train_pool);
        if (pairs.size() < 2) {
            throw InsufficientShots("few-shot prompting needs >= 2 complete pairs; have " +
                                    std::to_string(pairs.size()));
        }
        SplitMix64 rng(seed);
        const auto picks = sample_without_replacement(pairs.size(), 2, rng);
        for (const size_t i : picks) {
            const auto& [vuln, nonvuln] = pairs[i];
            bundle.shots.emplace_back(render_user_content(*vuln, type), "Yes");
            bundle.shots.emplace_back(render_user_content(*nonvuln, type), "No");
        }
    }
    return bundle;
}

}  // namespace vdkit
