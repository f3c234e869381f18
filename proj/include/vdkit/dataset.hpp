#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "vdkit/common.hpp"
#include "vdkit/normalize.hpp"
#include "vdkit/parser.hpp"
#include "vdkit/rng.hpp"
#include "vdkit/slice.hpp"
#include "vdkit/source_function.hpp"

namespace vdkit {

enum class Split { Train, Valid, Test };

inline const char* to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Valid: return "valid";
        case Split::Test: return "test";
    }
    return "?";
}

inline std::optional<Split> split_from_string(std::string_view s) {
    if (s == "train") return Split::Train;
    if (s == "valid" || s == "validation" || s == "dev") return Split::Valid;
    if (s == "test") return Split::Test;
    return std::nullopt;
}

struct SplitRatios {
    int train = 8, valid = 1, test = 1;  // tenths; must sum to 10
};

// Total assignment: every accepted record lands in exactly one split.
struct SplitAssignment {
    std::map<std::string, Split> by_id;

    std::optional<Split> lookup(const std::string& id) const {
        auto it = by_id.find(id);
        if (it == by_id.end()) return std::nullopt;
        return it->second;
    }

    size_t count(Split s) const {
        size_t n = 0;
        for (const auto& [id, split] : by_id) {
            if (split == s) ++n;
        }
        return n;
    }

    nlohmann::json to_json() const {
        nlohmann::json assignments = nlohmann::json::object();
        for (const auto& [id, split] : by_id) assignments[id] = to_string(split);
        nlohmann::json j;
        j["assignments"] = std::move(assignments);
        j["counts"] = {{"train", count(Split::Train)},
                       {"valid", count(Split::Valid)},
                       {"test", count(Split::Test)}};
        return j;
    }

    static SplitAssignment from_json(const nlohmann::json& j) {
        SplitAssignment a;
        const nlohmann::json& m = j.contains("assignments") ? j.at("assignments") : j;
        if (!m.is_object()) throw FormatError("split assignment must be a JSON object");
        for (auto it = m.begin(); it != m.end(); ++it) {
            const auto split = split_from_string(it.value().get<std::string>());
            if (!split) throw FormatError("unknown split '" + it.value().get<std::string>() + "'");
            a.by_id[it.key()] = *split;
        }
        return a;
    }
};

// ---- ingestion -----------------------------------------------------------

enum class RejectReason {
    BadJson,
    BadSchema,
    EmptyCode,
    InvalidUtf8,
    UnparsableFunction,
    BadDate,
    DuplicateId,
    PairLabelConflict,
    PairTooLarge,
};

inline const char* to_string(RejectReason r) {
    switch (r) {
        case RejectReason::BadJson: return "bad_json";
        case RejectReason::BadSchema: return "bad_schema";
        case RejectReason::EmptyCode: return "empty_code";
        case RejectReason::InvalidUtf8: return "invalid_utf8";
        case RejectReason::UnparsableFunction: return "unparsable_function";
        case RejectReason::BadDate: return "bad_date";
        case RejectReason::DuplicateId: return "duplicate_id";
        case RejectReason::PairLabelConflict: return "pair_label_conflict";
        case RejectReason::PairTooLarge: return "pair_too_large";
    }
    return "?";
}

struct IngestReport {
    struct Rejection {
        size_t line = 0;
        std::string id;  // empty when the line never decoded
        RejectReason reason;
        std::string message;
    };
    size_t total_lines = 0;
    size_t accepted = 0;
    size_t parse_errors_tolerated = 0;  // accepted records with error nodes
    std::vector<Rejection> rejections;

    size_t rejected() const { return rejections.size(); }

    nlohmann::json to_json() const {
        nlohmann::json rj = nlohmann::json::array();
        for (const auto& r : rejections) {
            rj.push_back({{"line", r.line},
                          {"id", r.id},
                          {"reason", to_string(r.reason)},
                          {"message", r.message}});
        }
        return {{"total_lines", total_lines},
                {"accepted", accepted},
                {"rejected", rejections.size()},
                {"parse_errors_tolerated", parse_errors_tolerated},
                {"rejections", std::move(rj)}};
    }
};

struct IngestResult {
    std::vector<SourceFunction> records;
    IngestReport report;
};

struct IngestOptions {
    bool require_clean_parse = false;  // reject records whose body has error nodes
    bool require_date = true;
};

// Tolerant corpus reader: schema, UTF-8, parseability, date validity, id
// uniqueness, and pair label consistency are enforced; offending records are
// rejected and logged, never silently dropped.
inline IngestResult ingest(const std::string& path, IngestOptions opt = {}) {
    std::ifstream in(path);
    if (!in) throw FatalIo("cannot open corpus file: " + path);

    IngestResult result;
    std::string line;
    size_t line_no = 0;
    std::vector<size_t> line_of_record;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ++result.report.total_lines;

        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            result.report.rejections.push_back(
                {line_no, "", RejectReason::BadJson, e.what()});
            continue;
        }
        SourceFunction fn;
        try {
            fn = record_from_json(j);
        } catch (const FormatError& e) {
            std::string id = j.is_object() && j.contains("id") && j.at("id").is_string()
                                 ? j.at("id").get<std::string>()
                                 : "";
            const RejectReason reason =
                std::string(e.what()).find("commit_date") != std::string::npos
                    ? RejectReason::BadDate
                    : RejectReason::BadSchema;
            result.report.rejections.push_back({line_no, id, reason, e.what()});
            continue;
        }
        if (fn.code.empty()) {
            result.report.rejections.push_back(
                {line_no, fn.id, RejectReason::EmptyCode, "code is empty"});
            continue;
        }
        if (opt.require_date && fn.commit_date.empty()) {
            result.report.rejections.push_back(
                {line_no, fn.id, RejectReason::BadDate, "commit_date missing"});
            continue;
        }
        try {
            const SyntaxTree tree = parse_function(fn);
            if (!tree.clean()) {
                if (opt.require_clean_parse) {
                    result.report.rejections.push_back(
                        {line_no, fn.id, RejectReason::UnparsableFunction,
                         std::to_string(tree.errors().size()) + " parse error(s)"});
                    continue;
                }
                ++result.report.parse_errors_tolerated;
            }
        } catch (const EncodingError& e) {
            result.report.rejections.push_back(
                {line_no, fn.id, RejectReason::InvalidUtf8, e.what()});
            continue;
        } catch (const ParseFailure& e) {
            result.report.rejections.push_back(
                {line_no, fn.id, RejectReason::UnparsableFunction, e.what()});
            continue;
        }
        result.records.push_back(std::move(fn));
        line_of_record.push_back(line_no);
    }

    // id uniqueness
    {
        std::set<std::string> seen;
        std::vector<SourceFunction> kept;
        std::vector<size_t> kept_lines;
        for (size_t i = 0; i < result.records.size(); ++i) {
            if (!seen.insert(result.records[i].id).second) {
                result.report.rejections.push_back(
                    {line_of_record[i], result.records[i].id, RejectReason::DuplicateId,
                     "record id already seen"});
                continue;
            }
            kept.push_back(std::move(result.records[i]));
            kept_lines.push_back(line_of_record[i]);
        }
        result.records = std::move(kept);
        line_of_record = std::move(kept_lines);
    }

    // pair consistency: a pair is exactly two records with opposite labels
    {
        std::map<std::string, std::vector<size_t>> by_pair;
        for (size_t i = 0; i < result.records.size(); ++i) {
            if (result.records[i].pair_id) by_pair[*result.records[i].pair_id].push_back(i);
        }
        std::set<size_t> drop;
        for (const auto& [pair_id, members] : by_pair) {
            if (members.size() > 2) {
                for (const size_t i : members) {
                    result.report.rejections.push_back(
                        {line_of_record[i], result.records[i].id, RejectReason::PairTooLarge,
                         "pair '" + pair_id + "' has " + std::to_string(members.size()) +
                             " members"});
                    drop.insert(i);
                }
            } else if (members.size() == 2 &&
                       result.records[members[0]].label == result.records[members[1]].label) {
                for (const size_t i : members) {
                    result.report.rejections.push_back(
                        {line_of_record[i], result.records[i].id,
                         RejectReason::PairLabelConflict,
                         "pair '" + pair_id + "' members share a label"});
                    drop.insert(i);
                }
            }
        }
        if (!drop.empty()) {
            std::vector<SourceFunction> kept;
            for (size_t i = 0; i < result.records.size(); ++i) {
                if (!drop.count(i)) kept.push_back(std::move(result.records[i]));
            }
            result.records = std::move(kept);
        }
    }

    result.report.accepted = result.records.size();
    return result;
}

// ---- partitioning ----------------------------------------------------------

// Groups by primary CWE, orders by (commit_date, commit_id, id), and cuts
// each group near the requested ratios. A boundary never divides records of
// one commit: it advances until the commit's records stay on one side, which
// keeps patch pairs together by construction.
inline SplitAssignment split_by_cwe_time(const std::vector<SourceFunction>& records,
                                         SplitRatios ratios = {}) {
    if (ratios.train + ratios.valid + ratios.test != 10 || ratios.train < 0 ||
        ratios.valid < 0 || ratios.test < 0) {
        throw Error("split ratios must be non-negative and sum to 10");
    }
    for (const auto& r : records) {
        if (r.commit_date.empty()) {
            throw MissingDate("record '" + r.id + "' has no commit_date");
        }
    }

    std::map<std::string, std::vector<const SourceFunction*>> groups;
    for (const auto& r : records) groups[r.primary_cwe()].push_back(&r);

    SplitAssignment assignment;
    for (auto& [cwe, group] : groups) {
        std::sort(group.begin(), group.end(),
                  [](const SourceFunction* a, const SourceFunction* b) {
                      return std::tie(a->commit_date, a->commit_id, a->id) <
                             std::tie(b->commit_date, b->commit_id, b->id);
                  });
        const size_t n = group.size();
        size_t train_n = static_cast<size_t>(std::llround(n * ratios.train / 10.0));
        size_t valid_n = static_cast<size_t>(std::llround(n * ratios.valid / 10.0));
        train_n = std::min(train_n, n);
        valid_n = std::min(valid_n, n - train_n);
        size_t test_n = n - train_n - valid_n;

        // small groups: guarantee a test record when possible
        if (n >= 2 && test_n == 0 && ratios.test > 0) {
            if (valid_n > 0) {
                --valid_n;
            } else if (train_n > 0) {
                --train_n;
            }
            test_n = n - train_n - valid_n;
        }

        size_t b1 = train_n;            // first valid index
        size_t b2 = train_n + valid_n;  // first test index
        auto snap_forward = [&](size_t b) {
            while (b > 0 && b < n && group[b - 1]->commit_id == group[b]->commit_id &&
                   !group[b]->commit_id.empty()) {
                ++b;
            }
            return b;
        };
        b1 = snap_forward(b1);
        b2 = snap_forward(std::max(b1, b2));

        for (size_t i = 0; i < n; ++i) {
            const Split s = i < b1 ? Split::Train : (i < b2 ? Split::Valid : Split::Test);
            assignment.by_id[group[i]->id] = s;
        }
    }
    return assignment;
}

// ---- balanced training -----------------------------------------------------

struct BalanceResult {
    std::vector<std::string> train_ids;  // all vulnerable + sampled non-vulnerable
    size_t vulnerable = 0;
    size_t nonvulnerable = 0;
    bool insufficient_negatives = false;
};

// 1:1 undersampling of the training split. Vulnerable records all stay;
// non-vulnerable ones are drawn uniformly without replacement under the
// seeded generator, so a seed pins the subset exactly. Valid/Test untouched.
inline BalanceResult balance_training(const SplitAssignment& assignment,
                                      const std::vector<SourceFunction>& records,
                                      uint64_t seed) {
    std::vector<const SourceFunction*> vuln, nonvuln;
    for (const auto& r : records) {
        const auto split = assignment.lookup(r.id);
        if (!split || *split != Split::Train) continue;
        (r.vulnerable() ? vuln : nonvuln).push_back(&r);
    }
    if (vuln.empty()) {
        throw Error("balance_training: no vulnerable records in the training split");
    }

    BalanceResult result;
    result.vulnerable = vuln.size();
    for (const auto* r : vuln) result.train_ids.push_back(r->id);

    if (nonvuln.size() <= vuln.size()) {
        result.insufficient_negatives = nonvuln.size() < vuln.size();
        result.nonvulnerable = nonvuln.size();
        for (const auto* r : nonvuln) result.train_ids.push_back(r->id);
        return result;
    }

    SplitMix64 rng(seed);
    const auto picks = sample_without_replacement(nonvuln.size(), vuln.size(), rng);
    for (const size_t i : picks) result.train_ids.push_back(nonvuln[i]->id);
    result.nonvulnerable = picks.size();
    return result;
}

// ---- audits ------------------------------------------------------------------

struct AuditReport {
    std::vector<std::string> case1_violations;  // pair_ids spanning splits
    std::vector<std::string> case2_violations;  // commit_ids spanning splits
    std::vector<std::pair<std::string, std::string>> duplicate_hash_violations;
    std::vector<std::string> truncation_collisions;  // pair_ids

    size_t pairs_checked = 0;
    size_t commits_checked = 0;
    size_t records_hashed = 0;
    size_t truncation_pairs_checked = 0;

    bool passes() const {
        return case1_violations.empty() && case2_violations.empty() &&
               duplicate_hash_violations.empty() && truncation_collisions.empty();
    }

    double truncation_collision_ratio() const {
        if (truncation_pairs_checked == 0) return 0.0;
        return static_cast<double>(truncation_collisions.size()) /
               static_cast<double>(truncation_pairs_checked);
    }

    double case1_ratio() const {
        if (pairs_checked == 0) return 0.0;
        return static_cast<double>(case1_violations.size()) /
               static_cast<double>(pairs_checked);
    }

    double case2_ratio() const {
        if (commits_checked == 0) return 0.0;
        return static_cast<double>(case2_violations.size()) /
               static_cast<double>(commits_checked);
    }

    nlohmann::json to_json() const {
        nlohmann::json dup = nlohmann::json::array();
        for (const auto& [a, b] : duplicate_hash_violations) dup.push_back({a, b});
        return {{"case1_violations", case1_violations},
                {"case2_violations", case2_violations},
                {"duplicate_hash_violations", std::move(dup)},
                {"truncation_collisions", truncation_collisions},
                {"counts",
                 {{"pairs_checked", pairs_checked},
                  {"commits_checked", commits_checked},
                  {"records_hashed", records_hashed},
                  {"truncation_pairs_checked", truncation_pairs_checked},
                  {"case1", case1_violations.size()},
                  {"case2", case2_violations.size()},
                  {"duplicate_hash", duplicate_hash_violations.size()},
                  {"truncation", truncation_collisions.size()}}},
                {"ratios",
                 {{"case1_ratio", case1_ratio()},
                  {"case2_ratio", case2_ratio()},
                  {"truncation_collision_ratio", truncation_collision_ratio()}}},
                {"passes", passes()}};
    }
};

// Case 1: a patch pair split across partitions. Case 2: one commit's
// functions split across partitions. Plus normalized-text clones that landed
// in different partitions.
inline AuditReport audit_leakage(const SplitAssignment& assignment,
                                 const std::vector<SourceFunction>& records) {
    AuditReport report;

    std::map<std::string, std::set<Split>> pair_splits;
    std::map<std::string, std::set<Split>> commit_splits;
    std::map<uint64_t, std::vector<const SourceFunction*>> by_hash;

    for (const auto& r : records) {
        const auto split = assignment.lookup(r.id);
        if (!split) continue;
        if (r.pair_id) pair_splits[*r.pair_id].insert(*split);
        if (!r.commit_id.empty()) commit_splits[r.commit_id].insert(*split);
        by_hash[fnv1a64(normalize(r.code, NormalizationRule::CodexGlueCleaner))].push_back(&r);
        ++report.records_hashed;
    }

    report.pairs_checked = pair_splits.size();
    for (const auto& [pair_id, splits] : pair_splits) {
        if (splits.size() > 1) report.case1_violations.push_back(pair_id);
    }
    report.commits_checked = commit_splits.size();
    for (const auto& [commit_id, splits] : commit_splits) {
        if (splits.size() > 1) report.case2_violations.push_back(commit_id);
    }
    for (const auto& [hash, group] : by_hash) {
        if (group.size() < 2) continue;
        for (size_t i = 0; i < group.size(); ++i) {
            for (size_t j = i + 1; j < group.size(); ++j) {
                const auto si = assignment.lookup(group[i]->id);
                const auto sj = assignment.lookup(group[j]->id);
                if (si && sj && *si != *sj) {
                    report.duplicate_hash_violations.emplace_back(group[i]->id, group[j]->id);
                }
            }
        }
    }
    return report;
}

// Flags patch pairs whose members are byte-identical after truncation to the
// first `budget` tokens: same visible input, opposite labels.
inline AuditReport audit_truncation(const std::vector<SourceFunction>& records,
                                    size_t budget = 512) {
    AuditReport report;
    std::map<std::string, std::vector<const SourceFunction*>> pairs;
    for (const auto& r : records) {
        if (r.pair_id) pairs[*r.pair_id].push_back(&r);
    }
    for (const auto& [pair_id, members] : pairs) {
        if (members.size() != 2) continue;
        ++report.truncation_pairs_checked;
        const std::string_view a = members[0]->code;
        const std::string_view b = members[1]->code;
        const std::string_view ta = a.substr(0, token_prefix_end(a, budget));
        const std::string_view tb = b.substr(0, token_prefix_end(b, budget));
        if (ta == tb) report.truncation_collisions.push_back(pair_id);
    }
    return report;
}

}  // namespace vdkit
