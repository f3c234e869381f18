// vdkit: function-level C/C++ vulnerability-detection data toolkit.
//
// Subcommands cover the full pipeline over line-delimited JSON corpora:
// ingest -> split -> balance -> audit -> views/transform/abstract/normalize/
// slice -> prompt -> run -> score. Every command is deterministic given its
// inputs and seed, so file-based pipelines replay exactly.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vdkit/vdkit.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitFatal = 2;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw vdkit::FatalIo("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw vdkit::FatalIo("cannot open output file: " + path);
    out << j.dump(2) << "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw vdkit::FatalIo("cannot open output file: " + path);
    out << text;
}

vdkit::SplitRatios parse_ratios(const std::string& text) {
    vdkit::SplitRatios r;
    if (std::sscanf(text.c_str(), "%d:%d:%d", &r.train, &r.valid, &r.test) != 3 ||
        r.train + r.valid + r.test != 10 || r.train < 0 || r.valid < 0 || r.test < 0) {
        throw vdkit::Error("ratios must look like 8:1:1 and sum to 10");
    }
    return r;
}

struct CommonArgs {
    unsigned workers = std::max(1u, std::min(4u, std::thread::hardware_concurrency()));
};

// ---- subcommand bodies -----------------------------------------------------

int cmd_ingest(const std::string& input, const std::string& output,
               const std::string& report_path, bool strict) {
    vdkit::IngestOptions opt;
    opt.require_clean_parse = strict;
    const auto result = vdkit::ingest(input, opt);
    if (!output.empty()) vdkit::write_corpus(output, result.records);
    if (!report_path.empty()) write_json_file(report_path, result.report.to_json());
    std::cout << "ingest: " << result.report.accepted << " accepted, "
              << result.report.rejected() << " rejected";
    if (result.report.parse_errors_tolerated > 0) {
        std::cout << " (" << result.report.parse_errors_tolerated
                  << " accepted with parse errors)";
    }
    std::cout << "\n";
    return kExitOk;
}

int cmd_split(const std::string& input, const std::string& output,
              const std::string& ratios_text) {
    const auto ratios = parse_ratios(ratios_text);
    const auto records = vdkit::read_corpus(input);
    const auto assignment = vdkit::split_by_cwe_time(records, ratios);
    write_json_file(output, assignment.to_json());
    std::cout << "split: train=" << assignment.count(vdkit::Split::Train)
              << " valid=" << assignment.count(vdkit::Split::Valid)
              << " test=" << assignment.count(vdkit::Split::Test) << "\n";
    return kExitOk;
}

int cmd_balance(const std::string& splits_path, const std::string& input,
                const std::string& output, uint64_t seed) {
    const auto assignment = vdkit::SplitAssignment::from_json(read_json_file(splits_path));
    const auto records = vdkit::read_corpus(input);
    const auto result = vdkit::balance_training(assignment, records, seed);

    vdkit::SplitAssignment balanced;
    std::set<std::string> keep(result.train_ids.begin(), result.train_ids.end());
    for (const auto& [id, split] : assignment.by_id) {
        if (split != vdkit::Split::Train || keep.count(id)) balanced.by_id[id] = split;
    }
    json j = balanced.to_json();
    j["seed"] = seed;
    j["balance"] = {{"vulnerable", result.vulnerable},
                    {"nonvulnerable", result.nonvulnerable},
                    {"insufficient_negatives", result.insufficient_negatives}};
    write_json_file(output, j);
    std::cout << "balance: " << result.vulnerable << " vulnerable / "
              << result.nonvulnerable << " non-vulnerable kept in train\n";
    if (result.insufficient_negatives) {
        std::cerr << "warning: fewer non-vulnerable than vulnerable records; kept all\n";
    }
    return kExitOk;
}

int cmd_audit(const std::string& splits_path, const std::string& input,
              const std::string& output, size_t budget, bool skip_truncation) {
    const auto records = vdkit::read_corpus(input);
    vdkit::AuditReport report;
    if (!splits_path.empty()) {
        const auto assignment = vdkit::SplitAssignment::from_json(read_json_file(splits_path));
        report = vdkit::audit_leakage(assignment, records);
    }
    if (!skip_truncation) {
        const auto trunc = vdkit::audit_truncation(records, budget);
        report.truncation_collisions = trunc.truncation_collisions;
        report.truncation_pairs_checked = trunc.truncation_pairs_checked;
    }
    if (!output.empty()) write_json_file(output, report.to_json());
    std::cout << "audit: case1=" << report.case1_violations.size()
              << " case2=" << report.case2_violations.size()
              << " duplicate_hash=" << report.duplicate_hash_violations.size()
              << " truncation=" << report.truncation_collisions.size() << "/"
              << report.truncation_pairs_checked << "\n";
    if (!report.passes()) {
        for (const auto& p : report.case1_violations) {
            std::cerr << "case1: pair " << p << " spans splits\n";
        }
        for (const auto& c : report.case2_violations) {
            std::cerr << "case2: commit " << c << " spans splits\n";
        }
        for (const auto& [a, b] : report.duplicate_hash_violations) {
            std::cerr << "duplicate: " << a << " ~ " << b << "\n";
        }
        for (const auto& p : report.truncation_collisions) {
            std::cerr << "truncation: pair " << p << " collides at budget " << budget << "\n";
        }
        return kExitValidation;
    }
    return kExitOk;
}

int cmd_views(const std::string& input, const std::string& output, unsigned workers) {
    const auto records = vdkit::read_corpus(input);
    auto rows = vdkit::parallel_map<json>(
        records,
        [](const vdkit::SourceFunction& fn) {
            json j = vdkit::record_to_json(fn);
            const auto tree = vdkit::parse_function(fn);
            const auto toks = vdkit::lex(fn.code);
            j["view_flat_ast"] = vdkit::flatten_ast(tree).text;
            j["view_api_calls"] = vdkit::api_call_view(tree);
            j["view_data_flow"] = vdkit::data_flow_view(tree, toks).second;
            return j;
        },
        workers);
    std::ofstream out(output);
    if (!out) throw vdkit::FatalIo("cannot open output file: " + output);
    for (const auto& row : rows) out << row.dump() << "\n";
    std::cout << "views: " << rows.size() << " records annotated\n";
    return kExitOk;
}

int cmd_transform(const std::string& input, const std::string& output,
                  const std::string& kind_text, unsigned workers) {
    std::vector<vdkit::TransformKind> kinds;
    if (kind_text == "all") {
        kinds = vdkit::all_transform_kinds();
    } else if (auto k = vdkit::transform_kind_from_string(kind_text)) {
        kinds.push_back(*k);
    } else {
        throw vdkit::Error("unknown transform kind '" + kind_text + "'");
    }
    const auto records = vdkit::read_corpus(input);
    auto variant_rows = vdkit::parallel_map<std::vector<json>>(
        records,
        [&](const vdkit::SourceFunction& fn) {
            std::vector<json> rows;
            for (const auto& v : vdkit::generate_variants(fn, kinds)) {
                vdkit::SourceFunction out = fn;
                out.id = fn.id + "#" + vdkit::to_string(v.kind) + "#" +
                         std::to_string(v.site_index);
                out.code = v.code;
                json j = vdkit::record_to_json(out);
                j["origin_id"] = v.origin_id;
                j["transform_kind"] = vdkit::to_string(v.kind);
                j["site_index"] = v.site_index;
                rows.push_back(std::move(j));
            }
            return rows;
        },
        workers);
    std::ofstream out(output);
    if (!out) throw vdkit::FatalIo("cannot open output file: " + output);
    size_t total = 0;
    for (const auto& rows : variant_rows) {
        for (const auto& row : rows) {
            out << row.dump() << "\n";
            ++total;
        }
    }
    std::cout << "transform: " << total << " variants from " << records.size()
              << " functions\n";
    return kExitOk;
}

int cmd_abstract(const std::string& input, const std::string& output,
                 const std::string& map_path, unsigned workers) {
    const auto records = vdkit::read_corpus(input);
    auto rows = vdkit::parallel_map<std::pair<json, json>>(
        records,
        [](const vdkit::SourceFunction& fn) {
            auto [text, map] = vdkit::abstract_code(fn);
            vdkit::SourceFunction out = fn;
            out.code = text;
            json side = {{"id", fn.id}, {"mapping", map.to_json()}};
            return std::make_pair(vdkit::record_to_json(out), std::move(side));
        },
        workers);
    std::ofstream out(output);
    if (!out) throw vdkit::FatalIo("cannot open output file: " + output);
    std::ofstream maps;
    if (!map_path.empty()) {
        maps.open(map_path);
        if (!maps) throw vdkit::FatalIo("cannot open output file: " + map_path);
    }
    for (const auto& [row, side] : rows) {
        out << row.dump() << "\n";
        if (maps.is_open()) maps << side.dump() << "\n";
    }
    std::cout << "abstract: " << rows.size() << " records rewritten\n";
    return kExitOk;
}

int cmd_normalize(const std::string& input, const std::string& output,
                  const std::string& rule_text, unsigned workers) {
    vdkit::NormalizationRule rule;
    if (rule_text == "codexglue") {
        rule = vdkit::NormalizationRule::CodexGlueCleaner;
    } else if (rule_text == "pdbert") {
        rule = vdkit::NormalizationRule::PdbertCleaner;
    } else if (rule_text == "none") {
        rule = vdkit::NormalizationRule::NoNormalization;
    } else {
        throw vdkit::Error("unknown normalization rule '" + rule_text + "'");
    }
    const auto records = vdkit::read_corpus(input);
    auto rows = vdkit::parallel_map<json>(
        records,
        [&](const vdkit::SourceFunction& fn) {
            vdkit::SourceFunction out = fn;
            out.code = vdkit::normalize(fn.code, rule);
            return vdkit::record_to_json(out);
        },
        workers);
    std::ofstream out(output);
    if (!out) throw vdkit::FatalIo("cannot open output file: " + output);
    for (const auto& row : rows) out << row.dump() << "\n";
    std::cout << "normalize: " << rows.size() << " records (" << rule_text << ")\n";
    return kExitOk;
}

int cmd_slice(const std::string& input, const std::string& output, size_t budget,
              unsigned workers) {
    const auto records = vdkit::read_corpus(input);
    auto rows = vdkit::parallel_map<json>(
        records,
        [&](const vdkit::SourceFunction& fn) {
            json j = vdkit::record_to_json(fn);
            try {
                const auto tree = vdkit::parse_function(fn);
                const auto result = vdkit::slice_function(tree, budget);
                j["sliced_code"] = result.sliced_code;
                j["slice_lines"] = result.selected_lines;
                j["slice_anchor_lines"] =
                    std::vector<uint32_t>(result.anchor_lines.begin(),
                                          result.anchor_lines.end());
                j["slice_token_count"] = result.token_count;
                j["slice_budget"] = result.budget;
            } catch (const vdkit::EmptySlice& e) {
                j["slice_error"] = e.what();
            }
            return j;
        },
        workers);
    std::ofstream out(output);
    if (!out) throw vdkit::FatalIo("cannot open output file: " + output);
    size_t failed = 0;
    for (const auto& row : rows) {
        out << row.dump() << "\n";
        if (row.contains("slice_error")) ++failed;
    }
    std::cout << "slice: " << rows.size() - failed << " sliced, " << failed
              << " without a slice (budget " << budget << ")\n";
    return kExitOk;
}

int cmd_prompt(const std::string& input, const std::string& output,
               const std::string& type_text, const std::string& setting_text,
               const std::string& train_path, uint64_t seed, unsigned workers) {
    const auto type = vdkit::prompt_type_from_string(type_text);
    if (!type) throw vdkit::Error("unknown prompt type '" + type_text + "'");
    const auto setting = vdkit::prompt_setting_from_string(setting_text);
    if (!setting) throw vdkit::Error("unknown prompt setting '" + setting_text + "'");

    std::vector<vdkit::SourceFunction> train_pool;
    if (*setting == vdkit::PromptSetting::FewShot) {
        if (train_path.empty()) {
            throw vdkit::Error("few-shot prompting requires --train");
        }
        train_pool = vdkit::read_corpus(train_path);
    }
    const auto records = vdkit::read_corpus(input);
    auto rows = vdkit::parallel_map<json>(
        records,
        [&](const vdkit::SourceFunction& fn) {
            return vdkit::build_prompt(fn, *type, *setting, train_pool, seed).to_json();
        },
        workers);
    std::ofstream out(output);
    if (!out) throw vdkit::FatalIo("cannot open output file: " + output);
    for (const auto& row : rows) out << row.dump() << "\n";
    std::cout << "prompt: " << rows.size() << " bundles (" << type_text << ", "
              << setting_text << ")\n";
    return kExitOk;
}

int cmd_run(const std::string& input, const std::string& output, const std::string& endpoint,
            const std::string& config_path, const std::string& model, unsigned workers,
            bool workers_set) {
    vdkit::EndpointConfig config;
    if (!config_path.empty()) {
        config = vdkit::EndpointConfig::from_json(read_json_file(config_path));
    }
    if (!endpoint.empty()) config.url = endpoint;
    if (!model.empty()) config.model = model;
    if (workers_set) config.workers = workers;
    if (config.url.empty()) throw vdkit::Error("run requires --endpoint or a config url");

    std::vector<vdkit::PromptBundle> bundles;
    {
        std::ifstream in(input);
        if (!in) throw vdkit::FatalIo("cannot open prompts file: " + input);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            bundles.push_back(vdkit::PromptBundle::from_json(json::parse(line)));
        }
    }
    const auto results = vdkit::run_inference(bundles, config);
    std::ofstream out(output);
    if (!out) throw vdkit::FatalIo("cannot open output file: " + output);
    for (const auto& r : results) out << r.to_json().dump() << "\n";
    size_t abstained = 0;
    for (const auto& r : results) {
        if (r.verdict == vdkit::Verdict::Abstain) ++abstained;
    }
    std::cout << "run: " << results.size() << " replies, " << abstained << " abstained\n";
    return kExitOk;
}

int cmd_score(const std::string& replies_path, const std::string& corpus_path,
              const std::string& output, const std::string& csv_path) {
    const auto records = vdkit::read_corpus(corpus_path);
    std::map<std::string, vdkit::Verdict> verdict_by_id;
    {
        std::ifstream in(replies_path);
        if (!in) throw vdkit::FatalIo("cannot open replies file: " + replies_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const json j = json::parse(line);
            const std::string id = j.at("record_id").get<std::string>();
            const std::string v = j.value("verdict", "");
            if (v == "vulnerable") {
                verdict_by_id[id] = vdkit::Verdict::Vulnerable;
            } else if (v == "non-vulnerable") {
                verdict_by_id[id] = vdkit::Verdict::NonVulnerable;
            } else if (v == "abstain") {
                verdict_by_id[id] = vdkit::Verdict::Abstain;
            } else if (j.contains("raw_reply")) {
                verdict_by_id[id] = vdkit::parse_verdict(j.at("raw_reply").get<std::string>());
            }
        }
    }
    std::vector<vdkit::Verdict> verdicts;
    std::vector<vdkit::SourceFunction> scored;
    for (const auto& r : records) {
        auto it = verdict_by_id.find(r.id);
        if (it == verdict_by_id.end()) continue;
        verdicts.push_back(it->second);
        scored.push_back(r);
    }
    if (verdicts.empty()) {
        std::cerr << "score: no replies matched corpus record ids\n";
        return kExitValidation;
    }
    const auto report = vdkit::score(verdicts, scored);
    if (!output.empty()) write_json_file(output, report.to_json());
    if (!csv_path.empty()) write_text_file(csv_path, report.to_csv());
    auto show = [](const std::optional<double>& v) {
        return v ? std::to_string(*v) : std::string("n/a");
    };
    std::cout << "score: n=" << report.counts.total() << " accuracy=" << show(report.accuracy)
              << " balanced_accuracy=" << show(report.balanced_accuracy)
              << " f1=" << show(report.f1) << " precision=" << show(report.precision)
              << " recall=" << show(report.recall) << " tnr=" << show(report.tnr)
              << " abstain=" << report.counts.abstain() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vdkit - vulnerability-detection data toolkit"};
    app.require_subcommand(1);

    CommonArgs common;
    app.add_option("--workers", common.workers, "worker threads for per-record stages");

    std::string input, output, report_path, splits_path, ratios_text = "8:1:1";
    std::string kind_text = "all", rule_text = "codexglue", map_path;
    std::string type_text = "raw_code", setting_text = "zero_shot", train_path;
    std::string endpoint, config_path, model, csv_path, replies_path, corpus_path;
    uint64_t seed = 0;
    size_t budget = 512;
    bool strict = false, skip_truncation = false;

    auto* ingest = app.add_subcommand("ingest", "validate a corpus file, log rejections");
    ingest->add_option("input", input)->required();
    ingest->add_option("-o,--output", output, "write accepted records");
    ingest->add_option("--report", report_path, "write the rejection report (JSON)");
    ingest->add_flag("--strict", strict, "also reject records with parse errors");

    auto* split = app.add_subcommand("split", "CWE-grouped, time-ordered partitioning");
    split->add_option("input", input)->required();
    split->add_option("-o,--output", output)->required();
    split->add_option("--ratios", ratios_text, "train:valid:test, tenths (default 8:1:1)");

    auto* balance = app.add_subcommand("balance", "1:1 undersampling of the training split");
    balance->add_option("splits", splits_path)->required();
    balance->add_option("input", input)->required();
    balance->add_option("-o,--output", output)->required();
    balance->add_option("--seed", seed);

    auto* audit = app.add_subcommand("audit", "leakage and truncation audits");
    audit->add_option("splits", splits_path, "split assignment (omit for truncation only)");
    audit->add_option("input", input)->required();
    audit->add_option("-o,--output", output, "write the audit report (JSON)");
    audit->add_option("--budget", budget, "truncation token budget (default 512)");
    audit->add_flag("--no-truncation", skip_truncation);

    auto* views = app.add_subcommand("views", "attach flattened-AST/API-call/data-flow views");
    views->add_option("input", input)->required();
    views->add_option("-o,--output", output)->required();

    auto* transform = app.add_subcommand("transform", "semantic-preserving variants, per site");
    transform->add_option("input", input)->required();
    transform->add_option("-o,--output", output)->required();
    transform->add_option("--kind", kind_text,
                          "all|cond_negate|cond_expand|loop_convert|relop_reverse");

    auto* abstract_cmd = app.add_subcommand("abstract", "VARk/PARAMk/STRINGk rewriting");
    abstract_cmd->add_option("input", input)->required();
    abstract_cmd->add_option("-o,--output", output)->required();
    abstract_cmd->add_option("--map", map_path, "write sidecar abstraction maps");

    auto* normalize_cmd = app.add_subcommand("normalize", "whitespace normalization");
    normalize_cmd->add_option("input", input)->required();
    normalize_cmd->add_option("-o,--output", output)->required();
    normalize_cmd->add_option("--rule", rule_text, "codexglue|pdbert|none");

    auto* slice_cmd = app.add_subcommand("slice", "anchor-based slicing under a token budget");
    slice_cmd->add_option("input", input)->required();
    slice_cmd->add_option("-o,--output", output)->required();
    slice_cmd->add_option("--budget", budget, "token budget (default 512)");

    auto* prompt_cmd = app.add_subcommand("prompt", "assemble chat prompt bundles");
    prompt_cmd->add_option("input", input)->required();
    prompt_cmd->add_option("-o,--output", output)->required();
    prompt_cmd->add_option("--type", type_text, "raw_code|flat_ast|api_calls|data_flow");
    prompt_cmd->add_option("--setting", setting_text, "zero_shot|few_shot");
    prompt_cmd->add_option("--train", train_path, "training pool for few-shot pairs");
    prompt_cmd->add_option("--seed", seed);

    auto* run = app.add_subcommand("run", "send bundles to a chat-completion endpoint");
    run->add_option("input", input)->required();
    run->add_option("-o,--output", output)->required();
    run->add_option("--endpoint", endpoint, "http://host:port/path");
    run->add_option("--config", config_path, "endpoint config JSON");
    run->add_option("--model", model);

    auto* score_cmd = app.add_subcommand("score", "metrics from replies + labeled corpus");
    score_cmd->add_option("replies", replies_path)->required();
    score_cmd->add_option("corpus", corpus_path)->required();
    score_cmd->add_option("-o,--output", output, "metrics report (JSON)");
    score_cmd->add_option("--csv", csv_path, "metrics report (CSV)");

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }
    const bool workers_set = app.count("--workers") > 0;
    if (budget == 0) {
        std::cerr << "error: --budget must be positive\n";
        return kExitValidation;
    }

    try {
        if (*ingest) return cmd_ingest(input, output, report_path, strict);
        if (*split) return cmd_split(input, output, ratios_text);
        if (*balance) return cmd_balance(splits_path, input, output, seed);
        if (*audit) return cmd_audit(splits_path, input, output, budget, skip_truncation);
        if (*views) return cmd_views(input, output, common.workers);
        if (*transform) return cmd_transform(input, output, kind_text, common.workers);
        if (*abstract_cmd) return cmd_abstract(input, output, map_path, common.workers);
        if (*normalize_cmd) return cmd_normalize(input, output, rule_text, common.workers);
        if (*slice_cmd) return cmd_slice(input, output, budget, common.workers);
        if (*prompt_cmd) {
            return cmd_prompt(input, output, type_text, setting_text, train_path, seed,
                              common.workers);
        }
        if (*run) {
            return cmd_run(input, output, endpoint, config_path, model, common.workers,
                           workers_set);
        }
        if (*score_cmd) return cmd_score(replies_path, corpus_path, output, csv_path);
    } catch (const vdkit::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFatal;
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return kExitFatal;
    }
    return kExitOk;
}
