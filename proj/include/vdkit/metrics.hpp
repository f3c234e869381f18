#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vdkit/common.hpp"
#include "vdkit/source_function.hpp"

namespace vdkit {

enum class Verdict { Vulnerable, NonVulnerable, Abstain };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Vulnerable: return "vulnerable";
        case Verdict::NonVulnerable: return "non-vulnerable";
        case Verdict::Abstain: return "abstain";
    }
    return "?";
}

struct ConfusionCounts {
    uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
    uint64_t abstain_on_vulnerable = 0;
    uint64_t abstain_on_nonvulnerable = 0;

    uint64_t abstain() const { return abstain_on_vulnerable + abstain_on_nonvulnerable; }
    uint64_t total() const { return tp + fp + tn + fn + abstain(); }

    // Abstains score as non-vulnerable predictions: a miss on vulnerable
    // records, a correct rejection on non-vulnerable ones. They stay tallied
    // apart so the report shows how often the model refused to answer.
    uint64_t effective_tn() const { return tn + abstain_on_nonvulnerable; }
    uint64_t effective_fn() const { return fn + abstain_on_vulnerable; }
};

struct MetricsReport {
    ConfusionCounts counts;
    std::optional<double> accuracy, balanced_accuracy, f1, precision, recall, tnr;
    std::map<std::string, double> per_cwe_recall;
    std::map<std::string, std::pair<uint64_t, uint64_t>> per_cwe_counts;  // detected / total

    nlohmann::json to_json() const {
        auto opt = [](const std::optional<double>& v) {
            return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
        };
        nlohmann::json cwe = nlohmann::json::object();
        for (const auto& [name, r] : per_cwe_recall) {
            const auto& [detected, total] = per_cwe_counts.at(name);
            cwe[name] = {{"recall", r}, {"detected", detected}, {"vulnerable", total}};
        }
        return {{"counts",
                 {{"tp", counts.tp},
                  {"fp", counts.fp},
                  {"tn", counts.tn},
                  {"fn", counts.fn},
                  {"abstain", counts.abstain()},
                  {"abstain_on_vulnerable", counts.abstain_on_vulnerable},
                  {"abstain_on_nonvulnerable", counts.abstain_on_nonvulnerable},
                  {"total", counts.total()}}},
                {"accuracy", opt(accuracy)},
                {"balanced_accuracy", opt(balanced_accuracy)},
                {"f1", opt(f1)},
                {"precision", opt(precision)},
                {"recall", opt(recall)},
                {"tnr", opt(tnr)},
                {"per_cwe_recall", std::move(cwe)}};
    }

    // Long-format CSV, one metric per row; per-CWE recall rows carry the
    // CWE id in the metric name.
    std::string to_csv() const {
        auto cell = [](const std::optional<double>& v) {
            return v ? std::to_string(*v) : std::string();
        };
        std::string out = "metric,value\n";
        out += "accuracy," + cell(accuracy) + "\n";
        out += "balanced_accuracy," + cell(balanced_accuracy) + "\n";
        out += "f1," + cell(f1) + "\n";
        out += "precision," + cell(precision) + "\n";
        out += "recall," + cell(recall) + "\n";
        out += "tnr," + cell(tnr) + "\n";
        out += "tp," + std::to_string(counts.tp) + "\n";
        out += "fp," + std::to_string(counts.fp) + "\n";
        out += "tn," + std::to_string(counts.tn) + "\n";
        out += "fn," + std::to_string(counts.fn) + "\n";
        out += "abstain," + std::to_string(counts.abstain()) + "\n";
        for (const auto& [name, r] : per_cwe_recall) {
            out += "recall_cwe:" + name + "," + std::to_string(r) + "\n";
        }
        return out;
    }
};

namespace detail {

inline std::optional<double> ratio(uint64_t num, uint64_t den) {
    if (den == 0) return std::nullopt;  // undefined metric reported as absent
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace detail

// The six headline metrics from the confusion counts.
inline void compute_metrics(MetricsReport& report) {
    const ConfusionCounts& c = report.counts;
    const uint64_t tn = c.effective_tn();
    const uint64_t fn = c.effective_fn();
    report.accuracy = detail::ratio(c.tp + tn, c.tp + tn + c.fp + fn);
    report.recall = detail::ratio(c.tp, c.tp + fn);
    report.precision = detail::ratio(c.tp, c.tp + c.fp);
    report.tnr = detail::ratio(tn, tn + c.fp);
    if (report.precision && report.recall && (*report.precision + *report.recall) > 0) {
        report.f1 = 2.0 * (*report.precision) * (*report.recall) /
                    (*report.precision + *report.recall);
    }
    if (report.recall && report.tnr) {
        report.balanced_accuracy = (*report.recall + *report.tnr) / 2.0;
    }
}

// Scores aligned verdict/label lists; per-CWE recall is computed over the
// vulnerable records grouped by their primary CWE.
inline MetricsReport score(const std::vector<Verdict>& verdicts,
                           const std::vector<Label>& labels,
                           const std::vector<std::vector<std::string>>& cwe_tags = {}) {
    if (verdicts.empty()) throw EmptyInput("score: no verdicts");
    if (verdicts.size() != labels.size()) {
        throw EmptyInput("score: verdicts and labels differ in length");
    }
    if (!cwe_tags.empty() && cwe_tags.size() != labels.size()) {
        throw EmptyInput("score: cwe_tags and labels differ in length");
    }

    MetricsReport report;
    std::map<std::string, std::pair<uint64_t, uint64_t>> cwe;  // detected/total
    for (size_t i = 0; i < verdicts.size(); ++i) {
        const bool truth_vuln = labels[i] == Label::Vulnerable;
        switch (verdicts[i]) {
            case Verdict::Vulnerable:
                (truth_vuln ? report.counts.tp : report.counts.fp)++;
                break;
            case Verdict::NonVulnerable:
                (truth_vuln ? report.counts.fn : report.counts.tn)++;
                break;
            case Verdict::Abstain:
                (truth_vuln ? report.counts.abstain_on_vulnerable
                            : report.counts.abstain_on_nonvulnerable)++;
                break;
        }
        if (truth_vuln && !cwe_tags.empty()) {
            const std::string key = cwe_tags[i].empty() ? "NONE" : cwe_tags[i].front();
            auto& [detected, total] = cwe[key];
            ++total;
            if (verdicts[i] == Verdict::Vulnerable) ++detected;
        }
    }
    compute_metrics(report);
    for (const auto& [key, counts] : cwe) {
        report.per_cwe_counts[key] = counts;
        report.per_cwe_recall[key] =
            static_cast<double>(counts.first) / static_cast<double>(counts.second);
    }
    return report;
}

inline MetricsReport score(const std::vector<Verdict>& verdicts,
                           const std::vector<SourceFunction>& records) {
    std::vector<Label> labels;
    std::vector<std::vector<std::string>> cwe_tags;
    labels.reserve(records.size());
    for (const auto& r : records) {
        labels.push_back(r.label);
        cwe_tags.push_back(r.cwe_ids);
    }
    return score(verdicts, labels, cwe_tags);
}

}  // namespace vdkit
