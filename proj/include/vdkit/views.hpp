#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "vdkit/ast.hpp"
#include "vdkit/common.hpp"
#include "vdkit/dataflow.hpp"
#include "vdkit/lexer.hpp"
#include "vdkit/parser.hpp"

namespace vdkit {

// Linearized parse tree: source tokens interleaved with nesting markers,
// one <AST#kind#Left> / <AST#kind#Right> pair per non-leaf node.
struct FlattenedAst {
    std::string text;
};

struct ApiCallSequence {
    std::vector<std::pair<std::string, ByteSpan>> callees;  // in source order
};

enum class FlowRelation { ComesFrom };

struct DataFlowEdge {
    std::string var;           // assigned variable
    uint32_t use_occurrence;   // its occurrence index at the definition being created
    std::string src_var;       // variable the value comes from
    uint32_t def_occurrence;   // occurrence index of src_var at its def site
    FlowRelation relation = FlowRelation::ComesFrom;
};

namespace detail {

inline void flatten_node(const SyntaxTree& tree, const AstNode& node, bool emit_markers,
                         std::vector<std::string>& out) {
    if (node.is_leaf()) {
        if (node.span.end > node.span.begin) out.emplace_back(tree.text(node));
        return;
    }
    if (emit_markers) out.push_back("<AST#" + node.kind + "#Left>");
    for (const auto& child : node.children) flatten_node(tree, child, true, out);
    if (emit_markers) out.push_back("<AST#" + node.kind + "#Right>");
}

inline std::string join_spaced(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += ' ';
        out += p;
    }
    return out;
}

}  // namespace detail

inline FlattenedAst flatten_ast(const SyntaxTree& tree) {
    std::vector<std::string> parts;
    // The synthetic fragment wrapper is not part of the grammar; it gets no
    // markers. A function_definition root does.
    const bool root_markers = tree.root().kind != "fragment";
    detail::flatten_node(tree, tree.root(), root_markers, parts);
    return {detail::join_spaced(parts)};
}

inline ApiCallSequence api_calls(const SyntaxTree& tree) {
    ApiCallSequence seq;
    walk(tree.root(), [&](const AstNode& n) {
        if (n.kind == "call_expression" && !n.children.empty()) {
            seq.callees.emplace_back(std::string(tree.text(n.children.front())), n.span);
        }
        return true;
    });
    // pre-order already yields span order; keep it stable regardless
    std::stable_sort(seq.callees.begin(), seq.callees.end(),
                     [](const auto& a, const auto& b) { return a.second.begin < b.second.begin; });
    return seq;
}

// "The program first calls a, then calls b, and finally calls c."
inline std::string api_call_view(const SyntaxTree& tree) {
    const auto seq = api_calls(tree);
    const auto& calls = seq.callees;
    if (calls.empty()) return "The program makes no calls.";
    if (calls.size() == 1) return "The program calls " + calls[0].first + ".";
    std::string out = "The program first calls " + calls[0].first;
    for (size_t i = 1; i < calls.size(); ++i) {
        if (i + 1 == calls.size() && calls.size() > 2) {
            out += ", and finally calls " + calls[i].first;
        } else {
            out += ", then calls " + calls[i].first;
        }
    }
    return out + ".";
}

// Definition-flow edges between variable occurrences: each assignment or
// initialization target "comes from" the reaching definition of every
// variable its right-hand side reads. Occurrence indices count textual
// occurrences of the identifier, so the narration survives any tokenizer.
inline std::vector<DataFlowEdge> data_flow_edges(const SyntaxTree& tree,
                                                 const std::vector<Token>& tokens) {
    const DefUseAnalysis analysis = analyze_def_use(tree, tokens);
    std::vector<DataFlowEdge> edges;
    edges.reserve(analysis.assign_edges.size());
    for (const auto& e : analysis.assign_edges) {
        if (e.target.offset == e.source.offset) continue;
        DataFlowEdge edge;
        edge.var = e.target.name;
        edge.use_occurrence = e.target.occurrence;
        edge.src_var = e.source.name;
        edge.def_occurrence = e.source.occurrence;
        edges.push_back(std::move(edge));
    }
    return edges;
}

inline std::string render_data_flow(const std::vector<DataFlowEdge>& edges) {
    if (edges.empty()) return "No data flow.";
    std::string out;
    for (const auto& e : edges) {
        if (!out.empty()) out += "; ";
        out += "The " + ordinal(e.use_occurrence) + " " + e.var + " comes from the " +
               ordinal(e.def_occurrence) + " " + e.src_var;
    }
    return out + ".";
}

inline std::pair<std::vector<DataFlowEdge>, std::string> data_flow_view(
    const SyntaxTree& tree, const std::vector<Token>& tokens) {
    auto edges = data_flow_edges(tree, tokens);
    std::string text = render_data_flow(edges);
    return {std::move(edges), std::move(text)};
}

}  // namespace vdkit
