#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vdkit/ast.hpp"
#include "vdkit/common.hpp"
#include "vdkit/dataflow.hpp"
#include "vdkit/lexer.hpp"
#include "vdkit/parser.hpp"

namespace vdkit {

// Pluggable token counter for the slice budget. The default counts lexer
// tokens; a subword-tokenizer approximation can be swapped in without
// touching the slicer.
struct TokenBudgetCounter {
    std::function<size_t(std::string_view)> count;

    size_t operator()(std::string_view text) const { return count(text); }
};

inline TokenBudgetCounter default_token_counter() {
    return {[](std::string_view text) { return lex(text).size(); }};
}

// Byte offset just past the first `budget` tokens; text.size() when the text
// has no more than `budget` tokens. Used by the truncation audit.
inline size_t token_prefix_end(std::string_view text, size_t budget) {
    const auto tokens = lex(text);
    if (tokens.size() <= budget) return text.size();
    if (budget == 0) return 0;
    return tokens[budget - 1].span.end;
}

struct LineDependenceGraph {
    struct DataEdge {
        uint32_t def_line;
        uint32_t use_line;
        std::string var;
    };
    struct ControlEdge {
        uint32_t header_line;
        uint32_t body_line;
    };

    std::set<uint32_t> nodes;  // 1-based lines that carry at least one token
    std::vector<DataEdge> data_edges;
    std::vector<ControlEdge> control_edges;

    std::map<uint32_t, std::set<uint32_t>> neighbors;  // undirected adjacency

    void add_data_edge(uint32_t def_line, uint32_t use_line, std::string var) {
        if (def_line == use_line) return;
        data_edges.push_back({def_line, use_line, std::move(var)});
        neighbors[def_line].insert(use_line);
        neighbors[use_line].insert(def_line);
    }

    void add_control_edge(uint32_t header_line, uint32_t body_line) {
        if (header_line == body_line) return;
        control_edges.push_back({header_line, body_line});
        neighbors[header_line].insert(body_line);
        neighbors[body_line].insert(header_line);
    }
};

struct SliceResult {
    std::set<uint32_t> anchor_lines;
    std::vector<uint32_t> selected_lines;  // ascending; includes structural lines
    std::string sliced_code;
    size_t token_count = 0;
    size_t budget = 0;
};

namespace detail {

inline uint32_t line_of_offset(const std::vector<Token>& tokens, uint32_t offset) {
    auto it = std::upper_bound(tokens.begin(), tokens.end(), offset,
                               [](uint32_t off, const Token& t) { return off < t.span.begin; });
    if (it == tokens.begin()) return 0;
    --it;
    return (offset >= it->span.begin && offset < it->span.end) ? it->line : 0;
}

// Lines whose tokens are all structural ({ } ; else do) carry no dependence
// and no anchor; they join a slice only to keep it parseable.
inline bool structural_token(const Token& t) {
    return t.text == "{" || t.text == "}" || t.text == ";" || t.text == "else" ||
           t.text == "do";
}

struct LineInfo {
    std::map<uint32_t, std::vector<const Token*>> tokens_by_line;
    std::set<uint32_t> token_lines;      // all lines with >= 1 token
    std::set<uint32_t> structural_lines; // subset: structural tokens only

    explicit LineInfo(const std::vector<Token>& tokens) {
        for (const auto& t : tokens) tokens_by_line[t.line].push_back(&t);
        for (const auto& [line, toks] : tokens_by_line) {
            token_lines.insert(line);
            if (std::all_of(toks.begin(), toks.end(),
                            [](const Token* t) { return structural_token(*t); })) {
                structural_lines.insert(line);
            }
        }
    }
};

inline bool is_control_statement(const AstNode& n) {
    return n.kind == "if_statement" || n.kind == "while_statement" ||
           n.kind == "for_statement" || n.kind == "do_statement" ||
           n.kind == "switch_statement";
}

}  // namespace detail

// Anchor lines: API calls, array subscripts, pointer operations (unary * and
// &, ->), and arithmetic binary operators mark the lines slicing seeds from.
inline std::set<uint32_t> detect_anchors(const SyntaxTree& tree,
                                         const std::vector<Token>& tokens) {
    std::set<uint32_t> anchors;
    auto mark = [&](const AstNode& n) {
        const uint32_t line = detail::line_of_offset(tokens, n.span.begin);
        if (line > 0) anchors.insert(line);
    };
    walk(tree.root(), [&](const AstNode& n) {
        if (n.kind == "call_expression" || n.kind == "subscript_expression") {
            mark(n);
        } else if (n.kind == "pointer_expression") {
            mark(n);  // unary * or &
        } else if (n.kind == "field_expression" && n.children.size() >= 2 &&
                   n.children[1].kind == "->") {
            mark(n);
        } else if (n.kind == "binary_expression" && n.children.size() >= 2) {
            const std::string_view op = tree.text(n.children[1]);
            if (op == "+" || op == "-" || op == "*" || op == "/" || op == "%") mark(n);
        }
        return true;
    });
    return anchors;
}

inline std::set<uint32_t> detect_anchors(const SyntaxTree& tree) {
    return detect_anchors(tree, lex(tree.source()));
}

// Data edges lift the reaching def-use relation to line granularity; control
// edges run from each control statement's condition line to every line of
// its body whose nearest enclosing control statement it is.
inline LineDependenceGraph build_ldg(const SyntaxTree& tree, const std::vector<Token>& tokens) {
    LineDependenceGraph graph;
    const detail::LineInfo lines(tokens);
    for (const uint32_t line : lines.token_lines) graph.nodes.insert(line);

    const DefUseAnalysis analysis = analyze_def_use(tree, tokens);
    std::set<std::tuple<uint32_t, uint32_t, std::string>> seen;
    for (const auto& e : analysis.use_def_edges) {
        if (e.def.line == 0 || e.use.line == 0) continue;
        if (seen.insert({e.def.line, e.use.line, e.use.name}).second) {
            graph.add_data_edge(e.def.line, e.use.line, e.use.name);
        }
    }

    // Nearest-enclosing control headers, assigned by byte region.
    struct Region {
        uint32_t begin, end;
        uint32_t header_line;
    };
    std::vector<Region> regions;
    walk(tree.root(), [&](const AstNode& n) {
        uint32_t header_line = 0;
        uint32_t body_begin = n.span.begin;
        uint32_t body_end = n.span.end;
        if (!detail::is_control_statement(n)) return true;
        if (n.kind == "do_statement") {
            // header is the trailing while-condition line; the region is the
            // body between 'do' and 'while'
            const AstNode* paren = nullptr;
            const AstNode* while_kw = nullptr;
            for (const auto& c : n.children) {
                if (c.kind == "parenthesized_expression") paren = &c;
                if (c.kind == "while") while_kw = &c;
            }
            header_line = detail::line_of_offset(
                tokens, paren ? paren->span.begin : n.span.begin);
            body_begin = n.span.begin + 2;  // past 'do'
            if (while_kw) body_end = while_kw->span.begin;
        } else {
            header_line = detail::line_of_offset(tokens, n.span.begin);
            for (const auto& c : n.children) {
                if (c.kind == "parenthesized_expression") {
                    body_begin = c.span.end;
                    break;
                }
            }
            if (n.kind == "for_statement") {
                for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
                    if (it->kind == ")") {
                        body_begin = it->span.end;
                        break;
                    }
                }
            }
        }
        if (header_line == 0) return true;
        regions.push_back({body_begin, body_end, header_line});
        return true;
    });

    std::set<std::pair<uint32_t, uint32_t>> control_seen;
    for (const auto& [line, toks] : lines.tokens_by_line) {
        const Token* first = toks.front();
        // innermost region containing this token
        const Region* best = nullptr;
        for (const auto& r : regions) {
            if (first->span.begin >= r.begin && first->span.begin < r.end) {
                if (!best || (r.begin >= best->begin && r.end <= best->end)) best = &r;
            }
        }
        if (best && best->header_line != line &&
            control_seen.insert({best->header_line, line}).second) {
            graph.add_control_edge(best->header_line, line);
        }
    }
    return graph;
}

namespace detail {

// Structural lines (braces, lone else/do/;) join a slice exactly when the
// header line of their nearest enclosing statement is selected: "if (a) {"
// pulls its "}", a body line alone stays a plain fragment.
struct StructuralPlan {
    std::map<uint32_t, uint32_t> owner_of_line;  // structural line -> owner header line

    std::set<uint32_t> implied(const std::set<uint32_t>& selected) const {
        std::set<uint32_t> out;
        for (const auto& [line, owner] : owner_of_line) {
            if (selected.count(owner)) out.insert(line);
        }
        return out;
    }
};

inline StructuralPlan plan_structural(const SyntaxTree& tree, const std::vector<Token>& tokens,
                                      const LineInfo& lines) {
    StructuralPlan plan;
    struct Owner {
        uint32_t begin, end, header_line;
    };
    std::vector<Owner> owners;
    walk(tree.root(), [&](const AstNode& n) {
        if (is_control_statement(n) || n.kind == "function_definition") {
            const uint32_t line = line_of_offset(tokens, n.span.begin);
            if (line > 0) owners.push_back({n.span.begin, n.span.end, line});
        }
        return true;
    });
    for (const uint32_t line : lines.structural_lines) {
        const Token* first = lines.tokens_by_line.at(line).front();
        const Owner* best = nullptr;
        for (const auto& o : owners) {
            if (first->span.begin >= o.begin && first->span.begin < o.end &&
                o.header_line != line) {
                if (!best || (o.begin >= best->begin && o.end <= best->end)) best = &o;
            }
        }
        if (best) plan.owner_of_line[line] = best->header_line;
    }
    return plan;
}

}  // namespace detail

// Bidirectional BFS slice from the anchor lines under a token budget.
// Candidates are admitted in (BFS depth, line number) order; once a line
// would push the assembled slice past the budget, admission stops for good.
// Lines never reached through an edge fill any remaining budget at the end,
// so an ample budget reproduces the whole function (minus blank lines).
inline SliceResult slice(const SyntaxTree& tree, const LineDependenceGraph& graph,
                         const std::set<uint32_t>& anchors, size_t budget,
                         const TokenBudgetCounter& counter = default_token_counter()) {
    const auto tokens = lex(tree.source());
    const detail::LineInfo lines(tokens);
    const detail::StructuralPlan plan = detail::plan_structural(tree, tokens, lines);

    // line texts, 1-based
    std::vector<std::string> line_text;
    {
        std::string_view src = tree.source();
        size_t start = 0;
        while (true) {
            const size_t eol = src.find('\n', start);
            line_text.emplace_back(src.substr(start, eol == std::string_view::npos
                                                         ? std::string_view::npos
                                                         : eol - start));
            if (eol == std::string_view::npos) break;
            start = eol + 1;
        }
    }
    auto text_of = [&](uint32_t line) -> std::string_view {
        return line - 1 < line_text.size() ? std::string_view(line_text[line - 1])
                                           : std::string_view();
    };

    std::set<uint32_t> candidates;  // non-structural token lines
    for (const uint32_t line : lines.token_lines) {
        if (!lines.structural_lines.count(line)) candidates.insert(line);
    }

    if (anchors.empty()) throw EmptySlice("no anchor lines detected");

    auto assemble = [&](const std::set<uint32_t>& selected) {
        std::set<uint32_t> full = selected;
        const auto implied = plan.implied(selected);
        full.insert(implied.begin(), implied.end());
        std::string out;
        for (const uint32_t line : full) {
            if (!out.empty()) out += '\n';
            out += text_of(line);
        }
        return std::make_pair(std::move(full), std::move(out));
    };

    std::set<uint32_t> selected;
    std::set<uint32_t> visited;  // generated as candidates at some depth
    bool stopped = false;

    auto try_admit = [&](uint32_t line) {
        if (stopped || selected.count(line)) return false;
        std::set<uint32_t> tentative = selected;
        tentative.insert(line);
        const auto [full, code] = assemble(tentative);
        if (counter(code) > budget) {
            stopped = true;
            return false;
        }
        selected = std::move(tentative);
        return true;
    };

    // depth 0: the anchors themselves, in line order
    std::vector<uint32_t> frontier;
    for (const uint32_t line : anchors) {
        if (!candidates.count(line)) continue;
        visited.insert(line);
        if (try_admit(line)) frontier.push_back(line);
        if (stopped) break;
    }
    if (selected.empty()) {
        throw EmptySlice("budget below the first anchor line");
    }

    // BFS rounds: neighbors of the admitted frontier, line-number order
    while (!stopped && !frontier.empty()) {
        std::set<uint32_t> next_candidates;
        for (const uint32_t line : frontier) {
            auto it = graph.neighbors.find(line);
            if (it == graph.neighbors.end()) continue;
            for (const uint32_t n : it->second) {
                if (!visited.count(n) && candidates.count(n)) next_candidates.insert(n);
            }
        }
        frontier.clear();
        for (const uint32_t line : next_candidates) {
            visited.insert(line);
            if (try_admit(line)) frontier.push_back(line);
            if (stopped) break;
        }
    }

    // leftover tier: untouched lines in line order, while budget lasts
    if (!stopped) {
        for (const uint32_t line : candidates) {
            if (visited.count(line)) continue;
            if (!try_admit(line)) break;
        }
    }

    SliceResult result;
    result.budget = budget;
    result.anchor_lines = anchors;
    auto [full, code] = assemble(selected);
    result.selected_lines.assign(full.begin(), full.end());
    result.sliced_code = std::move(code);
    result.token_count = counter(result.sliced_code);
    return result;
}

// Convenience entry: parse -> anchors -> graph -> slice.
inline SliceResult slice_function(const SyntaxTree& tree, size_t budget = 512,
                                  const TokenBudgetCounter& counter = default_token_counter()) {
    const auto tokens = lex(tree.source());
    const auto graph = build_ldg(tree, tokens);
    const auto anchors = detect_anchors(tree, tokens);
    return slice(tree, graph, anchors, budget, counter);
}

}  // namespace vdkit
