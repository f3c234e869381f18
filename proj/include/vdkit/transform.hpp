#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "vdkit/ast.hpp"
#include "vdkit/common.hpp"
#include "vdkit/parser.hpp"
#include "vdkit/source_function.hpp"

namespace vdkit {

enum class TransformKind { CondNegate, CondExpand, LoopConvert, RelOpReverse };

inline const char* to_string(TransformKind kind) {
    switch (kind) {
        case TransformKind::CondNegate: return "cond_negate";
        case TransformKind::CondExpand: return "cond_expand";
        case TransformKind::LoopConvert: return "loop_convert";
        case TransformKind::RelOpReverse: return "relop_reverse";
    }
    return "?";
}

inline std::optional<TransformKind> transform_kind_from_string(std::string_view s) {
    if (s == "cond_negate") return TransformKind::CondNegate;
    if (s == "cond_expand") return TransformKind::CondExpand;
    if (s == "loop_convert") return TransformKind::LoopConvert;
    if (s == "relop_reverse") return TransformKind::RelOpReverse;
    return std::nullopt;
}

inline const std::vector<TransformKind>& all_transform_kinds() {
    static const std::vector<TransformKind> kinds = {
        TransformKind::CondNegate, TransformKind::CondExpand,
        TransformKind::LoopConvert, TransformKind::RelOpReverse};
    return kinds;
}

// One semantically equivalent rewrite: exactly one site differs from the
// original, and the result re-parses cleanly.
struct TransformVariant {
    std::string origin_id;
    TransformKind kind;
    size_t site_index = 0;
    std::string code;
};

struct TransformSite {
    ByteSpan span;       // statement / expression being rewritten
    std::string rewrite; // replacement text
};

namespace detail {

inline std::string trim_copy(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\n' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\n' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

struct IfParts {
    const AstNode* condition = nullptr;   // parenthesized_expression
    const AstNode* consequence = nullptr;
    const AstNode* else_clause = nullptr;
    const AstNode* alternative = nullptr; // statement inside the else clause
};

inline IfParts if_parts(const AstNode& n) {
    IfParts p;
    for (const auto& c : n.children) {
        if (c.kind == "parenthesized_expression" && !p.condition) {
            p.condition = &c;
        } else if (c.kind == "else_clause") {
            p.else_clause = &c;
            for (const auto& e : c.children) {
                if (!e.is_leaf()) p.alternative = &e;
            }
        } else if (!c.is_leaf() && p.condition && !p.consequence) {
            p.consequence = &c;
        }
    }
    return p;
}

// Condition expression inside the parentheses, unwrapped of redundant parens.
inline const AstNode* condition_expr(const AstNode* paren) {
    if (!paren) return nullptr;
    const AstNode* expr = nullptr;
    for (const auto& c : paren->children) {
        if (!c.is_leaf() || c.kind == "identifier" || c.kind == "number_literal") expr = &c;
    }
    while (expr && expr->kind == "parenthesized_expression") {
        const AstNode* inner = nullptr;
        for (const auto& c : expr->children) {
            if (!c.is_leaf() || c.kind == "identifier" || c.kind == "number_literal") inner = &c;
        }
        if (!inner) break;
        expr = inner;
    }
    return expr;
}

// True when `stmt` ends in an else-less if: appending "else" after its text
// would re-associate. Wrapping such statements in braces keeps the meaning.
inline bool has_open_if_tail(const AstNode& stmt) {
    if (stmt.kind == "if_statement") {
        const IfParts p = if_parts(stmt);
        if (!p.alternative) return true;
        return has_open_if_tail(*p.alternative);
    }
    if (stmt.kind == "while_statement" || stmt.kind == "for_statement" ||
        stmt.kind == "labeled_statement") {
        for (auto it = stmt.children.rbegin(); it != stmt.children.rend(); ++it) {
            if (!it->is_leaf()) return has_open_if_tail(*it);
        }
    }
    return false;
}

inline std::string braced_if_open(const SyntaxTree& tree, const AstNode& stmt) {
    std::string text(tree.text(stmt));
    if (has_open_if_tail(stmt)) return "{ " + text + " }";
    return text;
}

// continue / break binding to the *enclosing* loop: nested loop bodies are
// skipped; for break, switch bodies are skipped too.
inline bool contains_binding(const AstNode& body, std::string_view kind, bool skip_switch) {
    if (body.kind == kind) return true;
    if (body.kind == "while_statement" || body.kind == "for_statement" ||
        body.kind == "do_statement") {
        return false;
    }
    if (skip_switch && body.kind == "switch_statement") return false;
    for (const auto& c : body.children) {
        if (!c.is_leaf() && contains_binding(c, kind, skip_switch)) return true;
    }
    return false;
}

inline bool body_has_continue(const AstNode& body) {
    for (const auto& c : body.children) {
        if (!c.is_leaf() && contains_binding(c, "continue_statement", false)) return true;
    }
    return body.kind == "continue_statement";
}

inline bool body_has_break(const AstNode& body) {
    for (const auto& c : body.children) {
        if (!c.is_leaf() && contains_binding(c, "break_statement", true)) return true;
    }
    return body.kind == "break_statement";
}

inline bool subtree_is_clean(const AstNode& n) {
    bool clean = true;
    walk(n, [&](const AstNode& c) {
        if (c.kind == "error" || c.kind == "preproc_directive") {
            clean = false;
            return false;
        }
        return true;
    });
    return clean;
}

inline bool side_effect_free(const AstNode& n) {
    bool ok = true;
    walk(n, [&](const AstNode& c) {
        if (c.kind == "call_expression" || c.kind == "update_expression" ||
            c.kind == "assignment_expression" || c.kind == "new_expression" ||
            c.kind == "delete_expression" || c.kind == "throw_expression" ||
            c.kind == "error" || c.kind == "preproc_directive") {
            ok = false;
            return false;
        }
        return true;
    });
    return ok;
}

inline int binary_precedence(std::string_view op) {
    if (op == "||") return 4;
    if (op == "&&") return 5;
    if (op == "|") return 6;
    if (op == "^") return 7;
    if (op == "&") return 8;
    if (op == "==" || op == "!=") return 9;
    if (op == "<" || op == "<=" || op == ">" || op == ">=") return 10;
    if (op == "<<" || op == ">>") return 11;
    if (op == "+" || op == "-") return 12;
    if (op == "*" || op == "/" || op == "%") return 13;
    return 100;
}

inline int expr_precedence(const SyntaxTree& tree, const AstNode& n) {
    if (n.kind == "binary_expression" && n.children.size() >= 2) {
        return binary_precedence(tree.text(n.children[1]));
    }
    if (n.kind == "conditional_expression") return 3;
    if (n.kind == "assignment_expression") return 2;
    if (n.kind == "comma_expression") return 1;
    return 100;  // unary/postfix/primary bind tighter than any binary op
}

struct ForParts {
    std::string init;       // without trailing ';', empty if absent
    std::string condition;  // empty if absent
    std::string step;       // empty if absent
    const AstNode* body = nullptr;
    bool init_is_declaration = false;
};

inline ForParts split_for(const SyntaxTree& tree, const AstNode& n) {
    ForParts parts;
    size_t i = 0;
    const size_t count = n.children.size();
    while (i < count && n.children[i].kind != "(") ++i;
    ++i;
    if (i < count && n.children[i].kind == "declaration") {
        std::string text(tree.text(n.children[i]));
        // strip the declaration's own ';'
        while (!text.empty() && (text.back() == ';' || text.back() == ' ')) text.pop_back();
        parts.init = trim_copy(text);
        parts.init_is_declaration = true;
        ++i;
    } else if (i < count && n.children[i].kind != ";") {
        parts.init = trim_copy(tree.text(n.children[i]));
        ++i;
        if (i < count && n.children[i].kind == ";") ++i;
    } else if (i < count) {
        ++i;
    }
    if (i < count && n.children[i].kind != ";" && n.children[i].kind != ")") {
        parts.condition = trim_copy(tree.text(n.children[i]));
        ++i;
    }
    if (i < count && n.children[i].kind == ";") ++i;
    if (i < count && n.children[i].kind != ")") {
        parts.step = trim_copy(tree.text(n.children[i]));
        ++i;
    }
    if (i < count && n.children[i].kind == ")") ++i;
    if (i < count) parts.body = &n.children[i];
    return parts;
}

inline std::optional<std::string> mirror_relop(std::string_view op) {
    if (op == "<") return ">";
    if (op == "<=") return ">=";
    if (op == ">") return "<";
    if (op == ">=") return "<=";
    if (op == "==") return "==";
    if (op == "!=") return "!=";
    return std::nullopt;
}

inline void enumerate_sites_impl(const SyntaxTree& tree, TransformKind kind,
                                 std::vector<TransformSite>& out) {
    walk(tree.root(), [&](const AstNode& n) {
        switch (kind) {
            case TransformKind::CondNegate: {
                if (n.kind != "if_statement") break;
                const IfParts p = if_parts(n);
                const AstNode* cond = condition_expr(p.condition);
                if (!cond || !p.consequence || !subtree_is_clean(n)) break;
                const std::string c = trim_copy(tree.text(*cond));
                std::string rewrite = "if (!(" + c + ")) ";
                if (p.alternative) {
                    rewrite += braced_if_open(tree, *p.alternative);
                } else {
                    rewrite += "{}";
                }
                rewrite += " else " + std::string(tree.text(*p.consequence));
                out.push_back({n.span, std::move(rewrite)});
                break;
            }
            case TransformKind::CondExpand: {
                if (n.kind != "if_statement") break;
                const IfParts p = if_parts(n);
                if (p.else_clause || !p.consequence) break;
                const AstNode* cond = condition_expr(p.condition);
                if (!cond || cond->kind != "binary_expression" || cond->children.size() < 3) break;
                const std::string op(tree.text(cond->children[1]));
                if (op != "&&" && op != "||") break;
                if (!subtree_is_clean(n)) break;
                const std::string a = trim_copy(tree.text(cond->children[0]));
                const std::string b = trim_copy(tree.text(cond->children[2]));
                const std::string body(tree.text(*p.consequence));
                std::string rewrite;
                if (op == "&&") {
                    rewrite = "if (" + a + ") { if (" + b + ") " + body + " }";
                } else {
                    rewrite = "if (" + a + ") " + braced_if_open(tree, *p.consequence) +
                              " else if (" + b + ") " + body;
                }
                out.push_back({n.span, std::move(rewrite)});
                break;
            }
            case TransformKind::LoopConvert: {
                if (n.kind == "while_statement") {
                    if (!subtree_is_clean(n)) break;
                    const AstNode* paren = nullptr;
                    const AstNode* body = nullptr;
                    for (const auto& c : n.children) {
                        if (c.kind == "parenthesized_expression" && !paren) paren = &c;
                        else if (!c.is_leaf() && paren) body = &c;
                    }
                    const AstNode* cond = condition_expr(paren);
                    if (!cond || !body) break;
                    out.push_back({n.span, "for (;" + trim_copy(tree.text(*cond)) + ";) " +
                                               std::string(tree.text(*body))});
                    break;
                }
                if (n.kind != "for_statement") break;
                if (!subtree_is_clean(n)) break;
                const ForParts parts = split_for(tree, n);
                if (!parts.body) break;
                if (body_has_continue(*parts.body)) break;  // step would be skipped
                if (parts.condition.empty() && !parts.step.empty() &&
                    body_has_break(*parts.body)) {
                    break;
                }
                std::string rewrite = "{ ";
                if (!parts.init.empty()) rewrite += parts.init + "; ";
                rewrite += "while (" +
                           (parts.condition.empty() ? std::string("1") : parts.condition) +
                           ") { " + std::string(tree.text(*parts.body));
                if (!parts.step.empty()) rewrite += " " + parts.step + ";";
                rewrite += " } }";
                out.push_back({n.span, std::move(rewrite)});
                break;
            }
            case TransformKind::RelOpReverse: {
                if (n.kind != "binary_expression" || n.children.size() < 3) break;
                const auto mirrored = mirror_relop(tree.text(n.children[1]));
                if (!mirrored) break;
                const AstNode& lhs = n.children[0];
                const AstNode& rhs = n.children[2];
                if (!side_effect_free(lhs) || !side_effect_free(rhs)) break;
                const int op_prec = binary_precedence(tree.text(n.children[1]));
                // Swapped operands keep their parse: the new left side must
                // bind at least as tight as the operator, the new right side
                // strictly tighter (relationals are left-associative).
                std::string new_lhs = trim_copy(tree.text(rhs));
                if (expr_precedence(tree, rhs) < op_prec) new_lhs = "(" + new_lhs + ")";
                std::string new_rhs = trim_copy(tree.text(lhs));
                if (expr_precedence(tree, lhs) <= op_prec) new_rhs = "(" + new_rhs + ")";
                out.push_back({n.span, new_lhs + " " + *mirrored + " " + new_rhs});
                break;
            }
        }
        return true;
    });
    // pre-order visit emits parents before children; normalize to span order
    std::stable_sort(out.begin(), out.end(), [](const TransformSite& a, const TransformSite& b) {
        return a.span.begin < b.span.begin;
    });
}

}  // namespace detail

// All applicable positions for one transformation kind, in source order.
inline std::vector<TransformSite> enumerate_sites(const SyntaxTree& tree, TransformKind kind) {
    std::vector<TransformSite> out;
    detail::enumerate_sites_impl(tree, kind, out);
    return out;
}

// Rewrites the site_index-th match; the variant re-parses or this throws
// RewriteProducedParseError (a bug guard, not an expected outcome).
inline TransformVariant apply_transform(const SourceFunction& fn, TransformKind kind,
                                        size_t site_index) {
    const SyntaxTree tree = parse_function(fn);
    const auto sites = enumerate_sites(tree, kind);
    if (site_index >= sites.size()) {
        throw IneligibleSite("site " + std::to_string(site_index) + " out of range for " +
                             to_string(kind) + " (" + std::to_string(sites.size()) + " sites)");
    }
    const TransformSite& site = sites[site_index];
    std::string code = fn.code;
    code.replace(site.span.begin, site.span.end - site.span.begin, site.rewrite);

    TransformVariant variant{fn.id, kind, site_index, std::move(code)};
    try {
        const SyntaxTree check = parse_function(variant.code, ParseOptions{fn.language});
        if (check.errors().size() > tree.errors().size()) {
            throw RewriteProducedParseError("variant of '" + fn.id + "' gained parse errors");
        }
    } catch (const ParseFailure& e) {
        throw RewriteProducedParseError("variant of '" + fn.id + "' no longer parses: " +
                                        e.what());
    }
    return variant;
}

// Per-site fan-out: every kind applied at every matching position
// individually, so a function with M matches yields M variants per kind.
inline std::vector<TransformVariant> generate_variants(const SourceFunction& fn,
                                                       const std::vector<TransformKind>& kinds) {
    const SyntaxTree tree = parse_function(fn);
    std::vector<TransformVariant> variants;
    for (const TransformKind kind : kinds) {
        const auto sites = enumerate_sites(tree, kind);
        for (size_t i = 0; i < sites.size(); ++i) {
            const TransformSite& site = sites[i];
            std::string code = fn.code;
            code.replace(site.span.begin, site.span.end - site.span.begin, site.rewrite);
            TransformVariant v{fn.id, kind, i, std::move(code)};
            try {
                const SyntaxTree check = parse_function(v.code, ParseOptions{fn.language});
                if (check.errors().size() > tree.errors().size()) {
                    throw RewriteProducedParseError("variant of '" + fn.id +
                                                    "' gained parse errors");
                }
            } catch (const ParseFailure& e) {
                throw RewriteProducedParseError("variant of '" + fn.id +
                                                "' no longer parses: " + e.what());
            }
            variants.push_back(std::move(v));
        }
    }
    return variants;
}

}  // namespace vdkit
