#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "vdkit/ast.hpp"
#include "vdkit/common.hpp"
#include "vdkit/lexer.hpp"
#include "vdkit/parser.hpp"

namespace vdkit {

// Reaching-definitions over one function: flow-sensitive, path-insensitive
// (definitions from all branch paths reach the join), loops solved to a
// fixpoint. Variables are base identifiers; writes through a[i], *p, p->f
// are weak definitions of the base (they do not kill earlier ones).
class DefUseAnalysis {
public:
    struct Site {
        std::string name;
        uint32_t occurrence = 0;  // occurrence_index_by_name of the token
        uint32_t line = 0;
        uint32_t offset = 0;  // byte offset; stable identity of the site
    };

    // use site <- the definition reaching it (one edge per reaching def).
    struct UseDef {
        Site use;
        Site def;
    };

    // assignment/initialization target <- reaching def of a right-hand-side
    // variable; this is the collapsed relation the data-flow view renders.
    struct Assign {
        Site target;
        Site source;
    };

    std::vector<UseDef> use_def_edges;
    std::vector<Assign> assign_edges;
};

namespace detail {

class DefUseWalker {
public:
    DefUseWalker(const SyntaxTree& tree, const std::vector<Token>& tokens)
        : tree_(tree) {
        for (const auto& t : tokens) {
            if (t.kind == TokenKind::Identifier) {
                by_offset_[t.span.begin] = {t.occurrence_index_by_name, t.line};
            }
        }
    }

    DefUseAnalysis run() {
        State state;
        walk_stmt(tree_.root(), state, true);
        dedupe();
        return std::move(out_);
    }

private:
    using DefSet = std::set<uint32_t>;          // def-site offsets
    using State = std::map<std::string, DefSet>;

    const SyntaxTree& tree_;
    std::unordered_map<uint32_t, std::pair<uint32_t, uint32_t>> by_offset_;
    DefUseAnalysis out_;
    std::vector<std::pair<DefUseAnalysis::Site, DefSet>> use_log_;

    DefUseAnalysis::Site site_at(const AstNode& ident) const {
        DefUseAnalysis::Site s;
        s.name = std::string(tree_.text(ident));
        s.offset = ident.span.begin;
        auto it = by_offset_.find(ident.span.begin);
        if (it != by_offset_.end()) {
            s.occurrence = it->second.first;
            s.line = it->second.second;
        }
        return s;
    }

    static void merge_into(State& into, const State& other) {
        for (const auto& [name, defs] : other) {
            into[name].insert(defs.begin(), defs.end());
        }
    }

    void record_use(const AstNode& ident, State& state, bool record) {
        if (!record) return;
        const std::string name(tree_.text(ident));
        auto it = state.find(name);
        const DefSet empty;
        const DefSet& defs = it == state.end() ? empty : it->second;
        DefUseAnalysis::Site use = site_at(ident);
        for (const uint32_t off : defs) {
            DefUseAnalysis::UseDef e;
            e.use = use;
            e.def = def_site(name, off);
            out_.use_def_edges.push_back(std::move(e));
        }
        use_log_.emplace_back(std::move(use), defs);
    }

    DefUseAnalysis::Site def_site(const std::string& name, uint32_t offset) const {
        DefUseAnalysis::Site s;
        s.name = name;
        s.offset = offset;
        auto it = by_offset_.find(offset);
        if (it != by_offset_.end()) {
            s.occurrence = it->second.first;
            s.line = it->second.second;
        }
        return s;
    }

    void add_def(const AstNode& ident, State& state, bool strong) {
        const std::string name(tree_.text(ident));
        auto& defs = state[name];
        if (strong) defs.clear();
        defs.insert(ident.span.begin);
    }

    // ---- lvalue decomposition -----------------------------------------

    static const AstNode* unwrap_parens(const AstNode* n) {
        while (n && n->kind == "parenthesized_expression") {
            const AstNode* inner = nullptr;
            for (const auto& c : n->children) {
                if (!c.is_leaf() || c.kind == "identifier") inner = &c;
            }
            if (!inner) return n;
            n = inner;
        }
        return n;
    }

    static const AstNode* lvalue_base(const AstNode* n) {
        n = unwrap_parens(n);
        if (!n) return nullptr;
        if (n->kind == "identifier") return n;
        if (n->kind == "subscript_expression" || n->kind == "field_expression" ||
            n->kind == "cast_expression") {
            return n->children.empty() ? nullptr : lvalue_base(&n->children.front());
        }
        if (n->kind == "pointer_expression" && n->children.size() == 2 &&
            n->children[0].kind == "*") {
            return lvalue_base(&n->children[1]);
        }
        return nullptr;
    }

    static bool is_plain_identifier(const AstNode* n) {
        n = unwrap_parens(n);
        return n && n->kind == "identifier";
    }

    // Uses produced by evaluating the lvalue itself (indices, pointer reads,
    // and, when `include_base`, the base variable's previous value).
    void walk_lvalue_uses(const AstNode& lhs, State& state, bool record, bool include_base) {
        const AstNode* n = unwrap_parens(&lhs);
        if (!n) return;
        if (n->kind == "identifier") {
            if (include_base) record_use(*n, state, record);
            return;
        }
        if (n->kind == "subscript_expression") {
            // base is read to locate the element; index is an ordinary use
            if (!n->children.empty()) walk_lvalue_uses(n->children.front(), state, record, true);
            for (size_t i = 1; i < n->children.size(); ++i) {
                if (!n->children[i].is_leaf()) walk_expr(n->children[i], state, record);
            }
            return;
        }
        if (n->kind == "field_expression") {
            if (!n->children.empty()) walk_lvalue_uses(n->children.front(), state, record, true);
            return;
        }
        if (n->kind == "pointer_expression" && n->children.size() == 2) {
            walk_lvalue_uses(n->children[1], state, record, true);
            return;
        }
        if (n->kind == "cast_expression") {
            if (!n->children.empty()) walk_lvalue_uses(n->children.back(), state, record, include_base);
            return;
        }
        walk_expr(*n, state, record);  // fallback: treat as plain uses
    }

    void handle_assignment(const AstNode& lhs, const std::string& op, const AstNode* rhs,
                           State& state, bool record) {
        const size_t mark = use_log_.size();
        const bool compound = op != "=";
        // Lvalue evaluation: for compound ops the base's prior value is read.
        walk_lvalue_uses(lhs, state, record, /*include_base=*/compound ||
                                                 !is_plain_identifier(&lhs));
        if (rhs) walk_expr(*rhs, state, record);

        const AstNode* base = lvalue_base(&lhs);
        if (!base) return;
        const bool strong = is_plain_identifier(&lhs);
        if (record) {
            DefUseAnalysis::Site target = site_at(*base);
            for (size_t i = mark; i < use_log_.size(); ++i) {
                // Index uses inside a weak lvalue locate the cell; they are
                // not value sources. Value sources are the rhs uses plus,
                // for compound ops, the base's prior defs.
                const auto& [use, defs] = use_log_[i];
                const bool from_rhs = rhs && use.offset >= rhs->span.begin &&
                                      use.offset < rhs->span.end;
                const bool base_prior = compound && use.offset == base->span.begin;
                if (!from_rhs && !base_prior) continue;
                for (const uint32_t off : defs) {
                    out_.assign_edges.push_back({target, def_site(use.name, off)});
                }
            }
        }
        add_def(*base, state, strong);
    }

    // ---- expressions ----------------------------------------------------

    void walk_expr(const AstNode& n, State& state, bool record) {
        const std::string& k = n.kind;
        if (k == "identifier") {
            record_use(n, state, record);
            return;
        }
        if (n.is_leaf()) return;
        if (k == "assignment_expression" && n.children.size() >= 2) {
            const AstNode& lhs = n.children[0];
            const std::string op(tree_.text(n.children[1]));
            const AstNode* rhs = n.children.size() >= 3 ? &n.children[2] : nullptr;
            handle_assignment(lhs, op, rhs, state, record);
            return;
        }
        if (k == "update_expression") {
            const AstNode* operand = nullptr;
            for (const auto& c : n.children) {
                if (!c.is_leaf() || c.kind == "identifier") operand = &c;
            }
            if (operand) handle_assignment(*operand, "++", nullptr, state, record);
            return;
        }
        if (k == "conditional_expression") {
            // cond ? a : b: both arms' effects merge
            if (!n.children.empty()) walk_expr(n.children[0], state, record);
            State arm1 = state;
            State arm2 = state;
            bool past_question = false, past_colon = false;
            for (size_t i = 1; i < n.children.size(); ++i) {
                const AstNode& c = n.children[i];
                if (c.is_leaf()) {
                    if (c.kind == "?") past_question = true;
                    if (c.kind == ":") past_colon = true;
                    if (c.kind != "identifier") continue;
                }
                if (past_colon) {
                    walk_expr(c, arm2, record);
                } else if (past_question) {
                    walk_expr(c, arm1, record);
                }
            }
            state = std::move(arm1);
            merge_into(state, arm2);
            return;
        }
        if (k == "call_expression") {
            for (const auto& c : n.children) {
                if (c.kind == "argument_list") {
                    for (const auto& a : c.children) {
                        if (!a.is_leaf() || a.kind == "identifier") walk_expr(a, state, record);
                    }
                } else if (!c.is_leaf() || c.kind == "identifier") {
                    walk_expr(c, state, record);
                }
            }
            return;
        }
        if (k == "field_expression") {
            // value read through p->f / s.f: only the base is a variable use
            if (!n.children.empty()) walk_expr(n.children.front(), state, record);
            return;
        }
        if (k == "cast_expression" || k == "sizeof_expression") {
            for (const auto& c : n.children) {
                if (c.kind == "type_descriptor" || c.is_leaf()) continue;
                walk_expr(c, state, record);
            }
            return;
        }
        if (k == "type_descriptor" || k == "error" || k == "attribute_specifier" ||
            k == "qualified_identifier" || k == "concatenated_string") {
            return;
        }
        for (const auto& c : n.children) {
            if (!c.is_leaf() || c.kind == "identifier") walk_expr(c, state, record);
        }
    }

    // ---- declarations ---------------------------------------------------

    static const AstNode* declarator_name(const AstNode& decl) {
        if (decl.kind == "identifier") return &decl;
        if (decl.kind == "function_declarator") return nullptr;  // prototype, not a variable
        for (const auto& c : decl.children) {
            if (c.kind == "identifier") return &c;
            if (c.kind == "pointer_declarator" || c.kind == "array_declarator" ||
                c.kind == "parenthesized_declarator" || c.kind == "reference_declarator") {
                if (const AstNode* n = declarator_name(c)) return n;
            }
        }
        return nullptr;
    }

    void walk_declaration(const AstNode& n, State& state, bool record) {
        for (const auto& c : n.children) {
            if (c.kind == "init_declarator" && c.children.size() >= 3) {
                const AstNode& declarator = c.children.front();
                const size_t mark = use_log_.size();
                // array sizes in the declarator are uses
                walk_declarator_exprs(declarator, state, record);
                walk_expr(c.children.back(), state, record);
                if (const AstNode* name = declarator_name(declarator)) {
                    if (record) {
                        DefUseAnalysis::Site target = site_at(*name);
                        const auto& init = c.children.back();
                        for (size_t i = mark; i < use_log_.size(); ++i) {
                            const auto& [use, defs] = use_log_[i];
                            if (use.offset < init.span.begin || use.offset >= init.span.end) {
                                continue;
                            }
                            for (const uint32_t off : defs) {
                                out_.assign_edges.push_back({target, def_site(use.name, off)});
                            }
                        }
                    }
                    add_def(*name, state, true);
                }
            } else if (c.kind == "array_declarator" || c.kind == "pointer_declarator") {
                walk_declarator_exprs(c, state, record);
                // declaration without initializer: name is not a definition
            }
        }
    }

    void walk_declarator_exprs(const AstNode& decl, State& state, bool record) {
        if (decl.kind == "array_declarator") {
            for (const auto& c : decl.children) {
                if (!c.is_leaf() && c.kind != "pointer_declarator" &&
                    c.kind != "array_declarator" && c.kind != "parenthesized_declarator") {
                    walk_expr(c, state, record);
                } else if (c.kind == "array_declarator" || c.kind == "pointer_declarator") {
                    walk_declarator_exprs(c, state, record);
                }
            }
            return;
        }
        for (const auto& c : decl.children) {
            if (!c.is_leaf()) walk_declarator_exprs(c, state, record);
        }
    }

    // Parameters are definitions at their declaration site.
    void define_parameters(const AstNode& fn, State& state) {
        const AstNode* params = find_first(fn, "parameter_list");
        if (!params) return;
        for (const auto& p : params->children) {
            if (p.kind != "parameter_declaration") continue;
            // the declarator's identifier, if any
            for (auto it = p.children.rbegin(); it != p.children.rend(); ++it) {
                if (const AstNode* name =
                        it->kind == "identifier" ? &*it : declarator_name(*it)) {
                    add_def(*name, state, true);
                    break;
                }
            }
        }
    }

    // ---- statements ------------------------------------------------------

    struct ForParts {
        const AstNode* init = nullptr;       // declaration or expression
        const AstNode* condition = nullptr;
        const AstNode* step = nullptr;
        const AstNode* body = nullptr;
    };

    static ForParts for_parts(const AstNode& n) {
        ForParts parts;
        size_t i = 0;
        const size_t count = n.children.size();
        while (i < count && n.children[i].kind != "(") ++i;
        ++i;  // past '('
        if (i < count && n.children[i].kind == "declaration") {
            parts.init = &n.children[i++];
        } else if (i < count && n.children[i].kind != ";") {
            parts.init = &n.children[i++];
            if (i < count && n.children[i].kind == ";") ++i;
        } else if (i < count) {
            ++i;  // lone ';'
        }
        if (i < count && n.children[i].kind != ";" && n.children[i].kind != ")") {
            parts.condition = &n.children[i++];
        }
        if (i < count && n.children[i].kind == ";") ++i;
        if (i < count && n.children[i].kind != ")") {
            parts.step = &n.children[i++];
        }
        if (i < count && n.children[i].kind == ")") ++i;
        if (i < count) parts.body = &n.children[i];
        return parts;
    }

    void walk_condition(const AstNode& cond, State& state, bool record) {
        // parenthesized_expression wrapper
        for (const auto& c : cond.children) {
            if (!c.is_leaf() || c.kind == "identifier") walk_expr(c, state, record);
        }
    }

    static bool states_equal(const State& a, const State& b) { return a == b; }

    void walk_stmt(const AstNode& n, State& state, bool record) {
        const std::string& k = n.kind;
        if (k == "function_definition") {
            define_parameters(n, state);
            for (const auto& c : n.children) {
                if (c.kind == "compound_statement" || c.kind == "declaration") {
                    walk_stmt(c, state, record);
                }
            }
            return;
        }
        if (k == "fragment" || k == "compound_statement" || k == "labeled_statement" ||
            k == "case_statement") {
            for (const auto& c : n.children) {
                if (!c.is_leaf()) walk_stmt(c, state, record);
            }
            return;
        }
        if (k == "declaration") {
            walk_declaration(n, state, record);
            return;
        }
        if (k == "expression_statement" || k == "return_statement") {
            for (const auto& c : n.children) {
                if (!c.is_leaf() || c.kind == "identifier") walk_expr(c, state, record);
            }
            return;
        }
        if (k == "if_statement") {
            const AstNode* cond = nullptr;
            const AstNode* then_stmt = nullptr;
            const AstNode* else_clause = nullptr;
            for (const auto& c : n.children) {
                if (c.kind == "parenthesized_expression" && !cond) cond = &c;
                else if (c.kind == "else_clause") else_clause = &c;
                else if (!c.is_leaf() && cond && !then_stmt) then_stmt = &c;
            }
            if (cond) walk_condition(*cond, state, record);
            State then_state = state;
            if (then_stmt) walk_stmt(*then_stmt, then_state, record);
            if (else_clause) {
                State else_state = state;
                for (const auto& c : else_clause->children) {
                    if (!c.is_leaf()) walk_stmt(c, else_state, record);
                }
                state = std::move(then_state);
                merge_into(state, else_state);
            } else {
                merge_into(state, then_state);
            }
            return;
        }
        if (k == "while_statement") {
            const AstNode* cond = find_child(n, "parenthesized_expression");
            const AstNode* body = last_statement_child(n);
            const State entry = state;
            State body_in = entry;
            for (int iter = 0; iter < 4; ++iter) {
                State s = body_in;
                if (cond) walk_condition(*cond, s, false);
                if (body) walk_stmt(*body, s, false);
                State next = entry;
                merge_into(next, s);
                if (states_equal(next, body_in)) break;
                body_in = std::move(next);
            }
            State s = body_in;
            if (cond) walk_condition(*cond, s, record);
            if (body) walk_stmt(*body, s, record);
            state = entry;
            merge_into(state, s);  // zero iterations possible
            return;
        }
        if (k == "do_statement") {
            const AstNode* cond = find_child(n, "parenthesized_expression");
            const AstNode* body = first_statement_child(n);
            const State entry = state;
            State body_in = entry;
            for (int iter = 0; iter < 4; ++iter) {
                State s = body_in;
                if (body) walk_stmt(*body, s, false);
                if (cond) walk_condition(*cond, s, false);
                State next = entry;
                merge_into(next, s);
                if (states_equal(next, body_in)) break;
                body_in = std::move(next);
            }
            State s = body_in;
            if (body) walk_stmt(*body, s, record);
            if (cond) walk_condition(*cond, s, record);
            state = std::move(s);  // body runs at least once
            return;
        }
        if (k == "for_statement") {
            const ForParts parts = for_parts(n);
            if (parts.init) {
                if (parts.init->kind == "declaration") {
                    walk_declaration(*parts.init, state, record);
                } else {
                    walk_expr(*parts.init, state, record);
                }
            }
            const State entry = state;
            State body_in = entry;
            for (int iter = 0; iter < 4; ++iter) {
                State s = body_in;
                if (parts.condition) walk_expr(*parts.condition, s, false);
                if (parts.body) walk_stmt(*parts.body, s, false);
                if (parts.step) walk_expr(*parts.step, s, false);
                State next = entry;
                merge_into(next, s);
                if (states_equal(next, body_in)) break;
                body_in = std::move(next);
            }
            State s = body_in;
            if (parts.condition) walk_expr(*parts.condition, s, record);
            if (parts.body) walk_stmt(*parts.body, s, record);
            if (parts.step) walk_expr(*parts.step, s, record);
            state = entry;
            merge_into(state, s);
            return;
        }
        if (k == "switch_statement") {
            const AstNode* cond = find_child(n, "parenthesized_expression");
            if (cond) walk_condition(*cond, state, record);
            const AstNode* body = last_statement_child(n);
            State s = state;
            if (body) walk_stmt(*body, s, record);
            merge_into(state, s);
            return;
        }
        if (k == "break_statement" || k == "continue_statement" || k == "goto_statement" ||
            k == "error" || k == "preproc_directive") {
            return;
        }
        // unknown statement-like node: walk expressions conservatively
        for (const auto& c : n.children) {
            if (!c.is_leaf()) walk_stmt(c, state, record);
        }
    }

    static const AstNode* find_child(const AstNode& n, std::string_view kind) {
        for (const auto& c : n.children) {
            if (c.kind == kind) return &c;
        }
        return nullptr;
    }

    static const AstNode* last_statement_child(const AstNode& n) {
        for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
            if (!it->is_leaf() && it->kind != "parenthesized_expression") return &*it;
        }
        return nullptr;
    }

    static const AstNode* first_statement_child(const AstNode& n) {
        for (const auto& c : n.children) {
            if (!c.is_leaf() && c.kind != "parenthesized_expression") return &c;
        }
        return nullptr;
    }

    void dedupe() {
        auto site_key = [](const DefUseAnalysis::Site& s) { return s.offset; };
        {
            std::set<std::pair<uint32_t, uint32_t>> seen;
            std::vector<DefUseAnalysis::UseDef> kept;
            for (auto& e : out_.use_def_edges) {
                if (seen.insert({site_key(e.use), site_key(e.def)}).second) {
                    kept.push_back(std::move(e));
                }
            }
            out_.use_def_edges = std::move(kept);
        }
        {
            std::set<std::pair<uint32_t, uint32_t>> seen;
            std::vector<DefUseAnalysis::Assign> kept;
            for (auto& e : out_.assign_edges) {
                if (e.target.offset == e.source.offset) continue;
                if (seen.insert({site_key(e.target), site_key(e.source)}).second) {
                    kept.push_back(std::move(e));
                }
            }
            out_.assign_edges = std::move(kept);
        }
    }
};

}  // namespace detail

inline DefUseAnalysis analyze_def_use(const SyntaxTree& tree, const std::vector<Token>& tokens) {
    return detail::DefUseWalker(tree, tokens).run();
}

}  // namespace vdkit
