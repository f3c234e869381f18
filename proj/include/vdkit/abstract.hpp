#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "vdkit/ast.hpp"
#include "vdkit/common.hpp"
#include "vdkit/parser.hpp"
#include "vdkit/source_function.hpp"

namespace vdkit {

enum class AbstractCategory { Variable, Parameter, StringLiteral };

// Injective original -> abstract-name mapping; k values are consecutive from
// zero per category, in first-appearance order.
struct AbstractionMap {
    struct Entry {
        std::string original;
        std::string abstracted;
        AbstractCategory category;
    };
    std::vector<Entry> entries;

    const Entry* find(std::string_view original) const {
        for (const auto& e : entries) {
            if (e.original == original) return &e;
        }
        return nullptr;
    }

    nlohmann::json to_json() const {
        nlohmann::json m = nlohmann::json::object();
        for (const auto& e : entries) m[e.original] = e.abstracted;
        return m;
    }
};

namespace detail {

// Collects parameter and local-variable names from declarators. Field names,
// type names, labels, and called function names never enter the tables.
struct DeclaredNames {
    std::set<std::string> params;
    std::set<std::string> locals;
};

inline const AstNode* declarator_identifier(const AstNode& decl) {
    if (decl.kind == "identifier") return &decl;
    if (decl.kind == "function_declarator") {
        // "int (*fp)(void)" declares a variable; "int fp(void)" declares a
        // function. The variable case has a parenthesized declarator inside.
        for (const auto& c : decl.children) {
            if (c.kind == "parenthesized_declarator" || c.kind == "pointer_declarator") {
                return declarator_identifier(c);
            }
        }
        return nullptr;
    }
    for (const auto& c : decl.children) {
        if (c.kind == "identifier") return &c;
        if (c.kind == "pointer_declarator" || c.kind == "array_declarator" ||
            c.kind == "parenthesized_declarator" || c.kind == "reference_declarator" ||
            c.kind == "init_declarator") {
            if (const AstNode* n = declarator_identifier(c)) return n;
        }
    }
    return nullptr;
}

inline DeclaredNames collect_declared_names(const SyntaxTree& tree) {
    DeclaredNames names;
    const AstNode& root = tree.root();

    const AstNode* fn_declarator = nullptr;
    for (const auto& c : root.children) {
        if (contains_kind(c, "parameter_list") && c.kind != "compound_statement") {
            fn_declarator = &c;
            break;
        }
    }
    if (fn_declarator) {
        const AstNode* params = find_first(*fn_declarator, "parameter_list");
        if (params) {
            for (const auto& p : params->children) {
                if (p.kind != "parameter_declaration") continue;
                if (p.children.size() == 1 && p.children.front().kind == "identifier") {
                    // K&R-style bare name
                    names.params.insert(std::string(tree.text(p.children.front())));
                    continue;
                }
                for (auto it = p.children.rbegin(); it != p.children.rend(); ++it) {
                    if (const AstNode* n = declarator_identifier(*it)) {
                        names.params.insert(std::string(tree.text(*n)));
                        break;
                    }
                }
            }
        }
    }

    // Declarations anywhere in the body (including for-init and K&R
    // parameter declarations, whose names are already parameters).
    walk(root, [&](const AstNode& n) {
        if (n.kind != "declaration") return true;
        // Declarators are the children after the last type-specifier child;
        // anything before that is specifier noise (macros, qualifiers).
        size_t first_declarator = 0;
        for (size_t i = 0; i < n.children.size(); ++i) {
            const std::string& k = n.children[i].kind;
            if (k == "primitive_type" || k == "sized_type_specifier" ||
                k == "struct_specifier" || k == "union_specifier" || k == "enum_specifier" ||
                k == "type_identifier" || k == "template_type" || k == "attribute_specifier") {
                first_declarator = i + 1;
            }
        }
        for (size_t i = first_declarator; i < n.children.size(); ++i) {
            const AstNode& c = n.children[i];
            const AstNode* name = nullptr;
            if (c.kind == "init_declarator" || c.kind == "pointer_declarator" ||
                c.kind == "array_declarator" || c.kind == "parenthesized_declarator" ||
                c.kind == "reference_declarator" || c.kind == "identifier" ||
                c.kind == "function_declarator") {
                name = declarator_identifier(c);  // null for plain prototypes
            }
            if (name) {
                const std::string text(tree.text(*name));
                if (!names.params.count(text)) names.locals.insert(text);
            }
        }
        return true;
    });
    return names;
}

inline const AstNode* function_name_node(const SyntaxTree& tree) {
    for (const auto& c : tree.root().children) {
        if (c.kind == "compound_statement") break;
        if (const AstNode* fd = find_first(c, "function_declarator")) {
            // pre-order: the declarator's own name comes before any parameter
            return find_first(*fd, "identifier");
        }
    }
    return nullptr;
}

}  // namespace detail

// Rewrites every local-variable occurrence to VARk, parameter occurrence to
// PARAMk, and string literal to "STRINGk". Everything else (the function
// name, callee names, types, fields, keywords, numbers) stays put. The
// rewritten function parses to a tree isomorphic to the original.
inline std::pair<std::string, AbstractionMap> abstract_code(const SourceFunction& fn) {
    const SyntaxTree tree = parse_function(fn);
    const detail::DeclaredNames declared = detail::collect_declared_names(tree);
    const AstNode* fn_name = detail::function_name_node(tree);

    AbstractionMap map;
    std::map<std::string, std::string, std::less<>> assigned;
    size_t next_var = 0, next_param = 0, next_string = 0;

    struct Edit {
        ByteSpan span;
        std::string replacement;
    };
    std::vector<Edit> edits;

    walk(tree.root(), [&](const AstNode& n) {
        if (n.kind == "identifier") {
            if (fn_name && n.span == fn_name->span) return true;
            const std::string text(tree.text(n));
            const bool is_param = declared.params.count(text) > 0;
            const bool is_local = !is_param && declared.locals.count(text) > 0;
            if (!is_param && !is_local) return true;
            auto it = assigned.find(text);
            if (it == assigned.end()) {
                std::string name = is_param ? "PARAM" + std::to_string(next_param++)
                                            : "VAR" + std::to_string(next_var++);
                it = assigned.emplace(text, name).first;
                map.entries.push_back({text, name,
                                       is_param ? AbstractCategory::Parameter
                                                : AbstractCategory::Variable});
            }
            edits.push_back({n.span, it->second});
            return true;
        }
        if (n.kind == "string_literal") {
            const std::string text(tree.text(n));
            auto it = assigned.find(text);
            if (it == assigned.end()) {
                std::string name = "STRING" + std::to_string(next_string++);
                it = assigned.emplace(text, name).first;
                map.entries.push_back({text, name, AbstractCategory::StringLiteral});
            }
            edits.push_back({n.span, "\"" + it->second + "\""});
            return true;
        }
        return true;
    });

    // Apply back-to-front so earlier spans stay valid.
    std::sort(edits.begin(), edits.end(),
              [](const Edit& a, const Edit& b) { return a.span.begin > b.span.begin; });
    std::string out = fn.code;
    for (const auto& e : edits) {
        out.replace(e.span.begin, e.span.end - e.span.begin, e.replacement);
    }
    return {std::move(out), std::move(map)};
}

}  // namespace vdkit
