#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "vdkit/common.hpp"
#include "vdkit/lexer.hpp"

namespace vdkit {

// One parse-tree node. Grammar kinds follow the tree-sitter C naming
// ("expression_statement", "call_expression", ...); leaf punctuation and
// keyword nodes use the literal text as their kind.
struct AstNode {
    std::string kind;
    ByteSpan span;
    std::vector<AstNode> children;

    bool is_leaf() const { return children.empty(); }
};

struct ParseError {
    ByteSpan span;
    uint32_t line = 1;
    std::string message;
};

class SyntaxTree {
public:
    SyntaxTree() = default;
    SyntaxTree(std::string source, AstNode root, std::vector<ParseError> errors)
        : source_(std::move(source)), root_(std::move(root)), errors_(std::move(errors)) {}

    const AstNode& root() const { return root_; }
    std::string_view source() const { return source_; }
    const std::vector<ParseError>& errors() const { return errors_; }
    bool clean() const { return errors_.empty(); }

    std::string_view text(const AstNode& node) const { return slice(source_, node.span); }
    std::string_view text(ByteSpan span) const { return slice(source_, span); }

private:
    std::string source_;
    AstNode root_;
    std::vector<ParseError> errors_;
};

// Pre-order walk; the visitor returns false to skip a node's children.
inline void walk(const AstNode& node, const std::function<bool(const AstNode&)>& visit) {
    if (!visit(node)) return;
    for (const auto& child : node.children) walk(child, visit);
}

inline const AstNode* find_first(const AstNode& node, std::string_view kind) {
    const AstNode* found = nullptr;
    walk(node, [&](const AstNode& n) {
        if (found) return false;
        if (n.kind == kind) {
            found = &n;
            return false;
        }
        return true;
    });
    return found;
}

inline void collect_kind(const AstNode& node, std::string_view kind,
                         std::vector<const AstNode*>& out) {
    walk(node, [&](const AstNode& n) {
        if (n.kind == kind) out.push_back(&n);
        return true;
    });
}

inline bool contains_kind(const AstNode& node, std::string_view kind) {
    return find_first(node, kind) != nullptr;
}

// Structural equality on kinds and arity, ignoring spans and text.
inline bool isomorphic(const AstNode& a, const AstNode& b) {
    if (a.kind != b.kind || a.children.size() != b.children.size()) {
        // Leaf kinds that carry literal text as kind ("+", ";") must still
        // match exactly, which the kind comparison above covers.
        return false;
    }
    for (size_t i = 0; i < a.children.size(); ++i) {
        if (!isomorphic(a.children[i], b.children[i])) return false;
    }
    return true;
}

}  // namespace vdkit
