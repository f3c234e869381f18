#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vdkit/ast.hpp"
#include "vdkit/common.hpp"
#include "vdkit/lexer.hpp"

namespace vdkit {

enum class Language { C, Cpp };

namespace detail {

// Recursive-descent parser for the function-level C subset, with enough C++
// tolerance for mixed corpora. Unknown constructs degrade to opaque leaves
// or error nodes; they are reported, never dropped.
class Parser {
public:
    Parser(std::string_view src, std::vector<Token> toks, Language lang,
           std::vector<ParseError>& errors)
        : src_(src), toks_(std::move(toks)), lang_(lang), errors_(errors) {}

    AstNode parse_function_definition() {
        if (toks_.empty()) throw ParseFailure("no tokens: input is empty or comment-only");

        std::vector<AstNode> children;
        while (check_kind(TokenKind::Preproc)) children.push_back(leaf());

        auto specifiers = parse_declaration_specifiers(true);
        for (auto& s : specifiers) children.push_back(std::move(s));

        if (at_end()) throw ParseFailure("no function declarator found");
        AstNode declarator = parse_declarator(false);
        if (find_first(declarator, "function_declarator") == nullptr) {
            throw ParseFailure("no function declarator found");
        }

        // K&R parameter declarations between the declarator and the body.
        std::vector<AstNode> knr;
        while (!at_end() && !check("{") && looks_like_declaration()) {
            knr.push_back(parse_declaration());
        }

        if (!check("{")) throw ParseFailure("function body not found");
        AstNode body = parse_compound_statement();

        children.push_back(std::move(declarator));
        for (auto& d : knr) children.push_back(std::move(d));
        children.push_back(std::move(body));

        // Tolerate trailing semicolons and preprocessor lines only.
        while (!at_end()) {
            if (check(";") || check_kind(TokenKind::Preproc)) {
                children.push_back(leaf());
                continue;
            }
            throw ParseFailure("unexpected tokens after function body");
        }

        AstNode root = make_node("function_definition", std::move(children));
        root.span = {0, static_cast<uint32_t>(src_.size())};
        return root;
    }

    AstNode parse_fragment_root() {
        std::vector<AstNode> children;
        while (!at_end()) children.push_back(parse_statement());
        AstNode root;
        root.kind = "fragment";
        root.span = {0, static_cast<uint32_t>(src_.size())};
        root.children = std::move(children);
        return root;
    }

private:
    std::string_view src_;
    std::vector<Token> toks_;
    size_t pos_ = 0;
    Language lang_;
    std::vector<ParseError>& errors_;

    // ---- token cursor -------------------------------------------------

    bool at_end() const { return pos_ >= toks_.size(); }
    const Token& cur() const { return toks_[pos_]; }
    const Token* peek(size_t k = 0) const {
        return pos_ + k < toks_.size() ? &toks_[pos_ + k] : nullptr;
    }
    bool check(std::string_view text) const { return !at_end() && cur().text == text; }
    bool check_kind(TokenKind k) const { return !at_end() && cur().kind == k; }
    bool check_at(size_t k, std::string_view text) const {
        const Token* t = peek(k);
        return t && t->text == text;
    }

    void report(const Token& tok, std::string message) {
        errors_.push_back({tok.span, tok.line, std::move(message)});
    }

    AstNode token_leaf(const Token& t, std::string kind) {
        AstNode n;
        n.kind = std::move(kind);
        n.span = t.span;
        return n;
    }

    // Consume the current token as a leaf; default kind rules apply.
    AstNode leaf(const char* kind_override = nullptr) {
        const Token& t = toks_[pos_++];
        if (kind_override) return token_leaf(t, kind_override);
        switch (t.kind) {
            case TokenKind::Identifier: return token_leaf(t, "identifier");
            case TokenKind::Number: return token_leaf(t, "number_literal");
            case TokenKind::String: return token_leaf(t, "string_literal");
            case TokenKind::CharLiteral: return token_leaf(t, "char_literal");
            case TokenKind::Preproc: return token_leaf(t, "preproc_directive");
            default: return token_leaf(t, t.text);
        }
    }

    static AstNode make_node(std::string kind, std::vector<AstNode> children) {
        AstNode n;
        n.kind = std::move(kind);
        n.children = std::move(children);
        if (!n.children.empty()) {
            n.span = {n.children.front().span.begin, n.children.back().span.end};
        }
        return n;
    }

    // Zero-width node anchored at the current position; used when an error
    // path must not consume the token it stopped at.
    AstNode empty_error_here() {
        AstNode n;
        n.kind = "error";
        const uint32_t at = at_end() ? (toks_.empty() ? 0u : toks_.back().span.end)
                                     : cur().span.begin;
        n.span = {at, at};
        return n;
    }

    // Consume tokens into an error node until a statement boundary; tracks
    // bracket depth so a stray '}' that closes an enclosing block survives.
    // May return a zero-width node when already at a boundary.
    AstNode error_statement(const char* message) {
        report(at_end() ? toks_.back() : cur(), message);
        std::vector<AstNode> eaten;
        int depth = 0;
        while (!at_end()) {
            const std::string& t = cur().text;
            if (depth == 0 && (t == "}" || t == ")")) break;
            if (t == "(" || t == "[" || t == "{") ++depth;
            if (t == ")" || t == "]" || t == "}") --depth;
            const bool stop = (depth <= 0 && t == ";");
            eaten.push_back(leaf());
            if (stop) break;
        }
        if (eaten.empty()) return empty_error_here();
        return make_node("error", std::move(eaten));
    }

    // ---- statements ----------------------------------------------------

    // Guarantees progress: a statement parse that consumed nothing swallows
    // one token as an error, so enclosing loops always terminate.
    AstNode parse_statement() {
        const size_t before = pos_;
        AstNode s = parse_statement_inner();
        if (pos_ == before && !at_end()) {
            report(cur(), "skipping unexpected token '" + cur().text + "'");
            std::vector<AstNode> kids;
            kids.push_back(leaf());
            return make_node("error", std::move(kids));
        }
        return s;
    }

    AstNode parse_statement_inner() {
        if (at_end()) return empty_error_here();
        if (check_kind(TokenKind::Preproc)) return leaf();
        if (check("{")) return parse_compound_statement();
        if (check_kind(TokenKind::Keyword)) {
            const std::string& kw = cur().text;
            if (kw == "if") return parse_if_statement();
            if (kw == "while") return parse_while_statement();
            if (kw == "do") return parse_do_statement();
            if (kw == "for") return parse_for_statement();
            if (kw == "switch") return parse_switch_statement();
            if (kw == "return") return parse_return_statement();
            if (kw == "break") return parse_jump_statement("break_statement");
            if (kw == "continue") return parse_jump_statement("continue_statement");
            if (kw == "goto") return parse_goto_statement();
            if (kw == "case" || kw == "default") return parse_case_statement();
            if (kw == "else") return error_statement("'else' without matching 'if'");
        }
        if (check_kind(TokenKind::Identifier) && check_at(1, ":") && !check_at(1, "::")) {
            std::vector<AstNode> kids;
            kids.push_back(leaf("statement_identifier"));
            kids.push_back(leaf());  // ':'
            if (!at_end() && !check("}")) kids.push_back(parse_statement());
            return make_node("labeled_statement", std::move(kids));
        }
        if (looks_like_declaration()) return parse_declaration();
        if (check(";")) {
            std::vector<AstNode> kids;
            kids.push_back(leaf());
            return make_node("expression_statement", std::move(kids));
        }
        return parse_expression_statement();
    }

    AstNode parse_compound_statement() {
        std::vector<AstNode> kids;
        kids.push_back(leaf());  // '{'
        while (!at_end() && !check("}")) kids.push_back(parse_statement());
        if (check("}")) {
            kids.push_back(leaf());
        } else {
            report(toks_.back(), "unterminated block: missing '}'");
        }
        return make_node("compound_statement", std::move(kids));
    }

    AstNode parse_paren_condition() {
        std::vector<AstNode> kids;
        if (!check("(")) {
            return error_statement("expected '(' after control keyword");
        }
        kids.push_back(leaf());  // '('
        kids.push_back(parse_full_expression());
        expect(")", kids);
        return make_node("parenthesized_expression", std::move(kids));
    }

    void expect(std::string_view text, std::vector<AstNode>& kids) {
        if (check(text)) {
            kids.push_back(leaf());
        } else {
            report(at_end() ? toks_.back() : cur(),
                   "expected '" + std::string(text) + "'");
        }
    }

    AstNode parse_if_statement() {
        std::vector<AstNode> kids;
        kids.push_back(leaf());  // 'if'
        kids.push_back(parse_paren_condition());
        kids.push_back(parse_statement());
        if (check("else")) {
            std::vector<AstNode> els;
            els.push_back(leaf());
            els.push_back(parse_statement());
            kids.push_back(make_node("else_clause", std::move(els)));
        }
        return make_node("if_statement", std::move(kids));
    }

    AstNode parse_while_statement() {
        std::vector<AstNode> kids;
        kids.push_back(leaf());
        kids.push_back(parse_paren_condition());
        kids.push_back(parse_statement());
        return make_node("while_statement", std::move(kids));
    }

    AstNode parse_do_statement() {
        std::vector<AstNode> kids;
        kids.push_back(leaf());
        kids.push_back(parse_statement());
        if (check("while")) {
            kids.push_back(leaf());
            kids.push_back(parse_paren_condition());
            expect(";", kids);
        } else {
            report(at_end() ? toks_.back() : cur(), "expected 'while' after do-body");
        }
        return make_node("do_statement", std::move(kids));
    }

    AstNode parse_for_statement() {
        std::vector<AstNode> kids;
        kids.push_back(leaf());  // 'for'
        if (!check("(")) {
            kids.push_back(error_statement("expected '(' after 'for'"));
            return make_node("for_statement", std::move(kids));
        }
        kids.push_back(leaf());  // '('
        if (check(";")) {
            kids.push_back(leaf());
        } else if (looks_like_declaration()) {
            kids.push_back(parse_declaration());
        } else {
            kids.push_back(parse_full_expression());
            expect(";", kids);
        }
        if (!check(";")) kids.push_back(parse_full_expression());
        expect(";", kids);
        if (!check(")")) kids.push_back(parse_full_expression());
        expect(")", kids);
        kids.push_back(parse_statement());
        return make_node("for_statement", std::move(kids));
    }

    AstNode parse_switch_statement() {
        std::vector<AstNode> kids;
        kids.push_back(leaf());
        kids.push_back(parse_paren_condition());
        kids.push_back(parse_statement());
        return make_node("switch_statement", std::move(kids));
    }

    AstNode parse_case_statement() {
        std::vector<AstNode> kids;
        const bool is_default = check("default");
        kids.push_back(leaf());  // 'case' or 'default'
        if (!is_default) kids.push_back(parse_expr(kTernaryBp));
        expect(":", kids);
        while (!at_end() && !check("}") && !check("case") && !check("default")) {
            kids.push_back(parse_statement());
        }
        return make_node("case_statement", std::move(kids));
    }

    AstNode parse_return_statement() {
        std::vector<AstNode> kids;
        kids.push_back(leaf());
        if (!check(";")) kids.push_back(parse_full_expression());
        expect(";", kids);
        return make_node("return_statement", std::move(kids));
    }

    AstNode parse_jump_statement(const char* kind) {
        std::vector<AstNode> kids;
        kids.push_back(leaf());
        expect(";", kids);
        return make_node(kind, std::move(kids));
    }

    AstNode parse_goto_statement() {
        std::vector<AstNode> kids;
        kids.push_back(leaf());
        if (check_kind(TokenKind::Identifier)) kids.push_back(leaf("statement_identifier"));
        expect(";", kids);
        return make_node("goto_statement", std::move(kids));
    }

    AstNode parse_expression_statement() {
        std::vector<AstNode> kids;
        kids.push_back(parse_full_expression());
        expect(";", kids);
        return make_node("expression_statement", std::move(kids));
    }

    // ---- declarations ---------------------------------------------------

    static bool is_scalar_type_keyword(std::string_view t) {
        return t == "void" || t == "char" || t == "short" || t == "int" || t == "long" ||
               t == "float" || t == "double" || t == "signed" || t == "unsigned" ||
               t == "_Bool" || t == "bool" || t == "auto";
    }

    static bool is_qualifier_keyword(std::string_view t) {
        return t == "const" || t == "volatile" || t == "static" || t == "extern" ||
               t == "register" || t == "inline" || t == "restrict" || t == "typedef" ||
               t == "constexpr" || t == "mutable" || t == "virtual" || t == "_Atomic" ||
               t == "_Thread_local" || t == "_Noreturn";
    }

    static bool is_attribute_identifier(std::string_view t) {
        return t == "__attribute__" || t == "__attribute" || t == "__declspec" ||
               t == "__extension__" || t == "__forceinline" || t == "__inline" ||
               t == "__inline__" || t == "__restrict" || t == "__restrict__" ||
               t == "__asm__" || t == "__volatile__" || t == "__const";
    }

    bool looks_like_declaration() const {
        size_t k = pos_;
        auto text = [&](size_t j) -> std::string_view {
            return j < toks_.size() ? std::string_view(toks_[j].text) : std::string_view();
        };
        auto kind = [&](size_t j) {
            return j < toks_.size() ? toks_[j].kind : TokenKind::Punct;
        };
        while (k < toks_.size() &&
               (is_qualifier_keyword(text(k)) || is_attribute_identifier(text(k)))) {
            ++k;
            if (text(k) == "(") {  // attribute argument list
                int depth = 0;
                while (k < toks_.size()) {
                    if (text(k) == "(") ++depth;
                    if (text(k) == ")" && --depth == 0) { ++k; break; }
                    ++k;
                }
            }
        }
        if (k >= toks_.size()) return false;
        if (is_scalar_type_keyword(text(k))) return true;
        if (text(k) == "struct" || text(k) == "union" || text(k) == "enum") return true;
        if (kind(k) != TokenKind::Identifier) return false;

        // Identifier-led: accept the classic "T x", "T *x", "T **x = ...",
        // and function-pointer shapes. Anything else is an expression.
        ++k;
        while (text(k) == "::" && kind(k + 1) == TokenKind::Identifier) k += 2;
        if (lang_ == Language::Cpp && text(k) == "<") {
            size_t j = k + 1;
            int depth = 1;
            while (j < toks_.size() && depth > 0) {
                if (text(j) == "<") ++depth;
                else if (text(j) == ">") --depth;
                else if (text(j) == ">>") depth -= 2;
                else if (text(j) == ";" || text(j) == "{" || text(j) == "}") return false;
                ++j;
            }
            if (depth > 0) return false;
            k = j;
        }
        size_t stars = 0;
        while (text(k) == "*" || (lang_ == Language::Cpp && (text(k) == "&" || text(k) == "&&")) ||
               is_qualifier_keyword(text(k))) {
            if (text(k) == "*" || text(k) == "&" || text(k) == "&&") ++stars;
            ++k;
        }
        if (kind(k) == TokenKind::Identifier) {
            if (stars > 0) {
                const std::string_view after = text(k + 1);
                return after == "=" || after == ";" || after == "," || after == "[" ||
                       after == ")" || after == "(";
            }
            return true;
        }
        if (text(k) == "(" && text(k + 1) == "*") return true;  // T (*f)(...)
        return false;
    }

    AstNode attribute_specifier() {
        std::vector<AstNode> kids;
        kids.push_back(leaf());
        if (check("(")) {
            int depth = 0;
            while (!at_end()) {
                const std::string& t = cur().text;
                if (t == "(") ++depth;
                const bool close = (t == ")" && depth == 1);
                if (t == ")") --depth;
                kids.push_back(leaf());
                if (close) break;
            }
        }
        return make_node("attribute_specifier", std::move(kids));
    }

    AstNode parse_struct_specifier() {
        const std::string kw = cur().text;  // struct / union / enum
        std::vector<AstNode> kids;
        kids.push_back(leaf());
        if (check_kind(TokenKind::Identifier)) kids.push_back(leaf("type_identifier"));
        if (check("{")) {
            // Opaque body: balanced token run, no field-level parse.
            std::vector<AstNode> body;
            int depth = 0;
            while (!at_end()) {
                const std::string& t = cur().text;
                if (t == "{") ++depth;
                const bool close = (t == "}" && depth == 1);
                if (t == "}") --depth;
                body.push_back(leaf());
                if (close) break;
            }
            kids.push_back(make_node(kw == "enum" ? "enumerator_list" : "field_declaration_list",
                                     std::move(body)));
        }
        return make_node(kw + "_specifier", std::move(kids));
    }

    std::vector<AstNode> parse_declaration_specifiers(bool top_level) {
        std::vector<AstNode> out;
        bool have_type = false;
        std::vector<AstNode> scalars;
        auto flush_scalars = [&] {
            if (scalars.empty()) return;
            if (scalars.size() == 1) {
                scalars.front().kind = "primitive_type";
                out.push_back(std::move(scalars.front()));
            } else {
                out.push_back(make_node("sized_type_specifier", std::move(scalars)));
            }
            scalars.clear();
        };
        while (!at_end()) {
            const std::string& t = cur().text;
            if (check_kind(TokenKind::Preproc) && top_level) {
                out.push_back(leaf());
                continue;
            }
            if (is_qualifier_keyword(t)) {
                flush_scalars();
                out.push_back(leaf());
                continue;
            }
            if (check_kind(TokenKind::Identifier) && is_attribute_identifier(t)) {
                flush_scalars();
                out.push_back(attribute_specifier());
                continue;
            }
            if (is_scalar_type_keyword(t)) {
                // "signed", "unsigned", "short", "long" chain with a base type.
                scalars.push_back(leaf());
                have_type = true;
                continue;
            }
            if (t == "struct" || t == "union" || t == "enum") {
                flush_scalars();
                out.push_back(parse_struct_specifier());
                have_type = true;
                continue;
            }
            if (check_kind(TokenKind::Identifier) && !have_type) {
                // Possible typedef name; if a real type keyword follows, this
                // identifier was a macro-style specifier instead.
                const Token* next = peek(1);
                const bool next_is_type =
                    next && (is_scalar_type_keyword(next->text) || next->text == "struct" ||
                             next->text == "union" || next->text == "enum");
                if (next_is_type) {
                    out.push_back(leaf());
                    continue;
                }
                out.push_back(parse_type_name());
                have_type = true;
                continue;
            }
            break;
        }
        flush_scalars();
        return out;
    }

    AstNode parse_type_name() {
        AstNode name = leaf("type_identifier");
        while (check("::") && peek(1) && peek(1)->kind == TokenKind::Identifier) {
            std::vector<AstNode> kids;
            kids.push_back(std::move(name));
            kids.push_back(leaf());
            kids.push_back(leaf("type_identifier"));
            name = make_node("qualified_identifier", std::move(kids));
        }
        if (lang_ == Language::Cpp && check("<")) {
            std::vector<AstNode> kids;
            kids.push_back(std::move(name));
            int depth = 0;
            while (!at_end()) {
                const std::string& t = cur().text;
                if (t == "<") ++depth;
                bool close = false;
                if (t == ">") { --depth; close = depth == 0; }
                if (t == ">>") { depth -= 2; close = depth <= 0; }
                if (t == ";" || t == "{") break;
                kids.push_back(leaf());
                if (close) break;
            }
            name = make_node("template_type", std::move(kids));
        }
        return name;
    }

    AstNode parse_declaration() {
        std::vector<AstNode> kids = parse_declaration_specifiers(false);
        bool first = true;
        while (!at_end() && !check(";")) {
            if (!first) {
                if (check(",")) {
                    kids.push_back(leaf());
                } else {
                    break;
                }
            }
            first = false;
            AstNode decl = parse_declarator(false);
            if (check("=")) {
                std::vector<AstNode> init;
                init.push_back(std::move(decl));
                init.push_back(leaf());
                init.push_back(parse_initializer());
                decl = make_node("init_declarator", std::move(init));
            }
            kids.push_back(std::move(decl));
            if (!check(",")) break;
        }
        if (check(";")) {
            kids.push_back(leaf());
        } else if (!at_end() && !check("}") && !check(")")) {
            kids.push_back(error_statement("malformed declaration"));
        } else {
            report(at_end() ? toks_.back() : cur(), "expected ';' after declaration");
        }
        return make_node("declaration", std::move(kids));
    }

    AstNode parse_declarator(bool allow_abstract) {
        if (check("*") || (lang_ == Language::Cpp && (check("&") || check("&&")))) {
            const bool ref = !check("*");
            std::vector<AstNode> kids;
            kids.push_back(leaf());
            while (!at_end() && (is_qualifier_keyword(cur().text) ||
                                 (check_kind(TokenKind::Identifier) &&
                                  is_attribute_identifier(cur().text)))) {
                kids.push_back(leaf());
            }
            if (!at_end() && (check_kind(TokenKind::Identifier) || check("(") || check("*") ||
                              check("&") || check("&&"))) {
                kids.push_back(parse_declarator(allow_abstract));
            } else if (!allow_abstract) {
                report(at_end() ? toks_.back() : cur(), "expected declarator after '*'");
            }
            return parse_declarator_suffix(
                make_node(ref ? "reference_declarator" : "pointer_declarator", std::move(kids)));
        }
        if (check("(") && (check_at(1, "*") || check_at(1, "(") || check_at(1, "&"))) {
            std::vector<AstNode> kids;
            kids.push_back(leaf());
            kids.push_back(parse_declarator(allow_abstract));
            expect(")", kids);
            return parse_declarator_suffix(
                make_node("parenthesized_declarator", std::move(kids)));
        }
        if (check_kind(TokenKind::Identifier)) {
            AstNode name = leaf();
            while (check("::") && peek(1) && peek(1)->kind == TokenKind::Identifier) {
                std::vector<AstNode> kids;
                kids.push_back(std::move(name));
                kids.push_back(leaf());
                kids.push_back(leaf());
                name = make_node("qualified_identifier", std::move(kids));
            }
            return parse_declarator_suffix(std::move(name));
        }
        if (!allow_abstract) {
            return error_statement("expected declarator");
        }
        AstNode empty;
        empty.kind = "abstract_declarator";
        empty.span = at_end() ? ByteSpan{0, 0} : ByteSpan{cur().span.begin, cur().span.begin};
        return parse_declarator_suffix(std::move(empty));
    }

    AstNode parse_declarator_suffix(AstNode inner) {
        while (!at_end()) {
            if (check("[")) {
                std::vector<AstNode> kids;
                const bool inner_empty = inner.kind == "abstract_declarator" && inner.is_leaf();
                if (!inner_empty) kids.push_back(std::move(inner));
                kids.push_back(leaf());
                if (!check("]")) kids.push_back(parse_expr(kAssignBp));
                expect("]", kids);
                inner = make_node("array_declarator", std::move(kids));
                continue;
            }
            if (check("(")) {
                std::vector<AstNode> kids;
                const bool inner_empty = inner.kind == "abstract_declarator" && inner.is_leaf();
                if (!inner_empty) kids.push_back(std::move(inner));
                kids.push_back(parse_parameter_list());
                // Trailing cv/attribute/noexcept decorations.
                while (!at_end() && (is_qualifier_keyword(cur().text) || check("noexcept") ||
                                     check("override") || check("final") ||
                                     (check_kind(TokenKind::Identifier) &&
                                      is_attribute_identifier(cur().text)))) {
                    if (check_kind(TokenKind::Identifier) && is_attribute_identifier(cur().text)) {
                        kids.push_back(attribute_specifier());
                    } else {
                        kids.push_back(leaf());
                    }
                }
                inner = make_node("function_declarator", std::move(kids));
                continue;
            }
            break;
        }
        return inner;
    }

    AstNode parse_parameter_list() {
        std::vector<AstNode> kids;
        kids.push_back(leaf());  // '('
        bool first = true;
        while (!at_end() && !check(")")) {
            const size_t round_start = pos_;
            if (!first) {
                if (check(",")) {
                    kids.push_back(leaf());
                } else {
                    kids.push_back(error_statement("expected ',' in parameter list"));
                    if (pos_ == round_start) break;
                    continue;
                }
            }
            first = false;
            if (check("...")) {
                kids.push_back(leaf("variadic_parameter"));
                continue;
            }
            std::vector<AstNode> param = parse_declaration_specifiers(false);
            if (param.empty() && check_kind(TokenKind::Identifier)) {
                // K&R-style bare parameter name.
                param.push_back(leaf());
            } else if (!at_end() && !check(",") && !check(")")) {
                param.push_back(parse_declarator(true));
            }
            if (check("=")) {  // C++ default argument
                param.push_back(leaf());
                param.push_back(parse_expr(kAssignBp));
            }
            if (param.empty()) {
                kids.push_back(error_statement("malformed parameter"));
            } else {
                kids.push_back(make_node("parameter_declaration", std::move(param)));
            }
            if (pos_ == round_start) break;  // no progress; bail out
        }
        expect(")", kids);
        return make_node("parameter_list", std::move(kids));
    }

    AstNode parse_initializer() {
        if (check("{")) return parse_initializer_list();
        return parse_expr(kAssignBp);
    }

    AstNode parse_initializer_list() {
        std::vector<AstNode> kids;
        kids.push_back(leaf());  // '{'
        while (!at_end() && !check("}")) {
            const size_t round_start = pos_;
            if (check(",")) {
                kids.push_back(leaf());
                continue;
            }
            if (check(".") || check("[")) {
                // Designators: consume tokens up to '=' as opaque leaves.
                std::vector<AstNode> des;
                while (!at_end() && !check("=") && !check(",") && !check("}")) {
                    if (check("[")) {
                        des.push_back(leaf());
                        if (!check("]")) des.push_back(parse_expr(kAssignBp));
                        if (check("]")) des.push_back(leaf());
                    } else {
                        des.push_back(leaf());
                    }
                }
                if (check("=")) des.push_back(leaf());
                des.push_back(parse_initializer());
                kids.push_back(make_node("initializer_pair", std::move(des)));
                if (pos_ == round_start) break;
                continue;
            }
            kids.push_back(parse_initializer());
            if (pos_ == round_start) break;  // no progress; bail out
        }
        expect("}", kids);
        return make_node("initializer_list", std::move(kids));
    }

    // ---- expressions ----------------------------------------------------

    static constexpr int kAssignBp = 2;
    static constexpr int kTernaryBp = 3;

    int binary_bp(std::string_view op) const {
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
        return -1;
    }

    static bool is_assignment_op(std::string_view op) {
        return op == "=" || op == "+=" || op == "-=" || op == "*=" || op == "/=" ||
               op == "%=" || op == "<<=" || op == ">>=" || op == "&=" || op == "|=" ||
               op == "^=";
    }

    AstNode parse_full_expression() {
        AstNode e = parse_expr(kAssignBp);
        while (check(",")) {
            std::vector<AstNode> kids;
            kids.push_back(std::move(e));
            kids.push_back(leaf());
            kids.push_back(parse_expr(kAssignBp));
            e = make_node("comma_expression", std::move(kids));
        }
        return e;
    }

    AstNode parse_expr(int min_bp) {
        AstNode lhs = parse_unary();
        while (!at_end()) {
            const std::string& op = cur().text;
            if (is_assignment_op(op)) {
                if (kAssignBp < min_bp) break;
                std::vector<AstNode> kids;
                kids.push_back(std::move(lhs));
                kids.push_back(leaf());
                kids.push_back(parse_expr(kAssignBp));  // right-assoc
                lhs = make_node("assignment_expression", std::move(kids));
                continue;
            }
            if (op == "?") {
                if (kTernaryBp < min_bp) break;
                std::vector<AstNode> kids;
                kids.push_back(std::move(lhs));
                kids.push_back(leaf());
                if (!check(":")) kids.push_back(parse_full_expression());
                expect(":", kids);
                kids.push_back(parse_expr(kTernaryBp));
                lhs = make_node("conditional_expression", std::move(kids));
                continue;
            }
            const int bp = binary_bp(op);
            if (bp < 0 || bp < min_bp) break;
            std::vector<AstNode> kids;
            kids.push_back(std::move(lhs));
            kids.push_back(leaf());
            kids.push_back(parse_expr(bp + 1));
            lhs = make_node("binary_expression", std::move(kids));
        }
        return lhs;
    }

    AstNode parse_unary() {
        if (at_end()) {
            report(toks_.back(), "expected expression");
            return empty_error_here();
        }
        const std::string& t = cur().text;
        if (t == "!" || t == "~" || t == "-" || t == "+") {
            std::vector<AstNode> kids;
            kids.push_back(leaf());
            kids.push_back(parse_unary());
            return make_node("unary_expression", std::move(kids));
        }
        if (t == "*" || t == "&") {
            std::vector<AstNode> kids;
            kids.push_back(leaf());
            kids.push_back(parse_unary());
            return make_node("pointer_expression", std::move(kids));
        }
        if (t == "++" || t == "--") {
            std::vector<AstNode> kids;
            kids.push_back(leaf());
            kids.push_back(parse_unary());
            return make_node("update_expression", std::move(kids));
        }
        if (t == "sizeof" || t == "_Alignof") {
            std::vector<AstNode> kids;
            kids.push_back(leaf());
            if (check("(") && type_in_parens_at(pos_)) {
                kids.push_back(leaf());  // '('
                kids.push_back(parse_type_descriptor());
                expect(")", kids);
            } else {
                kids.push_back(parse_unary());
            }
            return make_node("sizeof_expression", std::move(kids));
        }
        if (t == "(" && type_in_parens_at(pos_)) {
            std::vector<AstNode> kids;
            kids.push_back(leaf());  // '('
            kids.push_back(parse_type_descriptor());
            expect(")", kids);
            if (check("{")) {
                // Compound literal: (T){ ... }
                kids.push_back(parse_initializer_list());
                return parse_postfix_suffix(
                    make_node("compound_literal_expression", std::move(kids)));
            }
            kids.push_back(parse_unary());
            return make_node("cast_expression", std::move(kids));
        }
        if (lang_ == Language::Cpp && (t == "new" || t == "delete" || t == "throw")) {
            std::vector<AstNode> kids;
            const std::string kw = t;
            kids.push_back(leaf());
            if (kw == "delete" && check("[")) {
                kids.push_back(leaf());
                expect("]", kids);
            }
            if (!check(";") && !check(")") && !check(",") && !at_end()) {
                kids.push_back(parse_unary());
            }
            return make_node(kw + "_expression", std::move(kids));
        }
        return parse_postfix();
    }

    // Morphology of common typedef names: "size_t", kernel u32/s64 fixed-width
    // aliases, and the usual system aliases.
    static bool looks_like_type_name(std::string_view name) {
        if (name.size() > 2 && name.substr(name.size() - 2) == "_t") return true;
        static const std::unordered_set<std::string_view> names = {
            "bool", "u8", "u16", "u32", "u64", "s8", "s16", "s32", "s64",
            "uint", "ulong", "ushort", "uchar", "byte",
            "BYTE", "WORD", "DWORD", "BOOL", "HANDLE", "LPVOID", "va_list",
        };
        return names.count(name) > 0;
    }

    // A '(' at `lparen` opens a cast/type context: keyword-led types always;
    // identifier-led when the shape is unambiguous (a '*', a following
    // operand token that no expression parse allows, or a typedef-looking
    // name ahead of a unary operand).
    bool type_in_parens_at(size_t lparen) const {
        size_t k = lparen + 1;
        auto text = [&](size_t j) -> std::string_view {
            return j < toks_.size() ? std::string_view(toks_[j].text) : std::string_view();
        };
        auto kind = [&](size_t j) {
            return j < toks_.size() ? toks_[j].kind : TokenKind::Punct;
        };
        while (k < toks_.size() && is_qualifier_keyword(text(k))) ++k;
        if (k >= toks_.size()) return false;
        const bool keyword_led = is_scalar_type_keyword(text(k)) || text(k) == "struct" ||
                                 text(k) == "union" || text(k) == "enum";
        if (keyword_led) return true;
        if (kind(k) != TokenKind::Identifier) return false;

        // Identifier-led: the contents must be type-shaped.
        size_t j = k + 1;
        bool saw_star = false;
        while (j < toks_.size() && text(j) != ")") {
            if (text(j) == "*") {
                saw_star = true;
            } else if (text(j) != "[" && text(j) != "]" && !is_qualifier_keyword(text(j)) &&
                       kind(j) != TokenKind::Number) {
                return false;
            }
            ++j;
        }
        if (j >= toks_.size()) return false;
        if (saw_star) return true;

        // "(name) operand": a parenthesized expression followed directly by
        // an identifier or literal has no expression parse, so cast it is.
        const TokenKind after_kind = kind(j + 1);
        if (after_kind == TokenKind::Identifier || after_kind == TokenKind::Number ||
            after_kind == TokenKind::String || after_kind == TokenKind::CharLiteral) {
            return true;
        }
        // "(size_t)(...)" / "(size_t)-1": name morphology breaks the tie
        // against "(x)(y)" calls and "(x) - y" subtraction.
        if (looks_like_type_name(text(k))) {
            const std::string_view after = text(j + 1);
            return after == "(" || after == "-" || after == "+" || after == "!" ||
                   after == "~" || after == "*" || after == "&";
        }
        return false;
    }

    AstNode parse_type_descriptor() {
        std::vector<AstNode> kids = parse_declaration_specifiers(false);
        // Abstract declarator part: *, [], (*)() runs, consumed structurally.
        while (!at_end() && !check(")")) {
            if (check("*") || check("[") || check("]") || check("(") ||
                is_qualifier_keyword(cur().text)) {
                if (check("(")) {
                    int depth = 0;
                    while (!at_end()) {
                        const std::string& t = cur().text;
                        if (t == "(") ++depth;
                        const bool close = (t == ")" && depth == 1);
                        if (t == ")") --depth;
                        kids.push_back(leaf());
                        if (close) break;
                    }
                } else {
                    kids.push_back(leaf());
                }
                continue;
            }
            break;
        }
        if (kids.empty()) {
            report(at_end() ? toks_.back() : cur(), "expected type");
            return make_node("error", {});
        }
        return make_node("type_descriptor", std::move(kids));
    }

    AstNode parse_postfix() { return parse_postfix_suffix(parse_primary()); }

    AstNode parse_postfix_suffix(AstNode base) {
        while (!at_end()) {
            const std::string& t = cur().text;
            if (t == "(") {
                std::vector<AstNode> args;
                args.push_back(leaf());
                while (!at_end() && !check(")")) {
                    const size_t round_start = pos_;
                    if (check(",")) {
                        args.push_back(leaf());
                        continue;
                    }
                    args.push_back(parse_expr(kAssignBp));
                    if (pos_ == round_start) break;  // no progress; bail out
                }
                expect(")", args);
                std::vector<AstNode> kids;
                kids.push_back(std::move(base));
                kids.push_back(make_node("argument_list", std::move(args)));
                base = make_node("call_expression", std::move(kids));
                continue;
            }
            if (t == "[") {
                std::vector<AstNode> kids;
                kids.push_back(std::move(base));
                kids.push_back(leaf());
                if (!check("]")) kids.push_back(parse_full_expression());
                expect("]", kids);
                base = make_node("subscript_expression", std::move(kids));
                continue;
            }
            if (t == "." || t == "->") {
                std::vector<AstNode> kids;
                kids.push_back(std::move(base));
                kids.push_back(leaf());
                if (check_kind(TokenKind::Identifier)) {
                    kids.push_back(leaf("field_identifier"));
                } else {
                    report(at_end() ? toks_.back() : cur(), "expected field name");
                }
                base = make_node("field_expression", std::move(kids));
                continue;
            }
            if (t == "++" || t == "--") {
                std::vector<AstNode> kids;
                kids.push_back(std::move(base));
                kids.push_back(leaf());
                base = make_node("update_expression", std::move(kids));
                continue;
            }
            break;
        }
        return base;
    }

    AstNode parse_primary() {
        if (at_end()) {
            report(toks_.back(), "expected expression");
            return empty_error_here();
        }
        const Token& t = cur();
        if (t.kind == TokenKind::Identifier) {
            AstNode name = leaf();
            while (check("::") && peek(1) && peek(1)->kind == TokenKind::Identifier) {
                std::vector<AstNode> kids;
                kids.push_back(std::move(name));
                kids.push_back(leaf());
                kids.push_back(leaf());
                name = make_node("qualified_identifier", std::move(kids));
            }
            return name;
        }
        if (t.kind == TokenKind::Number) return leaf();
        if (t.kind == TokenKind::CharLiteral) return leaf();
        if (t.kind == TokenKind::String) {
            AstNode first = leaf();
            if (check_kind(TokenKind::String)) {
                std::vector<AstNode> kids;
                kids.push_back(std::move(first));
                while (check_kind(TokenKind::String)) kids.push_back(leaf());
                return make_node("concatenated_string", std::move(kids));
            }
            return first;
        }
        if (t.kind == TokenKind::Preproc) return leaf();
        if (t.text == "(") {
            std::vector<AstNode> kids;
            kids.push_back(leaf());
            kids.push_back(parse_full_expression());
            expect(")", kids);
            return make_node("parenthesized_expression", std::move(kids));
        }
        if (t.text == "true" || t.text == "false" || t.text == "nullptr" || t.text == "this") {
            return leaf();
        }
        if (t.text == "{") {
            return parse_initializer_list();
        }
        report(t, "unexpected token '" + t.text + "' in expression");
        if (t.text == ";" || t.text == ")" || t.text == "]" || t.text == "}" ||
            t.text == "," || t.text == ":") {
            return empty_error_here();  // leave boundary tokens to the caller
        }
        return leaf("error");
    }
};

}  // namespace detail

struct ParseOptions {
    Language language = Language::C;
};

// Parses one standalone function definition. Throws EncodingError on invalid
// UTF-8 and ParseFailure when no function definition is recognizable; syntax
// trouble inside the body surfaces as error nodes plus SyntaxTree::errors().
inline SyntaxTree parse_function(std::string_view code, ParseOptions opt = {}) {
    if (!is_valid_utf8(code)) throw EncodingError("function text is not valid UTF-8");
    std::vector<ParseError> errors;
    auto tokens = lex(code);
    detail::Parser parser(code, std::move(tokens), opt.language, errors);
    AstNode root = parser.parse_function_definition();
    return SyntaxTree(std::string(code), std::move(root), std::move(errors));
}

// Parses a statement sequence (no enclosing function); root kind "fragment".
inline SyntaxTree parse_fragment(std::string_view code, ParseOptions opt = {}) {
    if (!is_valid_utf8(code)) throw EncodingError("fragment text is not valid UTF-8");
    std::vector<ParseError> errors;
    auto tokens = lex(code);
    detail::Parser parser(code, std::move(tokens), opt.language, errors);
    AstNode root = parser.parse_fragment_root();
    return SyntaxTree(std::string(code), std::move(root), std::move(errors));
}

}  // namespace vdkit
