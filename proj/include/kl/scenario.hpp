#pragma once

// Scenario files: a line-oriented language declaring one space, named sets,
// step functions, closed chains and sequence templates, followed by commands.
//
//   space 2
//   set S = d0 >= 1
//   func f = {1 on (S), 0 on (complement(S))}
//   template T = family value=1 pieces=(w*i, w*i + k] for i < k
//   rank gamma f with T

#include "kl/constructions.hpp"
#include "kl/corpus.hpp"
#include "kl/verify.hpp"

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace kl::scn {

inline constexpr const char* version = "klrank 1.0.0";

struct SourceLoc {
    std::size_t line = 0;
    std::size_t column = 0;
};

class ScenarioError : public std::runtime_error {
public:
    ScenarioError(SourceLoc loc, const std::string& message, const std::string& expected = {})
        : std::runtime_error(format(loc, message, expected)), loc_(loc), message_(message), expected_(expected)
    {
    }
    SourceLoc loc() const { return loc_; }
    const std::string& message() const { return message_; }
    const std::string& expected() const { return expected_; }

private:
    static std::string format(SourceLoc loc, const std::string& m, const std::string& e)
    {
        std::string s = "line " + std::to_string(loc.line) + ", column " + std::to_string(loc.column) + ": " + m;
        if (!e.empty()) s += " (expected " + e + ")";
        return s;
    }
    SourceLoc loc_;
    std::string message_, expected_;
};

enum class DeclKind { set, func, chain, templ };

inline const char* decl_kind_str(DeclKind k)
{
    switch (k) {
    case DeclKind::set: return "set";
    case DeclKind::func: return "func";
    case DeclKind::chain: return "chain";
    case DeclKind::templ: return "template";
    }
    return "?";
}

struct Decl {
    DeclKind kind;
    std::string name;
    std::string canonical;
    SourceLoc loc;
};

struct Command {
    std::string verb;
    std::vector<std::string> args;
    SourceLoc loc;

    std::string str() const
    {
        std::string s = verb;
        for (const auto& a : args) s += " " + a;
        return s;
    }
};

class Scenario {
public:
    std::size_t dims = 0;
    std::vector<Decl> decls;
    std::vector<Command> commands;
    std::map<std::string, RepSet> sets;
    std::map<std::string, StepFunction> funcs;
    std::map<std::string, ClosedChain> chains;
    std::map<std::string, SeqTemplate> templates;

    Space space() const { return Space(dims); }

    const Decl* find(const std::string& name) const
    {
        for (const auto& d : decls)
            if (d.name == name) return &d;
        return nullptr;
    }

    std::size_t count(DeclKind k) const
    {
        std::size_t n = 0;
        for (const auto& d : decls) n += d.kind == k;
        return n;
    }

    /// Semantic equality: same space, same declarations up to canonical form,
    /// same commands.
    bool operator==(const Scenario& o) const
    {
        if (dims != o.dims || decls.size() != o.decls.size() || commands.size() != o.commands.size()) return false;
        for (std::size_t i = 0; i < decls.size(); ++i)
            if (decls[i].kind != o.decls[i].kind || decls[i].name != o.decls[i].name || decls[i].canonical != o.decls[i].canonical) return false;
        for (std::size_t i = 0; i < commands.size(); ++i)
            if (commands[i].verb != o.commands[i].verb || commands[i].args != o.commands[i].args) return false;
        return true;
    }
};

// ---------------------------------------------------------------------------
// Printing helpers shared with the parser

inline std::string affine_str(const AffineTerm& a)
{
    std::vector<std::pair<std::int64_t, std::string>> parts;
    if (a.constant) parts.emplace_back(a.constant, "");
    if (a.per_index) parts.emplace_back(a.per_index, "i");
    if (a.per_stage) parts.emplace_back(a.per_stage, "k");
    if (parts.empty()) return "0";
    std::string s;
    for (std::size_t n = 0; n < parts.size(); ++n) {
        auto [c, v] = parts[n];
        const std::int64_t m = c < 0 ? -c : c;
        if (n == 0) s += c < 0 ? "-" : "";
        else s += c < 0 ? " - " : " + ";
        if (v.empty()) s += std::to_string(m);
        else s += (m == 1 ? "" : std::to_string(m) + "*") + v;
    }
    return s;
}

inline std::string coef_str(const AffineTerm& a)
{
    const bool simple = (a.is_constant() && a.constant >= 0) || a == AffineTerm{0, 1, 0} || a == AffineTerm{0, 0, 1};
    return simple ? affine_str(a) : "(" + affine_str(a) + ")";
}

inline std::string endpoint_str(const std::vector<AffineTerm>& e)
{
    std::string s;
    for (std::size_t p = e.size(); p-- > 0;) {
        if (e[p] == AffineTerm{}) continue;
        const bool one = e[p] == AffineTerm{1, 0, 0};
        std::string m;
        if (p == 0) m = coef_str(e[p]);
        else m = (p == 1 ? std::string("w") : "w^" + std::to_string(p)) + (one ? "" : "*" + coef_str(e[p]));
        s += (s.empty() ? "" : " + ") + m;
    }
    return s.empty() ? "0" : s;
}

inline std::string family_str(const Rational& value, const IntervalFamily& f)
{
    return "family value=" + rational_str(value) + " pieces=(" + endpoint_str(f.lo) + ", " + endpoint_str(f.hi) + "] for i < " + affine_str(f.count);
}

inline std::string function_str(const StepFunction& f)
{
    std::string s = "{";
    for (std::size_t i = 0; i < f.pieces().size(); ++i)
        s += (i ? ", " : "") + rational_str(f.pieces()[i].value) + " on (" + f.pieces()[i].set.str() + ")";
    s += "}";
    if (!f.domain().is_full()) s = "restrict(" + s + ", (" + f.domain().str() + "))";
    return s;
}

// ---------------------------------------------------------------------------
// Parser

namespace detail {

inline const std::set<std::string>& reserved_words()
{
    static const std::set<std::string> w{"space", "set", "func", "chain", "template", "all", "empty", "top", "any", "in", "notin",
                                         "limits", "successors", "parity", "parity_a", "parity_b", "cl", "complement", "interior",
                                         "level", "point", "upto", "interval", "chi", "const", "sum", "scale", "times", "restrict",
                                         "derive", "oscillation", "family", "canonical", "constant", "collars", "value", "pieces",
                                         "for", "on", "with", "w", "i", "k", "rank", "report", "iterate", "convert", "approx",
                                         "separate", "verify"};
    return w;
}

inline bool is_digit_clause(const std::string& w)
{
    return w.size() > 1 && w[0] == 'd' && std::all_of(w.begin() + 1, w.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

class Cursor {
public:
    Cursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

    SourceLoc loc()
    {
        ws();
        return SourceLoc{line_, pos_ + 1};
    }
    std::size_t pos() const { return pos_; }
    void seek(std::size_t p) { pos_ = p; }

    void ws()
    {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '#') pos_ = text_.size();
    }

    bool at_end()
    {
        ws();
        return pos_ >= text_.size();
    }

    char peek()
    {
        ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool eat(std::string_view s)
    {
        ws();
        if (text_.substr(pos_, s.size()) != s) return false;
        pos_ += s.size();
        return true;
    }

    void expect(std::string_view s, const std::string& what)
    {
        if (!eat(s)) fail("unexpected " + describe(), what);
    }

    void expect_end()
    {
        if (!at_end()) fail("unexpected " + describe(), "end of line");
    }

    std::string describe()
    {
        ws();
        if (pos_ >= text_.size()) return "end of line";
        if (auto w = peek_ident()) return "'" + *w + "'";
        if (std::isdigit(static_cast<unsigned char>(text_[pos_]))) return "number";
        return "'" + std::string(1, text_[pos_]) + "'";
    }

    std::optional<std::string> peek_ident()
    {
        ws();
        std::size_t e = pos_;
        if (e >= text_.size() || !(std::isalpha(static_cast<unsigned char>(text_[e])) || text_[e] == '_')) return std::nullopt;
        while (e < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[e])) || text_[e] == '_')) ++e;
        return std::string(text_.substr(pos_, e - pos_));
    }

    std::string ident(const std::string& what)
    {
        auto w = peek_ident();
        if (!w) fail("unexpected " + describe(), what);
        pos_ += w->size();
        return *w;
    }

    bool eat_word(std::string_view w)
    {
        auto p = peek_ident();
        if (!p || *p != w) return false;
        pos_ += w.size();
        return true;
    }

    void expect_word(std::string_view w)
    {
        if (!eat_word(w)) fail("unexpected " + describe(), "'" + std::string(w) + "'");
    }

    std::uint64_t number(const std::string& what)
    {
        ws();
        std::size_t e = pos_;
        while (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) ++e;
        if (e == pos_) fail("unexpected " + describe(), what);
        if (e - pos_ > 9) fail("number too large", what);
        std::uint64_t v = std::stoull(std::string(text_.substr(pos_, e - pos_)));
        pos_ = e;
        return v;
    }

    Rational rational(const std::string& what = "a rational number")
    {
        ws();
        const SourceLoc at = loc();
        std::size_t e = pos_;
        if (e < text_.size() && text_[e] == '-') ++e;
        const std::size_t digits = e;
        while (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) ++e;
        if (e == digits) fail("unexpected " + describe(), what);
        if (e < text_.size() && text_[e] == '/') {
            ++e;
            const std::size_t d2 = e;
            while (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) ++e;
            if (e == d2) {
                pos_ = e;
                fail("missing denominator", what);
            }
        }
        std::string tok(text_.substr(pos_, e - pos_));
        pos_ = e;
        const bool neg = tok[0] == '-';
        if (neg) tok.erase(0, 1);
        if (auto slash = tok.find('/'); slash != std::string::npos && Natural(tok.substr(slash + 1)) == 0)
            throw ScenarioError(at, "zero denominator");
        Rational r = parse_rational(tok);
        return neg ? Rational(-r) : r;
    }

    /// Raw text up to the next ',' or ')' at bracket depth zero.
    std::string raw_argument()
    {
        ws();
        std::size_t e = pos_;
        int depth = 0;
        while (e < text_.size()) {
            const char c = text_[e];
            if (c == '(') ++depth;
            else if (c == ')') {
                if (depth == 0) break;
                --depth;
            } else if (c == ',' && depth == 0)
                break;
            ++e;
        }
        std::string s(text_.substr(pos_, e - pos_));
        pos_ = e;
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
        return s;
    }

    /// Whitespace-separated words up to the end of line or a comment.
    std::vector<std::pair<std::string, SourceLoc>> words()
    {
        std::vector<std::pair<std::string, SourceLoc>> out;
        while (!at_end()) {
            const SourceLoc l = loc();
            std::size_t e = pos_;
            while (e < text_.size() && text_[e] != ' ' && text_[e] != '\t' && text_[e] != '\r' && text_[e] != '#') ++e;
            out.emplace_back(std::string(text_.substr(pos_, e - pos_)), l);
            pos_ = e;
        }
        return out;
    }

    [[noreturn]] void fail(const std::string& message, const std::string& expected = {}) { throw ScenarioError(loc(), message, expected); }

private:
    std::string_view text_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(Scenario& sc) : sc_(sc) {}

    void statement(Cursor& c)
    {
        const SourceLoc at = c.loc();
        const std::string word = c.ident("a declaration or command");
        if (word == "space") {
            if (sc_.dims) throw ScenarioError(at, "space declared twice");
            if (!sc_.decls.empty() || !sc_.commands.empty()) throw ScenarioError(at, "space must be the first statement");
            const SourceLoc nat = c.loc();
            const auto k = c.number("number of digits");
            if (k < 1 || k > 8) throw ScenarioError(nat, "space dimension " + std::to_string(k) + " out of range", "1 to 8");
            sc_.dims = k;
            c.expect_end();
            return;
        }
        if (!sc_.dims) throw ScenarioError(at, "space must be declared before '" + word + "'", "'space K'");
        if (word == "set" || word == "func" || word == "chain" || word == "template") return declaration(c, word, at);
        static const std::set<std::string> verbs{"rank", "report", "iterate", "convert", "approx", "separate", "verify"};
        if (verbs.count(word)) return command(c, word, at);
        throw ScenarioError(at, "unknown statement '" + word + "'", "space, set, func, chain, template or a command verb");
    }

private:
    Space space() const { return sc_.space(); }

    void declaration(Cursor& c, const std::string& word, SourceLoc at)
    {
        const SourceLoc nat = c.loc();
        const std::string name = c.ident("a name");
        if (reserved_words().count(name) || is_digit_clause(name)) throw ScenarioError(nat, "'" + name + "' is a reserved word");
        if (sc_.find(name)) throw ScenarioError(nat, "'" + name + "' is already declared");
        c.expect("=", "'='");
        Decl d{DeclKind::set, name, {}, at};
        try {
            if (word == "set") {
                RepSet s = set_expr(c);
                d.canonical = s.str();
                sc_.sets.emplace(name, std::move(s));
            } else if (word == "func") {
                d.kind = DeclKind::func;
                StepFunction f = func_expr(c);
                d.canonical = function_str(f);
                sc_.funcs.emplace(name, std::move(f));
            } else if (word == "chain") {
                d.kind = DeclKind::chain;
                ClosedChain ch = chain_expr(c);
                d.canonical = ch.str();
                sc_.chains.emplace(name, std::move(ch));
            } else {
                d.kind = DeclKind::templ;
                auto [t, text] = template_expr(c);
                d.canonical = text;
                sc_.templates.emplace(name, std::move(t));
            }
        } catch (const ValidationError& e) {
            std::string m = e.what();
            if (e.witness()) m += " (witness " + e.witness()->str() + ")";
            throw ScenarioError(at, m);
        } catch (const NotRepresentable& e) {
            throw ScenarioError(at, e.what());
        }
        c.expect_end();
        sc_.decls.push_back(std::move(d));
    }

    // -- sets --------------------------------------------------------------

    RepSet set_expr(Cursor& c)
    {
        RepSet r = set_inter(c);
        while (c.eat("|")) r = r | set_inter(c);
        return r;
    }

    RepSet set_inter(Cursor& c)
    {
        RepSet r = set_diff(c);
        while (c.eat("&")) r = r & set_diff(c);
        return r;
    }

    RepSet set_diff(Cursor& c)
    {
        RepSet r = set_atom(c);
        while (c.eat("-")) r = r - set_atom(c);
        return r;
    }

    Point ordinal_arg(Cursor& c)
    {
        const SourceLoc at = c.loc();
        const std::string text = c.raw_argument();
        try {
            Ordinal o = Ordinal::parse(text);
            if (!(o < space().top_ordinal()) && !(o == space().top_ordinal()))
                throw ScenarioError(at, "ordinal " + o.str() + " exceeds the space's top " + space().top_ordinal().str());
            return Point::from_ordinal(o, space());
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(at, e.what(), "an ordinal such as w^2*3 + w + 1");
        }
    }

    RepSet set_atom(Cursor& c)
    {
        const Space s = space();
        if (c.eat("(")) {
            RepSet r = set_expr(c);
            c.expect(")", "')'");
            return r;
        }
        const SourceLoc at = c.loc();
        auto w = c.peek_ident();
        if (!w) c.fail("unexpected " + c.describe(), "a set");
        if (is_digit_clause(*w) || *w == "top") return box(c);
        c.ident("a set");
        if (*w == "all") return RepSet::full(s);
        if (*w == "empty") return RepSet(s);
        if (*w == "limits") return RepSet::limits(s);
        if (*w == "successors") return RepSet::successors(s);
        if (*w == "parity_a") return parity_sets(s).a;
        if (*w == "parity_b") return parity_sets(s).b;
        if (*w == "cl" || *w == "complement" || *w == "interior") {
            c.expect("(", "'('");
            RepSet r = set_expr(c);
            c.expect(")", "')'");
            return *w == "cl" ? closure(r) : *w == "complement" ? r.complement() : interior(r);
        }
        if (*w == "point" || *w == "upto") {
            c.expect("(", "'('");
            Point p = ordinal_arg(c);
            c.expect(")", "')'");
            return *w == "point" ? RepSet::singleton(s, p) : RepSet::at_most(s, p);
        }
        if (*w == "interval") {
            c.expect("(", "'('");
            Point lo = ordinal_arg(c);
            c.expect(",", "','");
            Point hi = ordinal_arg(c);
            c.expect(")", "')'");
            return RepSet::interval(s, lo, hi);
        }
        if (*w == "level") {
            c.expect("(", "'('");
            const StepFunction& f = func_ref(c);
            const SourceLoc rat = c.loc();
            int rel = -1;
            for (auto [tok, id] : {std::pair{"<=", 0}, {">=", 1}, {"<", 2}, {">", 3}, {"=", 4}})
                if (c.eat(tok)) {
                    rel = id;
                    break;
                }
            if (rel < 0) throw ScenarioError(rat, "unexpected " + c.describe(), "one of <= < >= > =");
            const Rational v = c.rational();
            c.expect(")", "')'");
            switch (rel) {
            case 0: return f.level_set(Relation::less_equal, v);
            case 1: return f.level_set(Relation::greater_equal, v);
            case 2: return f.level_set(Relation::less, v);
            case 3: return f.level_set(Relation::greater, v);
            default: return f.level_set(Relation::less_equal, v) - f.level_set(Relation::less, v);
            }
        }
        if (auto it = sc_.sets.find(*w); it != sc_.sets.end()) return it->second;
        throw ScenarioError(at, unknown(*w, DeclKind::set));
    }

    std::vector<Digit> digit_list(Cursor& c)
    {
        c.expect("{", "'{'");
        std::vector<Digit> v;
        if (c.eat("}")) return v;
        do v.push_back(static_cast<Digit>(c.number("a digit value")));
        while (c.eat(","));
        c.expect("}", "',' or '}'");
        return v;
    }

    RepSet box(Cursor& c)
    {
        const std::size_t k = space().dims();
        std::vector<std::optional<DigitConstraint>> cons(k);
        bool top = false, digits = false;
        do {
            const SourceLoc at = c.loc();
            const std::string w = c.ident("a clause 'dN ...' or 'top'");
            if (w == "top") {
                if (top) throw ScenarioError(at, "duplicate 'top' clause");
                top = true;
                continue;
            }
            if (!is_digit_clause(w)) throw ScenarioError(at, "unexpected '" + w + "'", "a clause 'dN ...' or 'top'");
            const std::size_t p = std::stoul(w.substr(1));
            if (p >= k) throw ScenarioError(at, "digit position " + std::to_string(p) + " outside a space of " + std::to_string(k) + " digits");
            if (cons[p]) throw ScenarioError(at, "duplicate clause for d" + std::to_string(p));
            digits = true;
            if (c.eat_word("any")) cons[p] = DigitConstraint::any();
            else if (c.eat(">=")) cons[p] = DigitConstraint::at_least(static_cast<Digit>(c.number("a digit value")));
            else if (c.eat_word("notin")) cons[p] = DigitConstraint::cofinite(digit_list(c));
            else if (c.eat_word("in")) cons[p] = DigitConstraint::finite(digit_list(c));
            else c.fail("unexpected " + c.describe(), "any, >=, in or notin");
        } while (c.eat(";"));
        if (!digits) return RepSet::from_box(space(), Box::top_only(k));
        Box b = Box::any(k);
        b.includes_top = top;
        for (std::size_t p = 0; p < k; ++p)
            if (cons[p]) b.digits[p] = *cons[p];
        return RepSet::from_box(space(), b);
    }

    // -- functions ---------------------------------------------------------

    const StepFunction& func_ref(Cursor& c)
    {
        const SourceLoc at = c.loc();
        const std::string n = c.ident("a function name");
        auto it = sc_.funcs.find(n);
        if (it == sc_.funcs.end()) throw ScenarioError(at, unknown(n, DeclKind::func));
        return it->second;
    }

    std::vector<Piece> piece_list(Cursor& c)
    {
        c.expect("{", "'{'");
        std::vector<Piece> pieces;
        do {
            Rational v = c.rational("a piece value");
            c.expect_word("on");
            pieces.push_back(Piece{v, set_atom(c)});
        } while (c.eat(","));
        c.expect("}", "',' or '}'");
        return pieces;
    }

    StepFunction func_expr(Cursor& c)
    {
        const Space s = space();
        if (c.peek() == '{') return StepFunction(s, piece_list(c));
        auto w = c.peek_ident();
        if (!w) c.fail("unexpected " + c.describe(), "a function");
        if (*w == "parity") {
            c.ident("");
            return parity_function(s);
        }
        if (*w == "chi" || *w == "const" || *w == "sum" || *w == "scale" || *w == "times" || *w == "restrict") {
            c.ident("");
            c.expect("(", "'('");
            std::optional<StepFunction> out;
            if (*w == "chi") {
                out = StepFunction::characteristic(set_expr(c));
            } else if (*w == "const") {
                out = StepFunction::constant(s, c.rational());
            } else if (*w == "sum") {
                StepFunction a = func_expr(c);
                c.expect(",", "','");
                StepFunction b = func_expr(c);
                out = scale_add(a, b, 1, 1);
            } else if (*w == "scale") {
                Rational r = c.rational();
                c.expect(",", "','");
                StepFunction a = func_expr(c);
                out = scale_add(a, a, r, 0);
            } else if (*w == "times") {
                StepFunction a = func_expr(c);
                c.expect(",", "','");
                out = multiply(a, StepFunction::characteristic(set_expr(c)));
            } else if (c.peek() == '{') {
                std::vector<Piece> pieces = piece_list(c);
                c.expect(",", "','");
                out = StepFunction(set_expr(c), std::move(pieces));
            } else {
                StepFunction a = func_expr(c);
                c.expect(",", "','");
                const SourceLoc at = c.loc();
                RepSet y = set_expr(c);
                if (!y.subset_of(a.domain())) throw ScenarioError(at, "restriction leaves the function's domain");
                out = a.restricted(y);
            }
            c.expect(")", "')'");
            return *out;
        }
        return func_ref(c);
    }

    // -- chains ------------------------------------------------------------

    ClosedChain chain_expr(Cursor& c)
    {
        if (c.eat("[")) {
            std::vector<RepSet> sets;
            do sets.push_back(set_expr(c));
            while (c.eat(","));
            c.expect("]", "',' or ']'");
            RepSet dom = sets.front();
            return ClosedChain(std::move(dom), std::move(sets));
        }
        const SourceLoc at = c.loc();
        const std::string w = c.ident("'[', derive or oscillation");
        if (w == "derive") {
            c.expect("(", "'('");
            RepSet a = set_expr(c);
            c.expect(",", "','");
            RepSet b = set_expr(c);
            c.expect(")", "')'");
            if (!(a & b).is_empty()) throw ScenarioError(at, "derive needs disjoint sets");
            return chain_from_derivative(a, b);
        }
        if (w == "oscillation") {
            c.expect("(", "'('");
            const StepFunction& f = func_ref(c);
            c.expect(",", "','");
            const SourceLoc rat = c.loc();
            Rational e = c.rational();
            if (e <= 0) throw ScenarioError(rat, "eps must be positive");
            c.expect(")", "')'");
            return oscillation_chain(f, e);
        }
        if (auto it = sc_.chains.find(w); it != sc_.chains.end()) return it->second;
        throw ScenarioError(at, unknown(w, DeclKind::chain));
    }

    // -- templates ---------------------------------------------------------

    AffineTerm affine(Cursor& c)
    {
        AffineTerm a;
        bool neg = c.eat("-");
        for (;;) {
            std::int64_t m = 1;
            std::string var;
            if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
                m = static_cast<std::int64_t>(c.number("a number"));
                if (c.eat("*")) var = c.ident("'i' or 'k'");
            } else {
                var = c.ident("a number, 'i' or 'k'");
            }
            if (!var.empty() && var != "i" && var != "k") c.fail("unexpected '" + var + "'", "'i' or 'k'");
            if (neg) m = -m;
            (var.empty() ? a.constant : var == "i" ? a.per_index : a.per_stage) += m;
            if (c.eat("+")) neg = false;
            else if (c.peek() == '-') {
                c.eat("-");
                neg = true;
            } else
                break;
        }
        return a;
    }

    AffineTerm coef(Cursor& c)
    {
        if (c.eat("(")) {
            AffineTerm a = affine(c);
            c.expect(")", "')'");
            return a;
        }
        if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
            const auto n = static_cast<std::int64_t>(c.number("a number"));
            if (!c.eat("*")) return AffineTerm{n, 0, 0};
            const SourceLoc at = c.loc();
            const std::string v = c.ident("'i' or 'k'");
            if (v == "i") return AffineTerm{0, n, 0};
            if (v == "k") return AffineTerm{0, 0, n};
            throw ScenarioError(at, "unexpected '" + v + "'", "'i' or 'k'");
        }
        const SourceLoc at = c.loc();
        const std::string v = c.ident("a number, 'i', 'k' or '('");
        if (v == "i") return AffineTerm{0, 1, 0};
        if (v == "k") return AffineTerm{0, 0, 1};
        throw ScenarioError(at, "unexpected '" + v + "'", "a number, 'i', 'k' or '('");
    }

    std::vector<AffineTerm> endpoint(Cursor& c)
    {
        const std::size_t k = space().dims();
        std::vector<AffineTerm> e(k);
        do {
            const SourceLoc at = c.loc();
            std::size_t p = 0;
            AffineTerm m{1, 0, 0};
            if (c.eat_word("w")) {
                p = 1;
                if (c.eat("^")) p = static_cast<std::size_t>(c.number("an exponent"));
                if (c.eat("*")) m = coef(c);
            } else {
                m = coef(c);
            }
            if (p >= k) throw ScenarioError(at, "w^" + std::to_string(p) + " is not below the space's top");
            e[p].constant += m.constant;
            e[p].per_index += m.per_index;
            e[p].per_stage += m.per_stage;
        } while (c.eat("+"));
        return e;
    }

    std::pair<SeqTemplate, std::string> template_expr(Cursor& c)
    {
        std::vector<TemplateComponent> comps;
        std::vector<std::string> texts;
        do {
            const SourceLoc at = c.loc();
            const std::string w = c.ident("family, canonical, constant or collars");
            if (w == "family") {
                c.expect_word("value");
                c.expect("=", "'='");
                Rational v = c.rational();
                c.expect_word("pieces");
                c.expect("=", "'='");
                c.expect("(", "'('");
                IntervalFamily fam;
                fam.lo = endpoint(c);
                c.expect(",", "','");
                fam.hi = endpoint(c);
                c.expect("]", "']'");
                c.expect_word("for");
                c.expect_word("i");
                c.expect("<", "'<'");
                fam.count = affine(c);
                if (fam.count.per_index) throw ScenarioError(at, "the piece count cannot depend on i");
                std::string text = family_str(v, fam);
                try {
                    comps.push_back(TemplateComponent{v, fam.to_monotone(space(), text), fam, text});
                } catch (const NotRepresentable& e) {
                    throw ScenarioError(at, std::string("family not representable: ") + e.what());
                }
                texts.push_back(text);
            } else if (w == "canonical" || w == "constant") {
                c.expect("(", "'('");
                const SourceLoc fat = c.loc();
                const std::string n = c.peek_ident().value_or("");
                const StepFunction& f = func_ref(c);
                c.expect(")", "')'");
                if (!f.domain().is_full()) throw ScenarioError(fat, "templates need a function on the whole space");
                SeqTemplate t = w == "canonical" ? canonical_function_template(f) : SeqTemplate::constant(f);
                for (const auto& x : t.components()) comps.push_back(x);
                texts.push_back(w + "(" + n + ")");
            } else if (w == "collars") {
                c.expect("(", "'('");
                const SourceLoc cat = c.loc();
                const std::string n = c.ident("a chain name");
                auto it = sc_.chains.find(n);
                if (it == sc_.chains.end()) throw ScenarioError(cat, unknown(n, DeclKind::chain));
                c.expect(")", "')'");
                const SeqTemplate t = canonical_gamma_template(it->second);
                for (const auto& x : t.components()) comps.push_back(x);
                texts.push_back("collars(" + n + ")");
            } else {
                throw ScenarioError(at, "unexpected '" + w + "'", "family, canonical, constant or collars");
            }
        } while (c.eat(","));
        std::string text;
        for (std::size_t i = 0; i < texts.size(); ++i) text += (i ? ", " : "") + texts[i];
        return {SeqTemplate(space(), std::move(comps)), text};
    }

    // -- commands ----------------------------------------------------------

    struct Token {
        std::string text;
        SourceLoc loc;
    };

    void command(Cursor& c, const std::string& verb, SourceLoc at)
    {
        std::vector<Token> t;
        for (auto& [w, l] : c.words()) t.push_back(Token{w, l});
        Command cmd{verb, {}, at};
        std::size_t i = 0;
        const SourceLoc end_loc = c.loc();

        auto here = [&]() { return i < t.size() ? t[i].loc : end_loc; };
        auto seen = [&]() { return i < t.size() ? "'" + t[i].text + "'" : std::string("end of line"); };
        auto word = [&](std::initializer_list<const char*> options) {
            std::string exp;
            for (auto o : options) exp += (exp.empty() ? "" : ", ") + std::string(o);
            if (i < t.size())
                for (auto o : options)
                    if (t[i].text == o) {
                        cmd.args.push_back(t[i++].text);
                        return cmd.args.back();
                    }
            throw ScenarioError(here(), "unexpected " + seen(), "one of " + exp);
        };
        auto name = [&](DeclKind k) {
            if (i >= t.size()) throw ScenarioError(here(), "unexpected end of line", std::string("a ") + decl_kind_str(k) + " name");
            const Decl* d = sc_.find(t[i].text);
            if (!d || d->kind != k) throw ScenarioError(here(), unknown(t[i].text, k));
            cmd.args.push_back(t[i++].text);
        };
        auto rational = [&](bool positive) {
            if (i >= t.size()) throw ScenarioError(here(), "unexpected end of line", "a rational number");
            Cursor rc(t[i].text, at.line);
            Rational r;
            try {
                r = rc.rational();
                rc.expect_end();
            } catch (const ScenarioError&) {
                throw ScenarioError(here(), "unexpected " + seen(), "a rational number");
            }
            if (positive && r <= 0) throw ScenarioError(here(), "eps must be positive");
            cmd.args.push_back(rational_str(r));
            ++i;
        };
        auto optional_word = [&](const char* w) {
            if (i < t.size() && t[i].text == w) {
                cmd.args.push_back(t[i++].text);
                return true;
            }
            return false;
        };

        if (verb == "rank") {
            const std::string kind = word({"alpha", "beta", "gamma", "sep"});
            if (kind == "sep") {
                name(DeclKind::set);
                name(DeclKind::set);
            } else {
                name(DeclKind::func);
                if (kind == "gamma" && optional_word("with")) name(DeclKind::templ);
            }
        } else if (verb == "report") {
            name(DeclKind::func);
            if (optional_word("with")) name(DeclKind::templ);
        } else if (verb == "iterate") {
            const std::string kind = word({"sep", "osc", "osc0", "conv"});
            if (kind == "sep") {
                name(DeclKind::set);
                name(DeclKind::set);
            } else {
                name(kind == "conv" ? DeclKind::templ : DeclKind::func);
                rational(true);
            }
            if (optional_word("on")) name(DeclKind::set);
        } else if (verb == "convert") {
            const std::string kind = word({"chain", "template"});
            if (kind == "chain") {
                name(DeclKind::set);
                name(DeclKind::set);
            } else {
                name(DeclKind::chain);
            }
        } else if (verb == "approx") {
            name(DeclKind::func);
            rational(true);
        } else if (verb == "separate") {
            name(DeclKind::func);
            rational(false);
            rational(false);
        } else {
            const std::string kind = word({"axioms", "usc", "restriction", "rank4", "deltafin", "template", "oracle", "closure"});
            if (kind == "axioms") {
                word({"alpha", "beta", "constant"});
                if (i < t.size()) {
                    const SourceLoc nl = here();
                    Cursor nc(t[i].text, at.line);
                    std::uint64_t n = 0;
                    try {
                        n = nc.number("a corpus size");
                        nc.expect_end();
                    } catch (const ScenarioError&) {
                        throw ScenarioError(nl, "unexpected " + seen(), "a corpus size");
                    }
                    if (n == 0) throw ScenarioError(nl, "corpus size must be positive");
                    cmd.args.push_back(std::to_string(n));
                    ++i;
                }
            } else if (kind == "closure") {
                name(DeclKind::set);
            } else if (kind == "template") {
                name(DeclKind::templ);
                name(DeclKind::func);
            } else {
                name(DeclKind::func);
                if (kind == "restriction") name(DeclKind::set);
            }
        }
        if (i < t.size()) throw ScenarioError(here(), "unexpected " + seen(), "end of line");
        sc_.commands.push_back(std::move(cmd));
    }

    std::string unknown(const std::string& name, DeclKind want) const
    {
        if (const Decl* d = sc_.find(name)) return "'" + name + "' is a " + decl_kind_str(d->kind) + ", not a " + decl_kind_str(want);
        return "unknown " + std::string(decl_kind_str(want)) + " '" + name + "'";
    }

    Scenario& sc_;
};

}  // namespace detail

inline Scenario parse_scenario(std::string_view text)
{
    Scenario sc;
    detail::Parser parser(sc);
    std::size_t line = 0, start = 0;
    while (start < text.size()) {
        std::size_t e = text.find('\n', start);
        if (e == std::string_view::npos) e = text.size();
        ++line;
        detail::Cursor c(text.substr(start, e - start), line);
        if (!c.at_end()) parser.statement(c);
        start = e + 1;
    }
    if (!sc.dims) throw ScenarioError(SourceLoc{std::max<std::size_t>(line, 1), 1}, "scenario declares no space", "'space K'");
    return sc;
}

/// Canonical text; parsing it yields a scenario equal to the original.
inline std::string print_scenario(const Scenario& sc)
{
    std::string s = "space " + std::to_string(sc.dims) + "\n";
    for (const auto& d : sc.decls) s += std::string(decl_kind_str(d.kind)) + " " + d.name + " = " + d.canonical + "\n";
    for (const auto& c : sc.commands) s += c.str() + "\n";
    return s;
}

// ---------------------------------------------------------------------------
// Running

struct RunOptions {
    std::uint64_t seed = 0;
    std::optional<std::size_t> cap;
    Digit probe_bound = 5;
};

enum class Status { ok, fail, error };

inline const char* status_str(Status s) { return s == Status::ok ? "ok" : s == Status::fail ? "fail" : "error"; }

struct Record {
    std::string command;
    std::vector<std::pair<std::string, std::string>> fields;
    Status status = Status::ok;

    void add(std::string k, std::string v) { fields.emplace_back(std::move(k), std::move(v)); }
    void check(bool ok, const std::string& what)
    {
        add(what, ok ? "ok" : "fail");
        if (!ok && status == Status::ok) status = Status::fail;
    }
    std::optional<std::string> get(const std::string& k) const
    {
        for (const auto& [a, b] : fields)
            if (a == k) return b;
        return std::nullopt;
    }
};

struct Report {
    std::string version = scn::version;
    RunOptions options;
    std::vector<std::string> banners;
    std::vector<Record> records;

    std::size_t count(Status s) const
    {
        std::size_t n = 0;
        for (const auto& r : records) n += r.status == s;
        return n;
    }
    int exit_status() const { return count(Status::ok) == records.size() ? 0 : 1; }
};

inline const char* yes_no(bool b) { return b ? "yes" : "no"; }

inline void add_trace_check(Record& r, const TraceCheck& c)
{
    r.add("oracle_checked", std::to_string(c.checked));
    r.add("oracle_bounded_only", std::to_string(c.bounded_only));
    if (c.first_mismatch) r.add("oracle_mismatch", *c.first_mismatch);
    r.check(c.ok(), "oracle");
}

inline void add_rank(Record& r, const std::string& key, const RankResult& res)
{
    r.add(key, res.rank_str());
    r.add(key + "_trace", trace_str(res.trace));
    if (res.stalled) r.add(key + "_stalled", "yes");
    if (res.capped) r.add(key + "_capped", "yes");
}

namespace detail {

class Runner {
public:
    Runner(const Scenario& sc, const RunOptions& o) : sc_(sc), opt_(o), probes_(sc.space(), o.probe_bound) {}

    Record run(const Command& cmd)
    {
        Record r{cmd.str(), {}, Status::ok};
        try {
            dispatch(cmd, r);
        } catch (const ValidationError& e) {
            r.status = Status::error;
            r.add("error", e.what());
            if (e.witness()) r.add("witness", e.witness()->str());
        } catch (const RankError& e) {
            r.status = Status::error;
            r.add("error", e.what());
            r.add("stalled_at", e.stalled().str());
        } catch (const std::exception& e) {
            r.status = Status::error;
            r.add("error", e.what());
        }
        return r;
    }

private:
    const RepSet& set(const std::string& n) const { return sc_.sets.at(n); }
    const StepFunction& func(const std::string& n) const { return sc_.funcs.at(n); }
    const SeqTemplate& templ(const std::string& n) const { return sc_.templates.at(n); }

    std::optional<SeqTemplate> with_template(const Command& c, std::size_t at) const
    {
        if (c.args.size() > at + 1 && c.args[at] == "with") return templ(c.args[at + 1]);
        return std::nullopt;
    }

    void dispatch(const Command& c, Record& r)
    {
        const auto& a = c.args;
        const auto cap = opt_.cap;
        if (c.verb == "rank" && a[0] == "alpha") {
            const StepFunction& f = func(a[1]);
            AlphaResult res = alpha_detail(f, cap);
            r.add("alpha", res.rank.str());
            TraceCheck tc;
            for (const auto& p : res.pairs) {
                r.add("alpha[" + rational_str(p.p) + "," + rational_str(p.q) + "]", p.result.rank_str());
                tc.merge(verify_sep_trace(f.level_set(Relation::less_equal, p.p), f.level_set(Relation::greater_equal, p.q), p.result.trace, probes_));
            }
            add_trace_check(r, tc);
        } else if (c.verb == "rank" && a[0] == "beta") {
            const StepFunction& f = func(a[1]);
            BetaResult res = beta_detail(f, cap);
            r.add("beta", res.rank.str());
            TraceCheck tc;
            for (const auto& e : res.per_eps) {
                r.add("beta[" + rational_str(e.eps) + "]", e.result.rank_str());
                tc.merge(verify_osc_trace(f, e.eps, e.result.trace, probes_));
            }
            add_trace_check(r, tc);
        } else if (c.verb == "rank" && a[0] == "gamma") {
            const StepFunction& f = func(a[1]);
            auto t = with_template(c, 2);
            const SeqTemplate tt = t ? *t : canonical_function_template(f, cap);
            GammaBounds g = gamma_bounds(f, tt, cap, opt_.probe_bound);
            r.add("template", t ? "supplied" : "canonical");
            r.add("gamma_lower", g.lower.str());
            r.add("gamma_upper", g.upper ? g.upper->str() : "none");
            if (g.upper && *g.upper == g.lower) r.add("gamma", g.lower.str());
            r.add("gamma_eps", rational_str(g.eps));
            if (g.trace) {
                r.add("gamma_trace", trace_str(g.trace->trace));
                add_trace_check(r, verify_conv_trace(tt, g.eps, g.trace->trace, probes_));
            }
            r.check(!g.upper || g.lower <= *g.upper, "bounds_ordered");
        } else if (c.verb == "rank" && a[0] == "sep") {
            RankResult res = iterate_rank(sep_derivative(set(a[1]), set(a[2])), sc_.space(), cap);
            add_rank(r, "rank", res);
            add_trace_check(r, verify_sep_trace(set(a[1]), set(a[2]), res.trace, probes_));
        } else if (c.verb == "report") {
            const StepFunction& f = func(a[0]);
            RankReport rep = rank_report(f, with_template(c, 1), cap, opt_.probe_bound);
            r.add("alpha", rep.alpha.str());
            r.add("alpha1_upper", rep.alpha1_upper.str());
            r.add("beta", rep.beta.str());
            r.add("gamma_lower", rep.gamma_lower.str());
            r.add("gamma_upper", rep.gamma_upper ? rep.gamma_upper->str() : "none");
            for (const auto& [k, v] : rep.witnesses) r.add("witness." + k, v);
            r.check(rep.alpha <= rep.alpha1_upper && rep.alpha1_upper <= Ordinal(2) * rep.alpha, "alpha1_within_2alpha");
            r.check(rep.alpha <= rep.beta, "alpha_le_beta");
            r.check(!rep.gamma_upper || rep.gamma_lower <= *rep.gamma_upper, "gamma_bounds_ordered");
        } else if (c.verb == "iterate") {
            RepSet dom = a.size() > 2 && a[a.size() - 2] == "on" ? set(a.back()) : RepSet::full(sc_.space());
            if (!is_closed(dom)) throw ValidationError("iteration domain is not closed", min_element(closure(dom) - dom));
            if (a[0] == "sep") {
                RankResult res = iterate_rank(sep_derivative(set(a[1]), set(a[2])), dom, cap);
                add_rank(r, "rank", res);
                add_trace_check(r, verify_sep_trace(set(a[1]), set(a[2]), res.trace, probes_));
            } else if (a[0] == "osc" || a[0] == "osc0") {
                const StepFunction& f = func(a[1]);
                const Rational eps = parse_eps(a[2]);
                const bool zero = a[0] == "osc0";
                RankResult res = iterate_rank(zero ? osc0_derivative(f, eps) : osc_derivative(f, eps), dom, cap);
                add_rank(r, "rank", res);
                add_trace_check(r, zero ? verify_osc0_trace(f, eps, res.trace, probes_) : verify_osc_trace(f, eps, res.trace, probes_));
            } else {
                const SeqTemplate& t = templ(a[1]);
                const Rational eps = parse_eps(a[2]);
                bool cert = true;
                if (auto bad = verify_certificate(t, probes_)) {
                    cert = false;
                    r.add("certificate", *bad);
                }
                RankResult res = iterate_rank(conv_derivative(t, eps), dom, cap);
                add_rank(r, "rank", res);
                add_trace_check(r, verify_conv_trace(t, eps, res.trace, probes_, cert));
            }
        } else if (c.verb == "convert" && a[0] == "chain") {
            const RepSet &x = set(a[1]), &y = set(a[2]);
            if (!(x & y).is_empty()) throw ValidationError("sets are not disjoint", min_element(x & y));
            ClosedChain ch = chain_from_derivative(x, y, cap);
            ChainCertificate cert = derivative_bound_from_chain(x, y, ch);
            r.add("length", std::to_string(ch.size()));
            r.add("chain", ch.str());
            r.add("difference", transfinite_difference(ch).str());
            r.check(cert.ok, "certificate");
        } else if (c.verb == "convert") {
            const ClosedChain& ch = sc_.chains.at(a[1]);
            SeqTemplate t = canonical_gamma_template(ch);
            r.add("template", t.str());
            ChainCertificate cert = template_trace_in_chain(t, ch, cap);
            r.add("trace", trace_str(cert.trace));
            r.check(cert.ok, "trace_in_chain");
            check_template_limit(t, StepFunction::characteristic(transfinite_difference(ch)), opt_.probe_bound);
            r.check(true, "limit");
        } else if (c.verb == "approx") {
            GridApproximation g = grid_step_approximation(func(a[0]), parse_eps(a[1]), cap);
            r.add("g", function_str(g.g));
            r.add("max_error", rational_str(g.max_error));
            r.add("max_chain_length", std::to_string(g.max_chain_length));
            bool certs = true;
            for (const auto& ce : g.certificates) certs = certs && ce.ok;
            r.check(g.within_eps, "within_eps");
            r.check(certs, "certificates");
        } else if (c.verb == "separate") {
            SzepResult s = szep_separator(func(a[0]), parse_rational_arg(a[1]), parse_rational_arg(a[2]), cap);
            r.add("h", s.h.str());
            r.add("y", s.y.str());
            r.add("substituted", yes_no(s.substituted));
            r.add("chain", s.chain.str());
            r.check(s.separates, "separates");
            r.check(s.certificate.ok, "certificate");
        } else {
            verify(c, r);
        }
    }

    void verify(const Command& c, Record& r)
    {
        const auto& a = c.args;
        const auto cap = opt_.cap;
        if (a[0] == "axioms") {
            const std::size_t n = a.size() > 2 ? std::stoul(a[2]) : 25;
            RankHandle h = a[1] == "alpha" ? alpha_handle(cap) : a[1] == "beta" ? beta_handle(cap) : constant_handle(Ordinal(1));
            AxiomSuiteReport rep = rank_axiom_suite(h, axiom_corpus(opt_.seed, n, std::min<std::size_t>(4, sc_.dims + 2)), cap);
            r.add("handle", rep.handle);
            r.add("instances", std::to_string(n));
            for (int p = 1; p <= 5; ++p) {
                const auto i = static_cast<std::size_t>(p - 1);
                r.add("property" + std::to_string(p), std::to_string(rep.passed[i]) + " passed, " + std::to_string(rep.failed[i]) + " failed");
                if (auto f = rep.first_failure(p)) r.add("property" + std::to_string(p) + "_witness", f->witness);
            }
            r.check(rep.all_pass(), "suite");
        } else if (a[0] == "closure") {
            add_trace_check(r, verify_closure(set(a[1]), probes_));
        } else if (a[0] == "usc") {
            UscReport u = usc_alpha_bound(func(a[1]), cap);
            r.add("usc", yes_no(u.usc));
            if (u.alpha) r.add("alpha", u.alpha->str());
            r.check(u.bound_holds, "alpha_le_2");
            r.check(u.trace_ok, "trace");
        } else if (a[0] == "restriction") {
            RestrictionReport rr = restriction_monotonicity(func(a[1]), set(a[2]), cap);
            r.add("alpha", rr.full.str());
            r.add("alpha_restricted", rr.restricted.str());
            r.check(rr.holds, "monotone");
            r.check(rr.chains_certified, "chains");
        } else if (a[0] == "rank4") {
            Rank4Partition p = partition_rank4(func(a[1]), cap);
            r.add("pieces", std::to_string(p.pieces.size()));
            std::string ranks;
            for (const auto& pc : p.pieces) ranks += (ranks.empty() ? "" : ", ") + pc.alpha.str();
            r.add("piece_alphas", ranks);
            bool certs = true;
            for (const auto& pc : p.pieces) certs = certs && pc.certificate.ok;
            r.check(p.all_within_4, "all_within_4");
            r.check(certs, "certificates");
        } else if (a[0] == "deltafin") {
            DeltaFinReport d = delta_fin_roundtrip(func(a[1]), cap);
            r.add("alpha", d.alpha.str());
            r.add("beta_fine", d.beta_fine.str());
            if (!d.detail.empty()) r.add("detail", d.detail);
            r.check(d.forward_ok, "forward");
            r.check(d.backward_ok, "backward");
        } else if (a[0] == "template") {
            const SeqTemplate& t = templ(a[1]);
            auto cert = verify_certificate(t, probes_);
            if (cert) r.add("certificate_detail", *cert);
            r.check(!cert, "certificate");
            check_template_limit(t, func(a[2]), opt_.probe_bound);
            r.check(true, "limit");
        } else {
            const StepFunction& f = func(a[1]);
            TraceCheck tc;
            for (const auto& eps : value_gaps(f)) {
                tc.merge(verify_osc_trace(f, eps, iterate_rank(osc_derivative(f, eps), f.domain(), opt_.cap).trace, probes_));
                tc.merge(verify_osc0_trace(f, eps, iterate_rank(osc0_derivative(f, eps), f.domain(), opt_.cap).trace, probes_));
            }
            AlphaResult al = alpha_detail(f, cap);
            for (const auto& p : al.pairs)
                tc.merge(verify_sep_trace(f.level_set(Relation::less_equal, p.p), f.level_set(Relation::greater_equal, p.q), p.result.trace, probes_));
            add_trace_check(r, tc);
        }
    }

    static Rational parse_rational_arg(const std::string& s)
    {
        if (!s.empty() && s[0] == '-') return -parse_rational(s.substr(1));
        return parse_rational(s);
    }

    static Rational parse_eps(const std::string& s) { return parse_rational_arg(s); }

    const Scenario& sc_;
    RunOptions opt_;
    ProbeSet probes_;
};

}  // namespace detail

inline Report run_scenario(const Scenario& sc, const RunOptions& opt = {})
{
    Report rep;
    rep.options = opt;
    rep.banners = {vacuity_banner(), gamma_banner()};
    detail::Runner runner(sc, opt);
    for (const auto& c : sc.commands) rep.records.push_back(runner.run(c));
    return rep;
}

/// Runs only the commands whose verb is in `verbs`.
inline Report run_scenario(const Scenario& sc, const RunOptions& opt, const std::set<std::string>& verbs)
{
    Scenario filtered = sc;
    filtered.commands.clear();
    for (const auto& c : sc.commands)
        if (verbs.count(c.verb)) filtered.commands.push_back(c);
    return run_scenario(filtered, opt);
}

inline std::string cap_str(const RunOptions& o) { return o.cap ? std::to_string(*o.cap) : "default"; }

inline std::string render_text(const Report& rep)
{
    std::ostringstream os;
    os << rep.version << " report\n";
    os << "seed: " << rep.options.seed << "\ncap: " << cap_str(rep.options) << "\nprobe bound: " << rep.options.probe_bound << "\n";
    for (const auto& b : rep.banners) os << "note: " << b << "\n";
    for (std::size_t i = 0; i < rep.records.size(); ++i) {
        const Record& r = rep.records[i];
        os << "\n[" << i + 1 << "] " << r.command << "\n";
        for (const auto& [k, v] : r.fields) os << "    " << k << ": " << v << "\n";
        os << "    status: " << status_str(r.status) << "\n";
    }
    os << "\nsummary: " << rep.records.size() << " commands, " << rep.count(Status::ok) << " ok, " << rep.count(Status::fail) << " failed, "
       << rep.count(Status::error) << " errors\n";
    return os.str();
}

inline std::string render_structured(const Report& rep)
{
    std::ostringstream os;
    auto line = [&](const std::string& k, const std::string& v) {
        std::string clean = v;
        std::replace(clean.begin(), clean.end(), '\n', ' ');
        os << k << "=" << clean << "\n";
    };
    line("version", rep.version);
    line("seed", std::to_string(rep.options.seed));
    line("cap", cap_str(rep.options));
    line("probe_bound", std::to_string(rep.options.probe_bound));
    for (const auto& b : rep.banners) line("banner", b);
    for (std::size_t i = 0; i < rep.records.size(); ++i) {
        const Record& r = rep.records[i];
        line("record", std::to_string(i + 1));
        line("command", r.command);
        for (const auto& [k, v] : r.fields) line(k, v);
        line("status", status_str(r.status));
    }
    line("record", "summary");
    line("commands", std::to_string(rep.records.size()));
    line("ok", std::to_string(rep.count(Status::ok)));
    line("failed", std::to_string(rep.count(Status::fail)));
    line("errors", std::to_string(rep.count(Status::error)));
    line("exit", std::to_string(rep.exit_status()));
    return os.str();
}

inline std::string render(const Report& rep, const std::string& format)
{
    if (format == "structured") return render_structured(rep);
    if (format == "text") return render_text(rep);
    throw std::invalid_argument("unknown format '" + format + "' (expected text or structured)");
}

}  // namespace kl::scn
