#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <compare>
#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kl {

using Natural = boost::multiprecision::cpp_int;

/// Ordinal below epsilon_0 in Cantor normal form.
///
/// The value is a finite sum w^e1*c1 + ... + w^en*cn with e1 > ... > en and
/// every ci >= 1. Exponents are themselves ordinals. The empty sum is 0.
/// Two ordinals are equal iff their term lists are identical.
class Ordinal {
public:
    struct Term;

    Ordinal() = default;
    Ordinal(unsigned long long n);  // NOLINT: naturals convert implicitly

    static Ordinal natural(const Natural& n);
    static Ordinal omega();
    static Ordinal omega_pow(Ordinal exponent);
    /// Validates the CNF invariants; throws std::invalid_argument otherwise.
    static Ordinal from_terms(std::vector<Term> terms);
    static Ordinal parse(std::string_view text);

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_finite() const;
    bool is_successor() const;
    bool is_limit() const;
    std::optional<Natural> finite_value() const;
    /// Exponent of the leading term; 0 for the zero ordinal.
    Ordinal leading_exponent() const;

    std::string str() const;

private:
    std::vector<Term> terms_;
};

struct Ordinal::Term {
    Ordinal exponent;
    Natural coefficient;
};

std::strong_ordering cmp(const Ordinal& a, const Ordinal& b);

inline std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b) { return cmp(a, b); }
inline bool operator==(const Ordinal& a, const Ordinal& b) { return cmp(a, b) == 0; }

Ordinal add(const Ordinal& a, const Ordinal& b);
Ordinal mul(const Ordinal& a, const Ordinal& b);
inline Ordinal omega_pow(const Ordinal& e) { return Ordinal::omega_pow(e); }

inline Ordinal operator+(const Ordinal& a, const Ordinal& b) { return add(a, b); }
inline Ordinal operator*(const Ordinal& a, const Ordinal& b) { return mul(a, b); }

/// Least eta >= 1 with x <= w^eta; envelope(0) = 1.
Ordinal envelope(const Ordinal& x);

/// a is dominated by b at the scale of omega powers: every w^eta (eta >= 1)
/// bounding b also bounds a.
bool lesssim(const Ordinal& a, const Ordinal& b);
bool approx(const Ordinal& a, const Ordinal& b);

inline std::ostream& operator<<(std::ostream& os, const Ordinal& o) { return os << o.str(); }

// ---------------------------------------------------------------------------

inline Ordinal::Ordinal(unsigned long long n)
{
    if (n != 0) terms_.push_back(Term{Ordinal{}, Natural(n)});
}

inline Ordinal Ordinal::natural(const Natural& n)
{
    if (n < 0) throw std::invalid_argument("negative natural");
    Ordinal o;
    if (n != 0) o.terms_.push_back(Term{Ordinal{}, n});
    return o;
}

inline Ordinal Ordinal::omega() { return omega_pow(Ordinal(1)); }

inline Ordinal Ordinal::omega_pow(Ordinal exponent)
{
    Ordinal o;
    o.terms_.push_back(Term{std::move(exponent), Natural(1)});
    return o;
}

inline Ordinal Ordinal::from_terms(std::vector<Term> terms)
{
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (terms[i].coefficient < 1) throw std::invalid_argument("coefficient must be positive");
        if (i > 0 && !(terms[i].exponent < terms[i - 1].exponent))
            throw std::invalid_argument("exponents must be strictly decreasing");
    }
    Ordinal o;
    o.terms_ = std::move(terms);
    return o;
}

inline bool Ordinal::is_finite() const
{
    return terms_.empty() || (terms_.size() == 1 && terms_[0].exponent.is_zero());
}

inline bool Ordinal::is_successor() const
{
    return !terms_.empty() && terms_.back().exponent.is_zero();
}

inline bool Ordinal::is_limit() const
{
    return !terms_.empty() && !terms_.back().exponent.is_zero();
}

inline std::optional<Natural> Ordinal::finite_value() const
{
    if (terms_.empty()) return Natural(0);
    if (is_finite()) return terms_[0].coefficient;
    return std::nullopt;
}

inline Ordinal Ordinal::leading_exponent() const
{
    return terms_.empty() ? Ordinal{} : terms_.front().exponent;
}

inline std::strong_ordering cmp(const Ordinal& a, const Ordinal& b)
{
    const auto& x = a.terms();
    const auto& y = b.terms();
    const std::size_t n = std::min(x.size(), y.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (auto c = cmp(x[i].exponent, y[i].exponent); c != 0) return c;
        if (x[i].coefficient != y[i].coefficient)
            return x[i].coefficient < y[i].coefficient ? std::strong_ordering::less
                                                       : std::strong_ordering::greater;
    }
    return x.size() <=> y.size();
}

inline Ordinal add(const Ordinal& a, const Ordinal& b)
{
    if (b.is_zero()) return a;
    const Ordinal& lead = b.terms().front().exponent;
    std::vector<Ordinal::Term> out;
    for (const auto& t : a.terms()) {
        auto c = cmp(t.exponent, lead);
        if (c > 0) {
            out.push_back(t);
        } else {
            if (c == 0) {
                out.push_back(Ordinal::Term{t.exponent, t.coefficient + b.terms().front().coefficient});
                for (std::size_t i = 1; i < b.terms().size(); ++i) out.push_back(b.terms()[i]);
                return Ordinal::from_terms(std::move(out));
            }
            break;
        }
    }
    for (const auto& t : b.terms()) out.push_back(t);
    return Ordinal::from_terms(std::move(out));
}

inline Ordinal mul(const Ordinal& a, const Ordinal& b)
{
    if (a.is_zero() || b.is_zero()) return Ordinal{};
    const Ordinal lead = a.terms().front().exponent;
    Ordinal result;
    for (const auto& t : b.terms()) {
        Ordinal piece;
        if (t.exponent.is_zero()) {
            // a * c: only the leading coefficient scales.
            std::vector<Ordinal::Term> terms = a.terms();
            terms.front().coefficient *= t.coefficient;
            piece = Ordinal::from_terms(std::move(terms));
        } else {
            piece = Ordinal::from_terms({Ordinal::Term{add(lead, t.exponent), t.coefficient}});
        }
        result = add(result, piece);
    }
    return result;
}

inline Ordinal envelope(const Ordinal& x)
{
    if (x.is_zero()) return Ordinal(1);
    const auto& head = x.terms().front();
    const bool pure_power = x.terms().size() == 1 && head.coefficient == 1;
    if (pure_power) return head.exponent.is_zero() ? Ordinal(1) : head.exponent;
    return add(head.exponent, Ordinal(1));
}

inline bool lesssim(const Ordinal& a, const Ordinal& b) { return envelope(a) <= envelope(b); }

inline bool approx(const Ordinal& a, const Ordinal& b) { return lesssim(a, b) && lesssim(b, a); }

namespace detail {

inline std::string exponent_str(const Ordinal& e)
{
    if (e.is_finite()) return e.str();
    if (e.terms().size() == 1 && e.terms()[0].coefficient == 1 && e.terms()[0].exponent == Ordinal(1))
        return "w";
    return "(" + e.str() + ")";
}

class OrdinalParser {
public:
    explicit OrdinalParser(std::string_view s) : s_(s) {}

    Ordinal parse_all()
    {
        Ordinal o = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return o;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const
    {
        throw std::invalid_argument("ordinal parse error at column " + std::to_string(pos_ + 1) + ": " + what);
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Natural number()
    {
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected a natural number");
        return Natural(std::string(s_.substr(start, pos_ - start)));
    }

    bool at_digit()
    {
        skip();
        return pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]));
    }

    Ordinal sum()
    {
        Ordinal acc = term();
        while (eat('+')) acc = add(acc, term());
        return acc;
    }

    Ordinal term()
    {
        Ordinal base = primary();
        while (eat('*')) base = mul(base, Ordinal::natural(number()));
        return base;
    }

    Ordinal primary()
    {
        if (at_digit()) return Ordinal::natural(number());
        if (eat('w')) {
            if (eat('^')) return Ordinal::omega_pow(exponent());
            return Ordinal::omega();
        }
        if (eat('(')) {
            Ordinal inner = sum();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        fail("expected a natural number, 'w' or '('");
    }

    Ordinal exponent()
    {
        if (at_digit()) return Ordinal::natural(number());
        if (eat('w')) {
            if (eat('^')) return Ordinal::omega_pow(exponent());
            return Ordinal::omega();
        }
        if (eat('(')) {
            Ordinal inner = sum();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        fail("expected an exponent");
    }
};

}  // namespace detail

inline Ordinal Ordinal::parse(std::string_view text) { return detail::OrdinalParser(text).parse_all(); }

inline std::string Ordinal::str() const
{
    if (terms_.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        const auto& t = terms_[i];
        if (i > 0) out += " + ";
        if (t.exponent.is_zero()) {
            out += t.coefficient.str();
            continue;
        }
        out += "w";
        if (!(t.exponent == Ordinal(1))) out += "^" + detail::exponent_str(t.exponent);
        if (t.coefficient != 1) out += "*" + t.coefficient.str();
    }
    return out;
}

}  // namespace kl
