#pragma once

#include "kl/topology.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace kl {

using Rational = boost::multiprecision::cpp_rational;

inline std::string rational_str(const Rational& r)
{
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline Rational parse_rational(const std::string& s)
{
    try {
        auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(Natural(s));
        return Rational(Natural(s.substr(0, slash)), Natural(s.substr(slash + 1)));
    } catch (const std::exception&) {
        throw std::invalid_argument("not a rational number: " + s);
    }
}

/// Structured validation failure, optionally carrying a witness point.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what, std::optional<Point> witness = std::nullopt)
        : std::runtime_error(what), witness_(std::move(witness))
    {
    }
    const std::optional<Point>& witness() const { return witness_; }

private:
    std::optional<Point> witness_;
};

enum class Relation { less, less_equal, greater, greater_equal };

inline bool holds(Relation rel, const Rational& a, const Rational& b)
{
    switch (rel) {
    case Relation::less: return a < b;
    case Relation::less_equal: return a <= b;
    case Relation::greater: return a > b;
    case Relation::greater_equal: return a >= b;
    }
    return false;
}

struct Piece {
    Rational value;
    RepSet set;
};

/// Finitely many values on pairwise disjoint pieces covering the domain
/// (the whole space unless a closed subspace is given).
class StepFunction {
public:
    StepFunction(Space space, std::vector<Piece> pieces) : StepFunction(RepSet::full(space), std::move(pieces)) {}

    StepFunction(RepSet domain, std::vector<Piece> pieces) : domain_(std::move(domain))
    {
        std::map<Rational, RepSet> merged;
        RepSet seen(domain_.space());
        for (auto& p : pieces) {
            if (!(p.set.space() == domain_.space())) throw SpaceMismatch();
            if (!(p.set & seen).is_empty())
                throw ValidationError("pieces overlap", min_element(p.set & seen));
            seen = seen | p.set;
            if (p.set.is_empty()) continue;
            auto it = merged.find(p.value);
            if (it == merged.end()) merged.emplace(p.value, p.set);
            else it->second = it->second | p.set;
        }
        if (!(seen == domain_)) {
            auto missing = min_element(domain_ - seen);
            if (missing) throw ValidationError("pieces do not cover the domain", missing);
            throw ValidationError("pieces leave the domain", min_element(seen - domain_));
        }
        for (auto& [v, s] : merged) pieces_.push_back(Piece{v, s});
    }

    static StepFunction constant(Space space, const Rational& c) { return StepFunction(space, {Piece{c, RepSet::full(space)}}); }
    static StepFunction characteristic(const RepSet& a)
    {
        return StepFunction(a.space(), {Piece{1, a}, Piece{0, a.complement()}});
    }

    const Space& space() const { return domain_.space(); }
    const RepSet& domain() const { return domain_; }
    /// Sorted by value, values distinct, pieces nonempty.
    const std::vector<Piece>& pieces() const { return pieces_; }

    std::vector<Rational> values() const
    {
        std::vector<Rational> v;
        for (const auto& p : pieces_) v.push_back(p.value);
        return v;
    }

    Rational operator()(const Point& x) const
    {
        for (const auto& p : pieces_)
            if (p.set.contains(x)) return p.value;
        throw std::out_of_range("point " + x.str() + " outside the domain");
    }

    RepSet level_set(Relation rel, const Rational& c) const
    {
        RepSet out(space());
        for (const auto& p : pieces_)
            if (holds(rel, p.value, c)) out = out | p.set;
        return out;
    }

    bool is_continuous() const
    {
        for (const auto& p : pieces_)
            if (!(closure(p.set) & domain_).subset_of(p.set)) return false;
        return true;
    }

    /// Every {f >= q} is closed.
    bool is_usc() const
    {
        for (const auto& p : pieces_)
            if (!is_closed(level_set(Relation::greater_equal, p.value))) return false;
        return true;
    }

    StepFunction restricted(const RepSet& y) const
    {
        std::vector<Piece> ps;
        for (const auto& p : pieces_) ps.push_back(Piece{p.value, p.set & y});
        return StepFunction(domain_ & y, std::move(ps));
    }

    std::string str() const
    {
        std::string s = "{ ";
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            if (i) s += "; ";
            s += rational_str(pieces_[i].value) + " on " + pieces_[i].set.str();
        }
        return s + " }";
    }

    bool operator==(const StepFunction& o) const
    {
        if (!(domain_ == o.domain_) || pieces_.size() != o.pieces_.size()) return false;
        for (std::size_t i = 0; i < pieces_.size(); ++i)
            if (pieces_[i].value != o.pieces_[i].value || !(pieces_[i].set == o.pieces_[i].set)) return false;
        return true;
    }

private:
    RepSet domain_;
    std::vector<Piece> pieces_;
};

/// Combines two step functions on their common refinement.
template <class Op>
StepFunction pointwise(const StepFunction& f, const StepFunction& g, Op op)
{
    if (!(f.domain() == g.domain())) throw SpaceMismatch();
    std::vector<Piece> out;
    for (const auto& p : f.pieces())
        for (const auto& q : g.pieces()) {
            RepSet s = p.set & q.set;
            if (!s.is_empty()) out.push_back(Piece{op(p.value, q.value), std::move(s)});
        }
    return StepFunction(f.domain(), std::move(out));
}

inline StepFunction scale_add(const StepFunction& f, const StepFunction& g, const Rational& a, const Rational& b)
{
    return pointwise(f, g, [&](const Rational& x, const Rational& y) { return a * x + b * y; });
}

inline StepFunction multiply(const StepFunction& f, const StepFunction& g)
{
    return pointwise(f, g, [](const Rational& x, const Rational& y) { return x * y; });
}

/// An explicit value map, optionally declared increasing or 1-Lipschitz.
struct ValueMap {
    std::map<Rational, Rational> table;
    bool increasing = false;
    bool lipschitz = false;

    Rational operator()(const Rational& v) const
    {
        auto it = table.find(v);
        if (it == table.end()) throw std::out_of_range("value map has no entry for " + rational_str(v));
        return it->second;
    }
};

inline StepFunction remap(const StepFunction& f, const ValueMap& h)
{
    const auto vals = f.values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
        for (std::size_t j = i + 1; j < vals.size(); ++j) {
            const Rational a = h(vals[i]), b = h(vals[j]);
            if (h.increasing && !(a < b))
                throw ValidationError("value map is not increasing at " + rational_str(vals[i]) + ", " + rational_str(vals[j]));
            if (h.lipschitz && abs(a - b) > abs(vals[i] - vals[j]))
                throw ValidationError("value map is not 1-Lipschitz at " + rational_str(vals[i]) + ", " + rational_str(vals[j]));
        }
    }
    std::vector<Piece> out;
    for (const auto& p : f.pieces()) out.push_back(Piece{h(p.value), p.set});
    return StepFunction(f.domain(), std::move(out));
}

// ---------------------------------------------------------------------------

/// Decreasing sequence F_0 = domain >= F_1 >= ... of closed sets. Entries
/// past the end are empty.
class ClosedChain {
public:
    explicit ClosedChain(std::vector<RepSet> sets) : domain_(whole_of(sets)), sets_(std::move(sets)) { validate(); }

    ClosedChain(RepSet domain, std::vector<RepSet> sets) : domain_(std::move(domain)), sets_(std::move(sets)) { validate(); }

private:
    void validate() const
    {
        if (sets_.empty()) throw ValidationError("chain is empty");
        if (!(sets_.front() == domain_)) throw ValidationError("chain must start with the whole domain", min_element(domain_ - sets_.front()));
        for (std::size_t i = 0; i < sets_.size(); ++i) {
            if (!is_closed(sets_[i]))
                throw ValidationError("chain member " + std::to_string(i) + " is not closed", min_element(closure(sets_[i]) - sets_[i]));
            if (i > 0 && !sets_[i].subset_of(sets_[i - 1]))
                throw ValidationError("chain member " + std::to_string(i) + " is not contained in its predecessor",
                                      min_element(sets_[i] - sets_[i - 1]));
        }
    }

public:
    const Space& space() const { return domain_.space(); }
    const RepSet& domain() const { return domain_; }
    std::size_t size() const { return sets_.size(); }
    Ordinal length() const { return Ordinal(sets_.size()); }
    const std::vector<RepSet>& sets() const { return sets_; }

    RepSet at(std::size_t i) const { return i < sets_.size() ? sets_[i] : RepSet(space()); }

    ClosedChain restricted(const RepSet& y) const
    {
        std::vector<RepSet> r;
        for (const auto& s : sets_) r.push_back(s & y);
        return ClosedChain(domain_ & y, std::move(r));
    }

    std::string str() const
    {
        std::string s = "[";
        for (std::size_t i = 0; i < sets_.size(); ++i) s += (i ? ", " : "") + sets_[i].str();
        return s + "]";
    }

private:
    static RepSet whole_of(const std::vector<RepSet>& sets)
    {
        if (sets.empty()) throw ValidationError("chain is empty");
        return RepSet::full(sets.front().space());
    }

    RepSet domain_;
    std::vector<RepSet> sets_;
};

/// Union of F_i \ F_{i+1} over even i.
inline RepSet transfinite_difference(const ClosedChain& c)
{
    RepSet out(c.space());
    for (std::size_t i = 0; i < c.size(); i += 2) out = out | (c.at(i) - c.at(i + 1));
    return out;
}

// ---------------------------------------------------------------------------
// Convergent sequences

/// Contributes y_digit + offset (or offset alone) to the threshold of points
/// in region.
struct ThresholdTerm {
    RepSet region;
    std::optional<std::size_t> digit;
    std::int64_t offset = 0;
};

/// A family of sets P(k) whose membership is monotone in k: a point y is in
/// P(k) iff (y in limit) differs from (k < threshold(y)). Each point flips at
/// most once, at stage threshold(y).
class MonotoneFamily {
public:
    MonotoneFamily(RepSet limit, std::vector<ThresholdTerm> terms, std::string label)
        : limit_(std::move(limit)), terms_(std::move(terms)), label_(std::move(label))
    {
    }

    static MonotoneFamily stationary(const RepSet& s, std::string label = {}) { return MonotoneFamily(s, {}, std::move(label)); }

    /// Clopen neighbourhoods U_k(G) = union of (x[k], x] over x in G, shrinking
    /// to the closed set G.
    static MonotoneFamily collar(const RepSet& g, std::string label = {})
    {
        if (!is_closed(g)) throw ValidationError("collar needs a closed set");
        const Space space = g.space();
        const std::size_t k = space.dims();
        std::vector<ThresholdTerm> terms;
        for (std::size_t j = 1; j <= k; ++j) {
            RepSet region = limit_shift_preimage(g, j) - g;
            if (region.is_empty()) continue;
            Box zeros = Box::any(k);
            for (std::size_t p = 0; p + 1 < j; ++p) zeros.digits[p] = DigitConstraint::finite({0});
            RepSet z = RepSet::from_box(space, zeros);
            if (auto r = region & z; !r.is_empty()) terms.push_back(ThresholdTerm{r, j - 1, 0});
            if (auto r = region - z; !r.is_empty()) terms.push_back(ThresholdTerm{r, j - 1, 1});
        }
        return MonotoneFamily(g, std::move(terms), std::move(label));
    }

    const RepSet& limit() const { return limit_; }
    const std::vector<ThresholdTerm>& terms() const { return terms_; }
    const std::string& label() const { return label_; }

    std::uint64_t threshold(const Point& y) const
    {
        std::int64_t t = 0;
        for (const auto& term : terms_) {
            if (!term.region.contains(y)) continue;
            std::int64_t v = term.offset;
            if (term.digit) v += static_cast<std::int64_t>(y.digit(*term.digit));
            t = std::max(t, v);
        }
        return static_cast<std::uint64_t>(t);
    }

    bool member(std::uint64_t k, const Point& y) const { return limit_.contains(y) != (k < threshold(y)); }

    /// { y : threshold(y) > k }.
    RepSet unsettled(std::uint64_t k) const
    {
        const Space space = limit_.space();
        RepSet out(space);
        for (const auto& term : terms_) {
            const std::int64_t need = static_cast<std::int64_t>(k) + 1 - term.offset;
            if (!term.digit) {
                if (need <= 0) out = out | term.region;
                continue;
            }
            if (need <= 0) {
                out = out | term.region;
                continue;
            }
            Box b = Box::any(space.dims());
            b.digits[*term.digit] = DigitConstraint::at_least(static_cast<Digit>(need));
            out = out | (term.region & RepSet::from_box(space, b));
        }
        return out;
    }

    RepSet at(std::uint64_t k) const
    {
        RepSet u = unsettled(k);
        return (limit_ - u) | (u - limit_);
    }

    Digit max_constant() const
    {
        Digit m = limit_.max_constant();
        for (const auto& t : terms_) {
            m = std::max(m, t.region.max_constant());
            m = std::max<Digit>(m, static_cast<Digit>(t.offset < 0 ? -t.offset : t.offset));
        }
        return m;
    }

private:
    RepSet limit_;
    std::vector<ThresholdTerm> terms_;
    std::string label_;
};

/// c0 + ci * i + ck * k.
struct AffineTerm {
    std::int64_t constant = 0;
    std::int64_t per_index = 0;
    std::int64_t per_stage = 0;

    std::int64_t at(std::int64_t i, std::int64_t k) const { return constant + per_index * i + per_stage * k; }
    bool is_constant() const { return per_index == 0 && per_stage == 0; }
    bool operator==(const AffineTerm&) const = default;
};

/// Pieces (lo(i,k), hi(i,k)] for 0 <= i < count(k); digit p of lo and hi is
/// an affine expression in i and k.
struct IntervalFamily {
    std::vector<AffineTerm> lo;
    std::vector<AffineTerm> hi;
    AffineTerm count;

    bool member(std::uint64_t k, const Point& y) const
    {
        if (y.is_top()) return false;
        const std::int64_t n = count.at(0, static_cast<std::int64_t>(k));
        for (std::int64_t i = 0; i < n; ++i) {
            auto lo_p = eval(lo, i, static_cast<std::int64_t>(k));
            auto hi_p = eval(hi, i, static_cast<std::int64_t>(k));
            if (!lo_p || !hi_p) continue;
            if (*lo_p < y && y <= *hi_p) return true;
        }
        return false;
    }

    MonotoneFamily to_monotone(const Space& space, std::string label) const;

private:
    static std::optional<Point> eval(const std::vector<AffineTerm>& e, std::int64_t i, std::int64_t k)
    {
        std::vector<Digit> d(e.size());
        for (std::size_t p = 0; p < e.size(); ++p) {
            const std::int64_t v = e[p].at(i, k);
            if (v < 0) return std::nullopt;
            d[p] = static_cast<Digit>(v);
        }
        return Point::from_digits(std::move(d));
    }
};

class NotRepresentable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

/// { y : (y_{to-1}, ..., y_from) compared lexicographically with c satisfies
/// rel }, rel one of <=, >. Other positions are unconstrained.
inline RepSet lex_window(const Space& space, std::size_t from, std::size_t to, const std::vector<Digit>& c, bool at_most)
{
    const std::size_t k = space.dims();
    RepSet le(space);
    Box eq = Box::any(k);
    for (std::size_t p = from; p < to; ++p) eq.digits[p] = DigitConstraint::finite({c[p]});
    le = RepSet::from_box(space, eq);
    for (std::size_t i = from; i < to; ++i) {
        if (c[i] == 0) continue;
        Box b = Box::any(k);
        for (std::size_t p = i + 1; p < to; ++p) b.digits[p] = DigitConstraint::finite({c[p]});
        std::vector<Digit> below;
        for (Digit v = 0; v < c[i]; ++v) below.push_back(v);
        b.digits[i] = DigitConstraint::finite(std::move(below));
        le = le | RepSet::from_box(space, b);
    }
    RepSet non_top = RepSet::full(space) - RepSet::singleton(space, Point::top(k));
    return at_most ? le - RepSet::singleton(space, Point::top(k)) : non_top - le;
}

}  // namespace detail

inline MonotoneFamily IntervalFamily::to_monotone(const Space& space, std::string label) const
{
    const std::size_t k = space.dims();
    if (lo.size() != k || hi.size() != k) throw NotRepresentable("interval family digits do not match the space");
    auto fail = [](const std::string& why) -> NotRepresentable { return NotRepresentable("unsupported family shape: " + why); };

    std::optional<std::size_t> q;
    for (std::size_t p = 0; p < k; ++p) {
        if (lo[p].per_index != 0 || hi[p].per_index != 0) {
            if (q) throw fail("the index appears at more than one digit");
            q = p;
        }
    }
    if (count.per_index != 0 || count.per_stage < 0 || count.per_stage > 1) throw fail("count must be c or c + k");
    const std::size_t top = q ? *q : k;
    if (q) {
        const auto& a = lo[*q];
        if (!(a == hi[*q]) || a.per_index != 1 || a.per_stage != 0 || a.constant < 0)
            throw fail("index digit must read i + c identically in both endpoints");
    }
    for (std::size_t p = top + 1; p < k; ++p)
        if (!lo[p].is_constant() || !(lo[p] == hi[p]) || lo[p].constant < 0)
            throw fail("digits above the index must be equal constants");
    for (std::size_t p = 0; p < top; ++p)
        if (!lo[p].is_constant() || lo[p].constant < 0) throw fail("lower endpoint may not depend on the stage");

    std::optional<std::size_t> r;
    for (std::size_t p = 0; p < top; ++p) {
        if (hi[p].per_stage != 0) {
            if (r || hi[p].per_stage != 1) throw fail("upper endpoint may grow in one digit with slope 1");
            r = p;
        } else if (hi[p].constant < 0) {
            throw fail("negative digit");
        }
    }

    RepSet limit = RepSet::full(space) - RepSet::singleton(space, Point::top(k));
    std::vector<ThresholdTerm> terms;

    for (std::size_t p = top + 1; p < k; ++p) {
        Box b = Box::any(k);
        b.digits[p] = DigitConstraint::finite({static_cast<Digit>(lo[p].constant)});
        limit = limit & RepSet::from_box(space, b);
    }
    if (q) {
        const Digit a = static_cast<Digit>(lo[*q].constant);
        Box b = Box::any(k);
        b.digits[*q] = DigitConstraint::at_least(a);
        limit = limit & RepSet::from_box(space, b);
        if (count.per_stage == 0) {
            std::vector<Digit> allowed;
            for (std::int64_t v = 0; v < count.constant; ++v) allowed.push_back(a + static_cast<Digit>(v));
            Box c = Box::any(k);
            c.digits[*q] = DigitConstraint::finite(std::move(allowed));
            limit = limit & RepSet::from_box(space, c);
        } else {
            terms.push_back(ThresholdTerm{RepSet::full(space), *q, 1 - static_cast<std::int64_t>(a) - count.constant});
        }
    } else {
        if (count.per_stage == 0 && count.constant <= 0) limit = RepSet(space);
        if (count.per_stage == 1 && count.constant <= 0) terms.push_back(ThresholdTerm{RepSet::full(space), std::nullopt, 1 - count.constant});
    }

    std::vector<Digit> lo_digits(k), hi_digits(k);
    for (std::size_t p = 0; p < top; ++p) {
        lo_digits[p] = static_cast<Digit>(lo[p].constant);
        hi_digits[p] = static_cast<Digit>(std::max<std::int64_t>(hi[p].constant, 0));
    }
    if (top > 0) {
        limit = limit & detail::lex_window(space, 0, top, lo_digits, false);
        if (!r) {
            limit = limit & detail::lex_window(space, 0, top, hi_digits, true);
        } else {
            // Above r the upper endpoint is constant; at r it grows with k.
            RepSet below_prefix = detail::lex_window(space, *r + 1, top, hi_digits, true) -
                                  (*r + 1 < top ? [&] {
                                      Box e = Box::any(k);
                                      for (std::size_t p = *r + 1; p < top; ++p) e.digits[p] = DigitConstraint::finite({hi_digits[p]});
                                      return RepSet::from_box(space, e);
                                  }()
                                                : RepSet(space));
            Box e = Box::any(k);
            for (std::size_t p = *r + 1; p < top; ++p) e.digits[p] = DigitConstraint::finite({hi_digits[p]});
            RepSet equal_prefix = RepSet::from_box(space, e) - RepSet::singleton(space, Point::top(k));
            limit = limit & (below_prefix | equal_prefix);
            const std::int64_t b = hi[*r].constant;
            RepSet low_ok = *r > 0 ? detail::lex_window(space, 0, *r, hi_digits, true) : equal_prefix;
            terms.push_back(ThresholdTerm{equal_prefix & low_ok, *r, -b});
            if (*r > 0) terms.push_back(ThresholdTerm{equal_prefix - low_ok, *r, 1 - b});
        }
    }

    for (auto& t : terms) t.region = t.region & limit;
    std::erase_if(terms, [](const ThresholdTerm& t) { return t.region.is_empty(); });
    return MonotoneFamily(limit, std::move(terms), std::move(label));
}

struct TemplateComponent {
    Rational value;
    MonotoneFamily family;
    std::optional<IntervalFamily> source;
    std::string text;
};

/// A sequence (f_k) of clopen step functions, f_k = sum of value * [y in P(k)]
/// over the components.
class SeqTemplate {
public:
    SeqTemplate(Space space, std::vector<TemplateComponent> components) : space_(space), components_(std::move(components))
    {
        for (const auto& c : components_)
            if (!(c.family.limit().space() == space_)) throw SpaceMismatch();
    }

    /// f_k = f for every k.
    static SeqTemplate constant(const StepFunction& f)
    {
        std::vector<TemplateComponent> cs;
        for (const auto& p : f.pieces())
            if (p.value != 0) cs.push_back(TemplateComponent{p.value, MonotoneFamily::stationary(p.set), std::nullopt, ""});
        return SeqTemplate(f.space(), std::move(cs));
    }

    const Space& space() const { return space_; }
    const std::vector<TemplateComponent>& components() const { return components_; }

    Rational eval(std::uint64_t k, const Point& y) const
    {
        Rational v = 0;
        for (const auto& c : components_)
            if (c.family.member(k, y)) v += c.value;
        return v;
    }

    Rational limit_value(const Point& y) const
    {
        Rational v = 0;
        for (const auto& c : components_)
            if (c.family.limit().contains(y)) v += c.value;
        return v;
    }

    /// Least stage from which every component has settled at y.
    std::uint64_t settle_stage(const Point& y) const
    {
        std::uint64_t s = 0;
        for (const auto& c : components_) s = std::max(s, c.family.threshold(y));
        return s;
    }

    StepFunction stage(std::uint64_t k) const
    {
        std::vector<RepSet> sets;
        for (const auto& c : components_) sets.push_back(c.family.at(k));
        return combine(sets);
    }

    StepFunction limit() const
    {
        std::vector<RepSet> sets;
        for (const auto& c : components_) sets.push_back(c.family.limit());
        return combine(sets);
    }

    /// Every value some f_k or the limit can take.
    std::vector<Rational> achievable_values() const
    {
        std::set<Rational> vals{Rational(0)};
        for (const auto& c : components_) {
            std::set<Rational> next = vals;
            for (const auto& v : vals) next.insert(v + c.value);
            vals = std::move(next);
        }
        return {vals.begin(), vals.end()};
    }

    Digit max_constant() const
    {
        Digit m = 0;
        for (const auto& c : components_) m = std::max(m, c.family.max_constant());
        return m;
    }

    std::string str() const
    {
        std::string s = "template { ";
        for (std::size_t i = 0; i < components_.size(); ++i) s += (i ? " ; " : "") + components_[i].text;
        return s + " }";
    }

private:
    StepFunction combine(const std::vector<RepSet>& sets) const
    {
        std::map<Rational, RepSet> acc;
        std::vector<std::pair<RepSet, Rational>> cells{{RepSet::full(space_), Rational(0)}};
        for (std::size_t i = 0; i < sets.size(); ++i) {
            std::vector<std::pair<RepSet, Rational>> next;
            for (auto& [cell, v] : cells) {
                RepSet in = cell & sets[i];
                RepSet out = cell - sets[i];
                if (!in.is_empty()) next.emplace_back(in, v + components_[i].value);
                if (!out.is_empty()) next.emplace_back(out, v);
            }
            cells = std::move(next);
        }
        for (auto& [cell, v] : cells) {
            auto it = acc.find(v);
            if (it == acc.end()) acc.emplace(v, cell);
            else it->second = it->second | cell;
        }
        std::vector<Piece> ps;
        for (auto& [v, s] : acc) ps.push_back(Piece{v, s});
        return StepFunction(space_, std::move(ps));
    }

    Space space_;
    std::vector<TemplateComponent> components_;
};

}  // namespace kl
