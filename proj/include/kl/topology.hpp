#pragma once

#include "kl/ordinal.hpp"

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace kl {

using Digit = std::uint64_t;

class SpaceMismatch : public std::invalid_argument {
public:
    SpaceMismatch() : std::invalid_argument("operands live in different spaces") {}
};

/// The closed ordinal interval [0, w^K].
class Space {
public:
    explicit Space(std::size_t k) : k_(k)
    {
        if (k == 0) throw std::invalid_argument("space dimension must be at least 1");
    }
    std::size_t dims() const { return k_; }
    Ordinal top_ordinal() const { return Ordinal::omega_pow(Ordinal(k_)); }
    bool operator==(const Space&) const = default;

private:
    std::size_t k_;
};

/// A point of [0, w^K]: either the top point w^K or the digit vector of its
/// Cantor normal form, digit(i) being the coefficient of w^i.
class Point {
public:
    static Point top(std::size_t k)
    {
        Point p;
        p.digits_.assign(k, 0);
        p.top_ = true;
        return p;
    }

    static Point zero(std::size_t k)
    {
        Point p;
        p.digits_.assign(k, 0);
        return p;
    }

    static Point from_digits(std::vector<Digit> digits)
    {
        if (digits.empty()) throw std::invalid_argument("point needs at least one digit");
        Point p;
        p.digits_ = std::move(digits);
        return p;
    }

    static Point from_ordinal(const Ordinal& o, const Space& space)
    {
        const std::size_t k = space.dims();
        if (o == space.top_ordinal()) return top(k);
        Point p = zero(k);
        for (const auto& t : o.terms()) {
            auto e = t.exponent.finite_value();
            if (!e || *e >= k) throw std::out_of_range("ordinal " + o.str() + " exceeds w^" + std::to_string(k));
            if (t.coefficient > std::numeric_limits<Digit>::max())
                throw std::out_of_range("digit too large");
            p.digits_[static_cast<std::size_t>(*e)] = static_cast<Digit>(t.coefficient);
        }
        return p;
    }

    Ordinal to_ordinal() const
    {
        if (top_) return Ordinal::omega_pow(Ordinal(digits_.size()));
        std::vector<Ordinal::Term> terms;
        for (std::size_t i = digits_.size(); i-- > 0;)
            if (digits_[i] != 0) terms.push_back(Ordinal::Term{Ordinal(i), Natural(digits_[i])});
        return Ordinal::from_terms(std::move(terms));
    }

    std::size_t dims() const { return digits_.size(); }
    bool is_top() const { return top_; }
    Digit digit(std::size_t i) const { return digits_.at(i); }
    const std::vector<Digit>& digits() const { return digits_; }

    bool is_zero() const
    {
        return !top_ && std::all_of(digits_.begin(), digits_.end(), [](Digit d) { return d == 0; });
    }
    bool is_successor() const { return !top_ && digits_[0] != 0; }
    bool is_limit() const { return !is_zero() && !is_successor(); }

    /// Position of the least nonzero digit; dims() for the top point.
    std::optional<std::size_t> least_nonzero() const
    {
        if (top_) return digits_.size();
        for (std::size_t i = 0; i < digits_.size(); ++i)
            if (digits_[i] != 0) return i;
        return std::nullopt;
    }

    std::string str() const { return to_ordinal().str(); }

    friend std::strong_ordering operator<=>(const Point& a, const Point& b)
    {
        if (a.top_ || b.top_) return static_cast<int>(a.top_) <=> static_cast<int>(b.top_);
        for (std::size_t i = a.digits_.size(); i-- > 0;)
            if (a.digits_[i] != b.digits_[i]) return a.digits_[i] <=> b.digits_[i];
        return std::strong_ordering::equal;
    }
    friend bool operator==(const Point& a, const Point& b) { return (a <=> b) == 0; }

private:
    Point() = default;
    std::vector<Digit> digits_;
    bool top_ = false;
};

/// Finite or cofinite set of naturals.
class DigitConstraint {
public:
    static DigitConstraint any() { return DigitConstraint(true, {}); }
    static DigitConstraint none() { return DigitConstraint(false, {}); }
    static DigitConstraint finite(std::vector<Digit> values) { return DigitConstraint(false, std::move(values)); }
    static DigitConstraint cofinite(std::vector<Digit> excluded) { return DigitConstraint(true, std::move(excluded)); }
    static DigitConstraint at_least(Digit n)
    {
        std::vector<Digit> ex;
        for (Digit v = 0; v < n; ++v) ex.push_back(v);
        return cofinite(std::move(ex));
    }

    bool is_cofinite() const { return cofinite_; }
    bool is_any() const { return cofinite_ && listed_.empty(); }
    bool is_empty() const { return !cofinite_ && listed_.empty(); }
    /// Sorted values for a finite constraint, sorted exclusions for a cofinite one.
    const std::vector<Digit>& listed() const { return listed_; }

    bool contains(Digit v) const
    {
        return std::binary_search(listed_.begin(), listed_.end(), v) != cofinite_;
    }

    /// Every value at or above bound() behaves alike.
    Digit bound() const { return listed_.empty() ? 0 : listed_.back() + 1; }

    std::string str(std::size_t position) const
    {
        const std::string d = "d" + std::to_string(position);
        if (is_any()) return d + " any";
        if (cofinite_) {
            bool prefix = true;
            for (std::size_t i = 0; i < listed_.size(); ++i) prefix = prefix && listed_[i] == i;
            if (prefix) return d + " >= " + std::to_string(listed_.size());
            return d + " notin " + list_str();
        }
        return d + " in " + list_str();
    }

    bool operator==(const DigitConstraint&) const = default;

private:
    DigitConstraint(bool cofinite, std::vector<Digit> v) : cofinite_(cofinite), listed_(std::move(v))
    {
        std::sort(listed_.begin(), listed_.end());
        listed_.erase(std::unique(listed_.begin(), listed_.end()), listed_.end());
    }

    std::string list_str() const
    {
        std::string s = "{";
        for (std::size_t i = 0; i < listed_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(listed_[i]);
        }
        return s + "}";
    }

    bool cofinite_;
    std::vector<Digit> listed_;
};

/// One constraint per digit position, plus whether w^K itself is included.
struct Box {
    std::vector<DigitConstraint> digits;
    bool includes_top = false;

    static Box any(std::size_t k) { return Box{std::vector<DigitConstraint>(k, DigitConstraint::any()), false}; }
    static Box top_only(std::size_t k) { return Box{std::vector<DigitConstraint>(k, DigitConstraint::none()), true}; }

    bool contains(const Point& p) const
    {
        if (p.is_top()) return includes_top;
        for (std::size_t i = 0; i < digits.size(); ++i)
            if (!digits[i].contains(p.digit(i))) return false;
        return true;
    }

    std::string str() const;
};

namespace detail {

/// Mixed-radix cell grid. Position i has cells 0..cut[i]-1 holding single
/// values and cell cut[i] holding every value >= cut[i]. Position 0 is the
/// least significant coordinate of a cell index.
struct Grid {
    std::vector<Digit> cut;
    std::vector<std::size_t> stride;
    std::size_t size = 1;

    explicit Grid(std::vector<Digit> cuts) : cut(std::move(cuts)), stride(cut.size())
    {
        for (std::size_t i = 0; i < cut.size(); ++i) {
            stride[i] = size;
            size *= static_cast<std::size_t>(cut[i] + 1);
            if (size > (std::size_t{1} << 26)) throw std::length_error("cell grid too large");
        }
    }

    std::size_t dims() const { return cut.size(); }
    Digit tail(std::size_t i) const { return cut[i]; }
    Digit cell_of(std::size_t i, Digit v) const { return std::min(v, cut[i]); }
    Digit coord(std::size_t index, std::size_t i) const { return (index / stride[i]) % (cut[i] + 1); }

    std::size_t index_of(const std::vector<Digit>& cells) const
    {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < cut.size(); ++i) idx += static_cast<std::size_t>(cells[i]) * stride[i];
        return idx;
    }

    std::vector<Digit> decode(std::size_t index) const
    {
        std::vector<Digit> c(cut.size());
        for (std::size_t i = 0; i < cut.size(); ++i) c[i] = coord(index, i);
        return c;
    }

    std::size_t index_of_point(const Point& p) const
    {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < cut.size(); ++i) idx += static_cast<std::size_t>(cell_of(i, p.digit(i))) * stride[i];
        return idx;
    }
};

using Bits = boost::dynamic_bitset<std::uint64_t>;

/// Re-expresses bits from grid `from` on grid `to`; `to` must have every cut
/// at least as large, or be a coarsening whose dropped values are tail-like.
inline Bits regrid(const Grid& from, const Bits& bits, const Grid& to)
{
    Bits out(to.size);
    std::vector<Digit> c(to.dims(), 0);
    for (std::size_t idx = 0; idx < to.size; ++idx) {
        std::size_t src = 0;
        for (std::size_t i = 0; i < to.dims(); ++i) src += static_cast<std::size_t>(std::min(c[i], from.cut[i])) * from.stride[i];
        if (bits[src]) out.set(idx);
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (++c[i] <= to.cut[i]) break;
            c[i] = 0;
        }
    }
    return out;
}

inline bool block_nonempty(const Bits& bits, std::size_t base, std::size_t len)
{
    if (len == 0) return false;
    std::size_t first = base == 0 ? bits.find_first() : bits.find_next(base - 1);
    return first != Bits::npos && first < base + len;
}

}  // namespace detail

/// Finite union of digit boxes over [0, w^K], kept in a canonical cell form
/// so that structural equality is set equality.
class RepSet {
public:
    explicit RepSet(Space space) : space_(space), grid_(std::vector<Digit>(space.dims(), 0)), bits_(1) {}

    static RepSet empty(Space space) { return RepSet(space); }
    static RepSet full(Space space)
    {
        RepSet s(space);
        s.bits_.set();
        s.top_ = true;
        return s;
    }
    static RepSet from_box(Space space, const Box& box);
    static RepSet from_boxes(Space space, const std::vector<Box>& boxes);
    static RepSet singleton(Space space, const Point& p);
    /// { x : x <= p }.
    static RepSet at_most(Space space, const Point& p);
    /// The interval (lo, hi].
    static RepSet interval(Space space, const Point& lo, const Point& hi);
    /// Nonzero limit ordinals together with w^K.
    static RepSet limits(Space space);
    static RepSet successors(Space space);

    const Space& space() const { return space_; }
    bool contains(const Point& p) const;
    bool is_empty() const { return !top_ && bits_.none(); }
    bool contains_top() const { return top_; }
    bool is_full() const { return top_ && bits_.all(); }

    RepSet unite(const RepSet& o) const { return combine(o, [](const detail::Bits& a, const detail::Bits& b) { return a | b; }, top_ || o.top_); }
    RepSet intersect(const RepSet& o) const { return combine(o, [](const detail::Bits& a, const detail::Bits& b) { return a & b; }, top_ && o.top_); }
    RepSet minus(const RepSet& o) const { return combine(o, [](const detail::Bits& a, const detail::Bits& b) { return a - b; }, top_ && !o.top_); }
    RepSet complement() const
    {
        RepSet r = *this;
        r.bits_.flip();
        r.top_ = !top_;
        r.canonicalize();
        return r;
    }
    bool subset_of(const RepSet& o) const { return minus(o).is_empty(); }

    friend RepSet operator|(const RepSet& a, const RepSet& b) { return a.unite(b); }
    friend RepSet operator&(const RepSet& a, const RepSet& b) { return a.intersect(b); }
    friend RepSet operator-(const RepSet& a, const RepSet& b) { return a.minus(b); }
    friend RepSet operator~(const RepSet& a) { return a.complement(); }

    bool operator==(const RepSet& o) const
    {
        if (!(space_ == o.space_)) throw SpaceMismatch();
        return top_ == o.top_ && grid_.cut == o.grid_.cut && bits_ == o.bits_;
    }

    /// A disjoint box cover of the set (the top point as its own box).
    std::vector<Box> boxes() const;
    std::string str() const;

    /// Largest digit value that is distinguished from the tail at any position.
    Digit max_constant() const
    {
        Digit m = 0;
        for (Digit c : grid_.cut) m = std::max(m, c);
        return m;
    }

    const detail::Grid& grid() const { return grid_; }
    const detail::Bits& bits() const { return bits_; }
    static RepSet from_cells(Space space, detail::Grid grid, detail::Bits bits, bool top)
    {
        RepSet r(space);
        r.grid_ = std::move(grid);
        r.bits_ = std::move(bits);
        r.top_ = top;
        r.canonicalize();
        return r;
    }

    /// Same set expressed on a grid with the given (pointwise larger) cuts.
    detail::Bits bits_on(const detail::Grid& g) const { return detail::regrid(grid_, bits_, g); }

private:
    template <class Op>
    RepSet combine(const RepSet& o, Op op, bool top) const
    {
        if (!(space_ == o.space_)) throw SpaceMismatch();
        std::vector<Digit> cuts(space_.dims());
        for (std::size_t i = 0; i < cuts.size(); ++i) cuts[i] = std::max(grid_.cut[i], o.grid_.cut[i]);
        detail::Grid g(cuts);
        detail::Bits a = grid_.cut == cuts ? bits_ : detail::regrid(grid_, bits_, g);
        detail::Bits b = o.grid_.cut == cuts ? o.bits_ : detail::regrid(o.grid_, o.bits_, g);
        return from_cells(space_, std::move(g), op(a, b), top);
    }

    void canonicalize();

    Space space_;
    detail::Grid grid_;
    detail::Bits bits_;
    bool top_ = false;
};

inline bool RepSet::contains(const Point& p) const
{
    if (p.dims() != space_.dims()) throw SpaceMismatch();
    if (p.is_top()) return top_;
    return bits_[grid_.index_of_point(p)];
}

inline void RepSet::canonicalize()
{
    const std::size_t k = grid_.dims();
    std::vector<Digit> cuts = grid_.cut;
    bool changed = false;
    for (std::size_t i = 0; i < k; ++i) {
        const Digit t = grid_.cut[i];
        // Lower the cut while the last explicit slice equals the tail slice.
        while (cuts[i] > 0) {
            const Digit v = cuts[i] - 1;
            const std::size_t shift = static_cast<std::size_t>(t - v) * grid_.stride[i];
            bool same = true;
            for (std::size_t idx = 0; idx < grid_.size && same; ++idx)
                if (grid_.coord(idx, i) == t && bits_[idx] != bits_[idx - shift]) same = false;
            if (!same) break;
            cuts[i] = v;
            changed = true;
        }
    }
    if (!changed) return;
    detail::Grid g(cuts);
    bits_ = detail::regrid(grid_, bits_, g);
    grid_ = std::move(g);
}

inline RepSet RepSet::from_box(Space space, const Box& box)
{
    if (box.digits.size() != space.dims()) throw SpaceMismatch();
    std::vector<Digit> cuts(space.dims());
    for (std::size_t i = 0; i < cuts.size(); ++i) cuts[i] = box.digits[i].bound();
    detail::Grid g(cuts);
    detail::Bits bits(g.size);
    for (std::size_t idx = 0; idx < g.size; ++idx) {
        bool in = true;
        for (std::size_t i = 0; i < cuts.size() && in; ++i) {
            const Digit c = g.coord(idx, i);
            in = c < g.cut[i] ? box.digits[i].contains(c) : box.digits[i].is_cofinite();
        }
        if (in) bits.set(idx);
    }
    return from_cells(space, std::move(g), std::move(bits), box.includes_top);
}

inline RepSet RepSet::from_boxes(Space space, const std::vector<Box>& boxes)
{
    RepSet r(space);
    for (const auto& b : boxes) r = r.unite(from_box(space, b));
    return r;
}

inline RepSet RepSet::singleton(Space space, const Point& p)
{
    if (p.dims() != space.dims()) throw SpaceMismatch();
    if (p.is_top()) return from_box(space, Box::top_only(space.dims()));
    Box b;
    for (std::size_t i = 0; i < space.dims(); ++i) b.digits.push_back(DigitConstraint::finite({p.digit(i)}));
    return from_box(space, b);
}

inline RepSet RepSet::at_most(Space space, const Point& p)
{
    if (p.dims() != space.dims()) throw SpaceMismatch();
    if (p.is_top()) return full(space);
    const std::size_t k = space.dims();
    RepSet r = singleton(space, p);
    // Points agreeing with p above position i and smaller at position i.
    for (std::size_t i = 0; i < k; ++i) {
        if (p.digit(i) == 0) continue;
        Box b = Box::any(k);
        for (std::size_t j = i + 1; j < k; ++j) b.digits[j] = DigitConstraint::finite({p.digit(j)});
        std::vector<Digit> below;
        for (Digit v = 0; v < p.digit(i); ++v) below.push_back(v);
        b.digits[i] = DigitConstraint::finite(std::move(below));
        r = r.unite(from_box(space, b));
    }
    return r;
}

inline RepSet RepSet::interval(Space space, const Point& lo, const Point& hi)
{
    return at_most(space, hi).minus(at_most(space, lo));
}

inline RepSet RepSet::limits(Space space)
{
    Box b = Box::any(space.dims());
    b.digits[0] = DigitConstraint::finite({0});
    b.includes_top = true;
    return from_box(space, b).minus(singleton(space, Point::zero(space.dims())));
}

inline RepSet RepSet::successors(Space space)
{
    Box b = Box::any(space.dims());
    b.digits[0] = DigitConstraint::at_least(1);
    return from_box(space, b);
}

inline std::string Box::str() const
{
    std::vector<std::string> clauses;
    bool digits_empty = false;
    for (const auto& d : digits) digits_empty = digits_empty || d.is_empty();
    if (digits_empty && includes_top) return "top";
    for (std::size_t i = digits.size(); i-- > 0;)
        if (!digits[i].is_any()) clauses.push_back(digits[i].str(i));
    if (clauses.empty()) clauses.push_back(DigitConstraint::any().str(digits.size() - 1));
    if (includes_top) clauses.push_back("top");
    std::string s;
    for (std::size_t i = 0; i < clauses.size(); ++i) s += (i ? "; " : "") + clauses[i];
    return s;
}

inline std::vector<Box> RepSet::boxes() const
{
    const std::size_t k = space_.dims();
    std::vector<Box> out;
    std::vector<DigitConstraint> current(k, DigitConstraint::any());
    // Split on the highest remaining position, grouping values whose lower slices agree.
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t base) {
        const std::size_t len = grid_.stride[pos];
        std::map<std::vector<bool>, std::vector<Digit>> groups;
        std::vector<std::vector<bool>> order;
        for (Digit c = 0; c <= grid_.cut[pos]; ++c) {
            const std::size_t b0 = base + static_cast<std::size_t>(c) * len;
            if (!detail::block_nonempty(bits_, b0, len)) continue;
            std::vector<bool> key(len);
            for (std::size_t t = 0; t < len; ++t) key[t] = bits_[b0 + t];
            auto [it, inserted] = groups.try_emplace(key);
            if (inserted) order.push_back(key);
            it->second.push_back(c);
        }
        for (const auto& key : order) {
            const auto& cells = groups[key];
            const Digit tail = grid_.cut[pos];
            if (cells.back() == tail) {
                std::vector<Digit> excluded;
                for (Digit v = 0; v < tail; ++v)
                    if (!std::binary_search(cells.begin(), cells.end(), v)) excluded.push_back(v);
                current[pos] = DigitConstraint::cofinite(std::move(excluded));
            } else {
                current[pos] = DigitConstraint::finite(cells);
            }
            if (pos == 0) {
                out.push_back(Box{current, false});
            } else {
                rec(pos - 1, base + static_cast<std::size_t>(cells.front()) * len);
            }
        }
        current[pos] = DigitConstraint::any();
    };
    if (bits_.any()) rec(k - 1, 0);
    if (top_) out.push_back(Box::top_only(k));
    return out;
}

inline std::string RepSet::str() const
{
    if (is_empty()) return "empty";
    if (is_full()) return "all";
    std::string s;
    for (const auto& b : boxes()) s += (s.empty() ? "" : " | ") + b.str();
    return s;
}

inline std::ostream& operator<<(std::ostream& os, const RepSet& s) { return os << s.str(); }

// ---------------------------------------------------------------------------
// Topology

/// Topological closure in the order topology of [0, w^K].
///
/// A limit x whose least nonzero digit sits at position j >= 1 is adherent
/// to S iff S has points agreeing with x above j, with digit j equal to
/// x_j - 1 and digit j-1 unbounded. The top point is adherent iff digit K-1
/// is unbounded on S.
inline RepSet closure(const RepSet& s)
{
    const std::size_t k = s.space().dims();
    std::vector<Digit> cuts = s.grid().cut;
    cuts[0] = std::max<Digit>(cuts[0], 1);
    for (std::size_t i = 1; i < k; ++i) cuts[i] += 1;
    detail::Grid g(cuts);
    detail::Bits r = s.bits_on(g);

    // reach[j][key]: some member has the high coordinates `key` (positions >= j)
    // and a tail cell at position j-1.
    std::vector<std::vector<bool>> reach(k + 1);
    for (std::size_t j = 1; j <= k; ++j) reach[j].assign(j == k ? 1 : g.size / g.stride[j], false);
    for (std::size_t idx = r.find_first(); idx != detail::Bits::npos; idx = r.find_next(idx)) {
        for (std::size_t j = 1; j <= k; ++j)
            if (g.coord(idx, j - 1) == g.cut[j - 1]) reach[j][j == k ? 0 : idx / g.stride[j]] = true;
    }

    detail::Bits out = r;
    for (std::size_t idx = 0; idx < g.size; ++idx) {
        if (r[idx]) continue;
        std::size_t j = 0;
        while (j < k && g.coord(idx, j) == 0) ++j;
        if (j == 0 || j == k) continue;
        const Digit xj = g.coord(idx, j);
        const Digit yj = xj == g.cut[j] ? g.cut[j] : xj - 1;
        const std::size_t key = idx / g.stride[j] - xj + yj;
        if (reach[j][key]) out.set(idx);
    }
    const bool top = s.contains_top() || reach[k][0];
    return RepSet::from_cells(s.space(), std::move(g), std::move(out), top);
}

inline bool is_closed(const RepSet& s) { return closure(s) == s; }

inline RepSet interior(const RepSet& s) { return closure(s.complement()).complement(); }

inline bool is_clopen(const RepSet& s) { return is_closed(s) && is_closed(s.complement()); }

/// Least member of s strictly above beta.
inline std::optional<Point> min_above(const RepSet& s, const Point& beta)
{
    if (beta.dims() != s.space().dims()) throw SpaceMismatch();
    if (beta.is_top()) return std::nullopt;
    const auto& g = s.grid();
    const auto& bits = s.bits();
    const std::size_t k = g.dims();

    for (std::size_t i = 0; i < k; ++i) {
        std::size_t high = 0;
        for (std::size_t q = i + 1; q < k; ++q) high += static_cast<std::size_t>(g.cell_of(q, beta.digit(q))) * g.stride[q];
        const Digit start = beta.digit(i) + 1;
        std::optional<Digit> chosen;
        for (Digit v = start;; ++v) {
            const Digit c = g.cell_of(i, v);
            if (detail::block_nonempty(bits, high + static_cast<std::size_t>(c) * g.stride[i], g.stride[i])) {
                chosen = v;
                break;
            }
            if (c == g.cut[i]) break;
        }
        if (!chosen) continue;
        std::vector<Digit> d = beta.digits();
        for (std::size_t q = 0; q < i; ++q) d[q] = 0;
        d[i] = *chosen;
        std::size_t base = high + static_cast<std::size_t>(g.cell_of(i, *chosen)) * g.stride[i];
        for (std::size_t p = i; p-- > 0;) {
            for (Digit v = 0;; ++v) {
                const std::size_t b = base + static_cast<std::size_t>(g.cell_of(p, v)) * g.stride[p];
                if (detail::block_nonempty(bits, b, g.stride[p])) {
                    d[p] = v;
                    base = b;
                    break;
                }
            }
        }
        return Point::from_digits(std::move(d));
    }
    if (s.contains_top()) return Point::top(k);
    return std::nullopt;
}

inline std::optional<Point> min_element(const RepSet& s)
{
    const Point zero = Point::zero(s.space().dims());
    if (s.contains(zero)) return zero;
    return min_above(s, zero);
}

/// Greatest member, if the supremum is attained.
inline std::optional<Point> max_element(const RepSet& s)
{
    if (s.contains_top()) return Point::top(s.space().dims());
    if (s.is_empty()) return std::nullopt;
    const auto& g = s.grid();
    std::vector<Digit> d(g.dims(), 0);
    std::size_t base = 0;
    for (std::size_t p = g.dims(); p-- > 0;) {
        bool found = false;
        for (Digit c = g.cut[p] + 1; c-- > 0;) {
            const std::size_t b = base + static_cast<std::size_t>(c) * g.stride[p];
            if (!detail::block_nonempty(s.bits(), b, g.stride[p])) continue;
            if (c == g.cut[p]) return std::nullopt;
            d[p] = c;
            base = b;
            found = true;
            break;
        }
        if (!found) return std::nullopt;
    }
    return Point::from_digits(std::move(d));
}

/// { y : (y above j, y_j + 1, 0, ..., 0) in s }, the set of points lying in a
/// left neighbourhood of a member of s with least nonzero digit j (j = K
/// means the top point).
inline RepSet limit_shift_preimage(const RepSet& s, std::size_t j)
{
    const std::size_t k = s.space().dims();
    if (j == 0 || j > k) throw std::out_of_range("shift position must be in 1..K");
    if (j == k) return s.contains_top() ? RepSet::full(s.space()) - RepSet::singleton(s.space(), Point::top(k)) : RepSet(s.space());
    const auto& g = s.grid();
    std::vector<Digit> cuts(k, 0);
    for (std::size_t i = j; i < k; ++i) cuts[i] = g.cut[i];
    detail::Grid out_grid(cuts);
    detail::Bits out(out_grid.size);
    for (std::size_t idx = 0; idx < out_grid.size; ++idx) {
        std::size_t src = 0;
        for (std::size_t i = j; i < k; ++i) {
            Digit c = out_grid.coord(idx, i);
            if (i == j) c = c == g.cut[i] ? c : std::min<Digit>(c + 1, g.cut[i]);
            src += static_cast<std::size_t>(c) * g.stride[i];
        }
        if (s.bits()[src]) out.set(idx);
    }
    return RepSet::from_cells(s.space(), std::move(out_grid), std::move(out), false);
}

/// Closed subspace Y with closures taken relative to Y.
class Subspace {
public:
    explicit Subspace(RepSet carrier) : carrier_(std::move(carrier))
    {
        if (!is_closed(carrier_)) throw std::invalid_argument("subspace must be closed");
    }
    static Subspace whole(Space space) { return Subspace(RepSet::full(space)); }

    const RepSet& carrier() const { return carrier_; }
    const Space& space() const { return carrier_.space(); }
    RepSet closure(const RepSet& s) const { return kl::closure(s & carrier_) & carrier_; }
    RepSet complement(const RepSet& s) const { return carrier_ - s; }

private:
    RepSet carrier_;
};

/// A set viewed inside a closed subspace.
struct RelativeSet {
    Subspace subspace;
    RepSet set;

    RepSet closure() const { return subspace.closure(set); }
    bool is_closed() const { return closure() == set; }
};

inline RelativeSet restrict(const RepSet& s, const RepSet& y) { return RelativeSet{Subspace(y), s & y}; }

}  // namespace kl
