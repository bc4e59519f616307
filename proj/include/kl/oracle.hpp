#pragma once

#include "kl/functions.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace kl {

/// All points of [0, w^K] whose digits are <= bound, plus the top point.
class ProbeSet {
public:
    ProbeSet(Space space, Digit bound) : space_(space), bound_(bound)
    {
        const std::size_t k = space.dims();
        std::vector<Digit> d(k, 0);
        for (;;) {
            points_.push_back(Point::from_digits(d));
            std::size_t i = 0;
            while (i < k && d[i] == bound) d[i++] = 0;
            if (i == k) break;
            ++d[i];
        }
        points_.push_back(Point::top(k));
    }

    const Space& space() const { return space_; }
    Digit bound() const { return bound_; }
    const std::vector<Point>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }

private:
    Space space_;
    Digit bound_;
    std::vector<Point> points_;
};

/// lambda[n] for a nonzero limit point lambda.
inline Point fundamental(const Point& lambda, Digit n)
{
    const std::size_t k = lambda.dims();
    if (lambda.is_top()) {
        std::vector<Digit> d(k, 0);
        d[k - 1] = n;
        return Point::from_digits(std::move(d));
    }
    if (!lambda.is_limit()) throw std::invalid_argument("fundamental sequence needs a limit point");
    const std::size_t j = *lambda.least_nonzero();
    std::vector<Digit> d = lambda.digits();
    d[j] -= 1;
    d[j - 1] = n;
    return Point::from_digits(std::move(d));
}

inline bool is_limit_point(const Point& p) { return p.is_top() || p.is_limit(); }

namespace detail {

/// S meets the open interval (lo, hi).
inline bool meets_between(const RepSet& s, const Point& lo, const Point& hi)
{
    auto m = min_above(s, lo);
    return m && *m < hi;
}

}  // namespace detail

inline Digit default_horizon(const RepSet& s) { return s.max_constant() + 2; }

/// Membership of lambda in the closure of s, by scanning the basic
/// neighbourhoods (lambda[n], lambda] for n <= horizon.
inline bool closure_oracle(const RepSet& s, const Point& lambda, std::optional<Digit> horizon = std::nullopt)
{
    if (s.contains(lambda)) return true;
    if (!is_limit_point(lambda)) return false;
    const Digit n_max = horizon.value_or(default_horizon(s));
    for (Digit n = 0; n <= n_max; ++n)
        if (!detail::meets_between(s, fundamental(lambda, n), lambda)) return false;
    return true;
}

namespace detail {

/// Values of f taken on (lambda[n], x] intersected with F, or on {x} when
/// x is isolated.
inline std::vector<Rational> values_near(const std::vector<Piece>& parts, const Point& x, Digit n)
{
    std::vector<Rational> vals;
    for (const auto& p : parts) {
        bool hit = p.set.contains(x);
        if (!hit && is_limit_point(x)) hit = meets_between(p.set, fundamental(x, n), x);
        if (hit) vals.push_back(p.value);
    }
    return vals;
}

inline std::vector<Piece> pieces_within(const StepFunction& f, const RepSet& F)
{
    std::vector<Piece> parts;
    for (const auto& p : f.pieces()) parts.push_back(Piece{p.value, p.set & F});
    return parts;
}

inline std::vector<Rational> values_near(const StepFunction& f, const Point& x, const RepSet& F, Digit n)
{
    return values_near(pieces_within(f, F), x, n);
}

inline Digit function_horizon(const StepFunction& f, const RepSet& F)
{
    Digit m = F.max_constant();
    for (const auto& p : f.pieces()) m = std::max(m, p.set.max_constant());
    return m + 2;
}

}  // namespace detail

/// Both oscillation oracles for a fixed f and F, with the pieces of f inside
/// F computed once.
class OscillationProbe {
public:
    OscillationProbe(const StepFunction& f, const RepSet& F, std::optional<Digit> horizon = std::nullopt)
        : f_(f), F_(F), parts_(detail::pieces_within(f, F)), n_(horizon.value_or(detail::function_horizon(f, F)))
    {
    }

    bool oscillation(const Point& x, const Rational& eps) const
    {
        if (!F_.contains(x)) return false;
        auto vals = detail::values_near(parts_, x, n_);
        if (vals.empty()) return false;
        auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
        return *hi - *lo >= eps;
    }

    bool oscillation0(const Point& x, const Rational& eps) const
    {
        if (!F_.contains(x)) return false;
        const Rational fx = f_(x);
        for (const auto& v : detail::values_near(parts_, x, n_))
            if (abs(v - fx) >= eps) return true;
        return false;
    }

private:
    const StepFunction& f_;
    RepSet F_;
    std::vector<Piece> parts_;
    Digit n_;
};

/// omega(f, x, F) >= eps, from the values f takes near x inside F.
inline bool oscillation_oracle(const StepFunction& f, const Point& x, const RepSet& F, const Rational& eps,
                               std::optional<Digit> horizon = std::nullopt)
{
    if (!F.contains(x)) return false;
    const Digit n = horizon.value_or(detail::function_horizon(f, F));
    auto vals = detail::values_near(f, x, F, n);
    if (vals.empty()) return false;
    auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
    return *hi - *lo >= eps;
}

/// One-sided variant: some value at distance >= eps from f(x) occurs in
/// every neighbourhood of x inside F.
inline bool oscillation0_oracle(const StepFunction& f, const Point& x, const RepSet& F, const Rational& eps,
                                std::optional<Digit> horizon = std::nullopt)
{
    if (!F.contains(x)) return false;
    const Digit n = horizon.value_or(detail::function_horizon(f, F));
    const Rational fx = f(x);
    for (const auto& v : detail::values_near(f, x, F, n))
        if (abs(v - fx) >= eps) return true;
    return false;
}

enum class Confidence { certified, bounded_only };

inline const char* confidence_str(Confidence c) { return c == Confidence::certified ? "certified" : "bounded-only"; }

struct OracleVerdict {
    bool value = false;
    Confidence confidence = Confidence::bounded_only;
};

struct SeqHorizon {
    Digit neighbourhood = 0;  // basic neighbourhood index n
    Digit stage = 0;          // tail start N
    Digit digits = 0;         // search bound on free digits of witnesses
};

namespace detail {

/// sup over n, m >= N of |f_n(y) - f_m(y)|, using that every component is
/// constant from its threshold on.
inline Rational tail_spread(const SeqTemplate& t, const Point& y, std::uint64_t n0)
{
    const std::uint64_t last = std::max<std::uint64_t>(n0, t.settle_stage(y)) + 1;
    Rational lo = t.eval(n0, y), hi = lo;
    for (std::uint64_t n = n0 + 1; n <= last; ++n) {
        Rational v = t.eval(n, y);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

inline bool seq_osc_at(const SeqTemplate& t, const Point& x, const RepSet& F, const Rational& eps, const SeqHorizon& h)
{
    if (!F.contains(x)) return false;
    const std::size_t k = x.dims();
    // Candidate witnesses: x itself and points of (x[n], x) with bounded free digits.
    if (tail_spread(t, x, h.stage) >= eps) return true;
    if (!is_limit_point(x)) return false;
    const Point lo = fundamental(x, h.neighbourhood);
    const std::size_t j = x.is_top() ? k : *x.least_nonzero();
    std::vector<Digit> d = lo.digits();
    for (std::size_t p = 0; p < j; ++p) d[p] = 0;
    d[j - 1] = h.neighbourhood;
    for (;;) {
        Point y = Point::from_digits(d);
        if (lo < y && F.contains(y) && tail_spread(t, y, h.stage) >= eps) return true;
        std::size_t i = 0;
        while (i < j && d[i] == h.digits) d[i++] = 0;
        if (i == j) break;
        ++d[i];
        if (i == j - 1 && d[i] < h.neighbourhood) d[i] = h.neighbourhood;
    }
    return false;
}

}  // namespace detail

inline SeqHorizon default_seq_horizon(const SeqTemplate& t, const RepSet& F)
{
    Digit spread = 0;
    for (const auto& c : t.components())
        for (const auto& term : c.family.terms())
            spread = std::max<Digit>(spread, static_cast<Digit>(term.offset < 0 ? -term.offset : term.offset));
    const Digit base = std::max(t.max_constant(), F.max_constant()) + 2;
    const std::size_t k = t.space().dims();
    return SeqHorizon{base, base, 2 * base + (spread + 1) * static_cast<Digit>(k + 1)};
}

/// Truncated evaluation of the sequence oscillation omega((f_k), x, F) >= eps.
/// Certified when the template's monotone form has been verified and the
/// verdict is unchanged with every horizon raised by 5.
inline OracleVerdict seq_oscillation_oracle(const SeqTemplate& t, const Point& x, const RepSet& F, const Rational& eps,
                                            std::optional<SeqHorizon> horizon = std::nullopt, bool certificate_ok = true)
{
    const SeqHorizon h = horizon.value_or(default_seq_horizon(t, F));
    const bool v = detail::seq_osc_at(t, x, F, eps, h);
    const SeqHorizon h5{h.neighbourhood + 5, h.stage + 5, h.digits + 10};
    const bool v5 = detail::seq_osc_at(t, x, F, eps, h5);
    OracleVerdict out{v, Confidence::bounded_only};
    if (certificate_ok && v == v5) out.confidence = Confidence::certified;
    return out;
}

/// f_k(y) is constant from the settle stage on, checked directly on `extra`
/// further stages. Returns the first failing probe point.
inline std::optional<Point> pointwise_convergence_failure(const SeqTemplate& t, const ProbeSet& probes, std::uint64_t extra = 5)
{
    for (const auto& y : probes.points()) {
        const std::uint64_t s = t.settle_stage(y);
        const Rational lim = t.limit_value(y);
        for (std::uint64_t k = s; k <= s + extra; ++k)
            if (t.eval(k, y) != lim) return y;
    }
    return std::nullopt;
}

/// Checks each component's declared monotone form against direct interval
/// evaluation on the probe points, up to a few stages past the declared
/// threshold, and that the first stages are clopen step functions. Returns a
/// description of the first violation.
inline std::optional<std::string> verify_certificate(const SeqTemplate& t, const ProbeSet& probes, std::uint64_t stages = 3)
{
    for (const auto& c : t.components()) {
        if (!c.source) continue;
        for (const auto& y : probes.points()) {
            const std::uint64_t th = c.family.threshold(y);
            for (std::uint64_t k = 0; k <= th + 3; ++k) {
                if (c.source->member(k, y) != c.family.member(k, y))
                    return "family '" + c.text + "' disagrees with its monotone form at stage " + std::to_string(k) + ", point " + y.str();
            }
        }
    }
    for (std::uint64_t k = 0; k < stages; ++k) {
        StepFunction fk = t.stage(k);
        if (!fk.is_continuous()) return "stage " + std::to_string(k) + " is not continuous";
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Ordinals below w^3 as digit triples, with arithmetic defined by the
// recursive clauses (successor steps and suprema along fundamental
// sequences) instead of normal-form rules.

class SmallOrdinalOracle {
public:
    /// (a0, a1, a2) meaning w^2*a2 + w*a1 + a0; overflow marks values >= w^3.
    struct Triple {
        std::array<std::uint64_t, 3> d{0, 0, 0};
        bool overflow = false;
        auto operator<=>(const Triple&) const = default;
    };

    static Triple make(std::uint64_t a2, std::uint64_t a1, std::uint64_t a0) { return Triple{{a0, a1, a2}, false}; }

    static std::strong_ordering compare(const Triple& a, const Triple& b)
    {
        for (std::size_t i = 3; i-- > 0;)
            if (a.d[i] != b.d[i]) return a.d[i] <=> b.d[i];
        return std::strong_ordering::equal;
    }

    Triple add(const Triple& a, const Triple& b)
    {
        if (a.overflow || b.overflow) return overflowed();
        auto key = std::make_pair(a, b);
        if (auto it = add_memo_.find(key); it != add_memo_.end()) return it->second;
        Triple r;
        if (is_zero(b)) r = a;
        else if (b.d[0] > 0) r = succ(add(a, pred(b)));
        else r = sup([&](std::uint64_t n) { return add(a, fund(b, n)); });
        add_memo_.emplace(key, r);
        return r;
    }

    Triple mul(const Triple& a, const Triple& b)
    {
        if (a.overflow || b.overflow) return overflowed();
        auto key = std::make_pair(a, b);
        if (auto it = mul_memo_.find(key); it != mul_memo_.end()) return it->second;
        Triple r;
        if (is_zero(b)) r = Triple{};
        else if (b.d[0] > 0) r = add(mul(a, pred(b)), a);
        else r = sup([&](std::uint64_t n) { return mul(a, fund(b, n)); });
        mul_memo_.emplace(key, r);
        return r;
    }

    static Ordinal to_ordinal(const Triple& t)
    {
        return Ordinal::omega_pow(Ordinal(2)) * Ordinal(t.d[2]) + Ordinal::omega() * Ordinal(t.d[1]) + Ordinal(t.d[0]);
    }

private:
    static constexpr std::uint64_t probe_a = 12, probe_b = 13;

    static Triple overflowed()
    {
        Triple t;
        t.overflow = true;
        return t;
    }
    static bool is_zero(const Triple& t) { return !t.overflow && t.d[0] == 0 && t.d[1] == 0 && t.d[2] == 0; }
    static Triple succ(Triple t)
    {
        if (!t.overflow) ++t.d[0];
        return t;
    }
    static Triple pred(Triple t)
    {
        --t.d[0];
        return t;
    }
    static Triple fund(const Triple& t, std::uint64_t n)
    {
        Triple r = t;
        std::size_t j = t.d[1] != 0 ? 1 : 2;
        r.d[j] -= 1;
        r.d[j - 1] = n;
        return r;
    }

    /// Supremum of an increasing sequence, read off from two late terms: the
    /// highest digit that keeps growing carries into the digit above it.
    template <class Seq>
    static Triple sup(Seq s)
    {
        const Triple a = s(probe_a), b = s(probe_b);
        if (a.overflow || b.overflow) return overflowed();
        for (std::size_t i = 3; i-- > 0;) {
            if (a.d[i] == b.d[i]) continue;
            if (i == 2) return overflowed();
            Triple r = b;
            for (std::size_t q = 0; q <= i; ++q) r.d[q] = 0;
            r.d[i + 1] += 1;
            return r;
        }
        return b;  // eventually constant
    }

    std::map<std::pair<Triple, Triple>, Triple> add_memo_, mul_memo_;
};

}  // namespace kl
