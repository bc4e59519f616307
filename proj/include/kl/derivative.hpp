#pragma once

#include "kl/functions.hpp"
#include "kl/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace kl {

enum class DerivativeKind { separation, oscillation, oscillation_one_sided, convergence, custom };

inline const char* kind_str(DerivativeKind k)
{
    switch (k) {
    case DerivativeKind::separation: return "separation";
    case DerivativeKind::oscillation: return "oscillation";
    case DerivativeKind::oscillation_one_sided: return "oscillation-one-sided";
    case DerivativeKind::convergence: return "convergence";
    case DerivativeKind::custom: return "custom";
    }
    return "?";
}

class DerivativeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CertificateError : public DerivativeError {
public:
    using DerivativeError::DerivativeError;
};

/// A contracting map on sets, applied with a containment check.
class Derivative {
public:
    using Fn = std::function<RepSet(const RepSet&)>;

    Derivative(DerivativeKind kind, std::string params, Fn fn) : kind_(kind), params_(std::move(params)), fn_(std::move(fn)) {}

    RepSet operator()(const RepSet& f) const
    {
        RepSet d = fn_(f);
        if (!d.subset_of(f))
            throw DerivativeError(std::string(kind_str(kind_)) + " derivative left its argument at " + min_element(d - f)->str());
        return d;
    }

    DerivativeKind kind() const { return kind_; }
    const std::string& params() const { return params_; }
    std::string str() const { return std::string(kind_str(kind_)) + "(" + params_ + ")"; }

private:
    DerivativeKind kind_;
    std::string params_;
    Fn fn_;
};

inline void require_positive(const Rational& eps)
{
    if (eps <= 0) throw std::invalid_argument("epsilon must be positive, got " + rational_str(eps));
}

/// F -> cl(F & A) & cl(F & B).
inline Derivative sep_derivative(const RepSet& a, const RepSet& b)
{
    return Derivative(DerivativeKind::separation, "A=" + a.str() + "; B=" + b.str(),
                      [a, b](const RepSet& f) { return f & closure(f & a) & closure(f & b); });
}

namespace detail {

/// out[k] = union of sets[k..].
inline std::vector<RepSet> suffix_unions(const std::vector<RepSet>& sets)
{
    std::vector<RepSet> out(sets.size() + 1, RepSet(sets.empty() ? Space(1) : sets.front().space()));
    for (std::size_t k = sets.size(); k-- > 0;) out[k] = out[k + 1] | sets[k];
    return out;
}

/// Index of the first piece with value >= v (> v when strict).
inline std::size_t first_at_least(const std::vector<Piece>& ps, const Rational& v, bool strict = false)
{
    auto it = strict ? std::upper_bound(ps.begin(), ps.end(), v, [](const Rational& x, const Piece& p) { return x < p.value; })
                     : std::lower_bound(ps.begin(), ps.end(), v, [](const Piece& p, const Rational& x) { return p.value < x; });
    return static_cast<std::size_t>(it - ps.begin());
}

}  // namespace detail

/// F -> points of F where the oscillation of f relative to F is >= eps.
inline Derivative osc_derivative(const StepFunction& f, const Rational& eps)
{
    require_positive(eps);
    return Derivative(DerivativeKind::oscillation, "eps=" + rational_str(eps), [f, eps](const RepSet& F) {
        const auto& ps = f.pieces();
        std::vector<RepSet> cl;
        for (const auto& p : ps) cl.push_back(closure(F & p.set));
        const auto above = detail::suffix_unions(cl);
        RepSet out(F.space());
        for (std::size_t i = 0; i < ps.size(); ++i) out = out | (cl[i] & above[detail::first_at_least(ps, ps[i].value + eps)]);
        return out & F;
    });
}

/// One-sided variant: x in F stays when some value at distance >= eps from
/// f(x) accumulates at x inside F.
inline Derivative osc0_derivative(const StepFunction& f, const Rational& eps)
{
    require_positive(eps);
    return Derivative(DerivativeKind::oscillation_one_sided, "eps=" + rational_str(eps), [f, eps](const RepSet& F) {
        const auto& ps = f.pieces();
        std::vector<RepSet> cl;
        for (const auto& p : ps) cl.push_back(closure(F & p.set));
        const auto above = detail::suffix_unions(cl);
        std::vector<RepSet> below{RepSet(F.space())};
        for (const auto& c : cl) below.push_back(below.back() | c);
        RepSet out(F.space());
        for (std::size_t i = 0; i < ps.size(); ++i) {
            const RepSet far = below[detail::first_at_least(ps, ps[i].value - eps, true)] | above[detail::first_at_least(ps, ps[i].value + eps)];
            out = out | (ps[i].set & far);
        }
        return out & F;
    });
}

namespace detail {

/// Exact evaluation of the convergence derivative of a monotone template.
///
/// Near a limit x (least nonzero digit j) the points of a basic neighbourhood
/// agree with x above j, have digit j equal to x_j - 1 and an arbitrarily
/// large digit j-1. On a cell where digit j-1 is in the tail, every component
/// term reading a tail digit at or below j-1 can be pushed past any stage N;
/// terms reading fixed digits settle. What remains is the order in which the
/// unsettled components flip, which depends only on the relative sizes of the
/// large digits. The cell witnesses oscillation >= eps iff some choice of
/// large digits and some ordering of them makes the visited values spread by
/// at least eps.
class ConvergenceEvaluator {
public:
    ConvergenceEvaluator(const SeqTemplate& t, Rational eps) : t_(t), eps_(std::move(eps)) {}

    RepSet apply(const RepSet& F)
    {
        const Space& space = F.space();
        const std::size_t k = space.dims();
        std::vector<Digit> cuts = F.grid().cut;
        auto widen = [&](const RepSet& s) {
            for (std::size_t i = 0; i < k; ++i) cuts[i] = std::max(cuts[i], s.grid().cut[i]);
        };
        for (const auto& c : t_.components()) {
            widen(c.family.limit());
            for (const auto& term : c.family.terms()) widen(term.region);
        }
        cuts[0] = std::max<Digit>(cuts[0], 1);
        for (std::size_t i = 1; i < k; ++i) cuts[i] += 1;
        const Grid g(cuts);

        const Bits fb = F.bits_on(g);
        limits_.clear();
        regions_.clear();
        for (const auto& c : t_.components()) {
            limits_.push_back(c.family.limit().bits_on(g));
            std::vector<Bits> rs;
            for (const auto& term : c.family.terms()) rs.push_back(term.region.bits_on(g));
            regions_.push_back(std::move(rs));
        }

        std::vector<std::vector<bool>> reach(k + 1);
        for (std::size_t j = 1; j <= k; ++j) reach[j].assign(j == k ? 1 : g.size / g.stride[j], false);
        for (std::size_t idx = fb.find_first(); idx != Bits::npos; idx = fb.find_next(idx)) {
            for (std::size_t j = 1; j <= k; ++j) {
                if (g.coord(idx, j - 1) != g.cut[j - 1]) continue;
                const std::size_t key = j == k ? 0 : idx / g.stride[j];
                if (reach[j][key]) continue;
                if (cell_oscillates(g, idx, j)) reach[j][key] = true;
            }
        }

        Bits out(g.size);
        for (std::size_t idx = fb.find_first(); idx != Bits::npos; idx = fb.find_next(idx)) {
            std::size_t j = 0;
            while (j < k && g.coord(idx, j) == 0) ++j;
            if (j == 0 || j == k) continue;
            const Digit xj = g.coord(idx, j);
            const Digit yj = xj == g.cut[j] ? g.cut[j] : xj - 1;
            if (reach[j][idx / g.stride[j] - xj + yj]) out.set(idx);
        }
        const bool top = F.contains_top() && reach[k][0];
        return RepSet::from_cells(space, g, std::move(out), top);
    }

private:
    using Grid = detail::Grid;
    using Bits = detail::Bits;

    struct FreeTerm {
        std::size_t digit;
        std::int64_t offset;
    };
    struct CompState {
        bool limit;
        std::vector<FreeTerm> terms;
    };

    bool cell_oscillates(const Grid& g, std::size_t idx, std::size_t j)
    {
        std::vector<CompState> comps;
        std::string sig = std::to_string(j) + ":";
        for (std::size_t c = 0; c < t_.components().size(); ++c) {
            CompState st{static_cast<bool>(limits_[c][idx]), {}};
            const auto& terms = t_.components()[c].family.terms();
            for (std::size_t ti = 0; ti < terms.size(); ++ti) {
                if (!regions_[c][ti][idx] || !terms[ti].digit) continue;
                const std::size_t p = *terms[ti].digit;
                const bool free = p == j - 1 || (p < j - 1 && g.coord(idx, p) == g.cut[p]);
                if (free) st.terms.push_back(FreeTerm{p, terms[ti].offset});
            }
            sig += st.limit ? "L" : "l";
            for (const auto& ft : st.terms) sig += std::to_string(ft.digit) + "/" + std::to_string(ft.offset) + ",";
            sig += ";";
            comps.push_back(std::move(st));
        }
        auto it = memo_.find(sig);
        if (it != memo_.end()) return it->second;
        const bool r = decide(comps, j - 1);
        memo_.emplace(sig, r);
        return r;
    }

    bool decide(const std::vector<CompState>& comps, std::size_t forced) const
    {
        std::vector<std::size_t> optional_digits;
        bool forced_used = false;
        for (const auto& c : comps)
            for (const auto& ft : c.terms) {
                if (ft.digit == forced) forced_used = true;
                else if (std::find(optional_digits.begin(), optional_digits.end(), ft.digit) == optional_digits.end())
                    optional_digits.push_back(ft.digit);
            }
        const std::size_t m = optional_digits.size();
        for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
            std::vector<std::size_t> large;
            if (forced_used) large.push_back(forced);
            for (std::size_t b = 0; b < m; ++b)
                if (mask >> b & 1) large.push_back(optional_digits[b]);
            if (large.empty()) continue;
            if (spread_reaches(comps, large)) return true;
        }
        return false;
    }

    bool spread_reaches(const std::vector<CompState>& comps, const std::vector<std::size_t>& large) const
    {
        const std::size_t r = large.size();
        std::int64_t omin = 0, omax = 0;
        bool any = false;
        for (const auto& c : comps)
            for (const auto& ft : c.terms) {
                if (std::find(large.begin(), large.end(), ft.digit) == large.end()) continue;
                omin = any ? std::min(omin, ft.offset) : ft.offset;
                omax = any ? std::max(omax, ft.offset) : ft.offset;
                any = true;
            }
        if (!any) return false;
        const std::int64_t span = static_cast<std::int64_t>(r - 1) * (omax - omin + 1);
        std::vector<std::int64_t> delta(r, 0);
        for (;;) {
            if (path_spread(comps, large, delta) >= eps_) return true;
            std::size_t i = 0;
            while (i < r && delta[i] == span) delta[i++] = 0;
            if (i == r) break;
            ++delta[i];
        }
        return false;
    }

    Rational path_spread(const std::vector<CompState>& comps, const std::vector<std::size_t>& large,
                         const std::vector<std::int64_t>& delta) const
    {
        Rational value = 0;
        std::vector<std::pair<std::int64_t, std::size_t>> flips;
        for (std::size_t c = 0; c < comps.size(); ++c) {
            std::optional<std::int64_t> mu;
            for (const auto& ft : comps[c].terms) {
                auto pos = std::find(large.begin(), large.end(), ft.digit);
                if (pos == large.end()) continue;
                const std::int64_t v = delta[static_cast<std::size_t>(pos - large.begin())] + ft.offset;
                mu = mu ? std::max(*mu, v) : v;
            }
            const Rational& vc = t_.components()[c].value;
            if (mu) {
                if (!comps[c].limit) value += vc;
                flips.emplace_back(*mu, c);
            } else if (comps[c].limit) {
                value += vc;
            }
        }
        std::sort(flips.begin(), flips.end());
        Rational lo = value, hi = value;
        for (std::size_t i = 0; i < flips.size();) {
            std::size_t e = i;
            while (e < flips.size() && flips[e].first == flips[i].first) {
                const std::size_t c = flips[e].second;
                const Rational& vc = t_.components()[c].value;
                value += comps[c].limit ? vc : -vc;
                ++e;
            }
            lo = std::min(lo, value);
            hi = std::max(hi, value);
            i = e;
        }
        return hi - lo;
    }

    const SeqTemplate& t_;
    Rational eps_;
    std::vector<Bits> limits_;
    std::vector<std::vector<Bits>> regions_;
    std::map<std::string, bool> memo_;
};

}  // namespace detail

/// F -> points of F where the sequence oscillation relative to F is >= eps.
inline Derivative conv_derivative(const SeqTemplate& t, const Rational& eps)
{
    require_positive(eps);
    bool sourced = false;
    for (const auto& c : t.components()) sourced = sourced || c.source.has_value();
    if (sourced) {
        if (auto bad = verify_certificate(t, ProbeSet(t.space(), 5))) throw CertificateError(*bad);
    }
    auto tp = std::make_shared<SeqTemplate>(t);
    return Derivative(DerivativeKind::convergence, "eps=" + rational_str(eps), [tp, eps](const RepSet& F) {
        detail::ConvergenceEvaluator ev(*tp, eps);
        return ev.apply(F);
    });
}

// ---------------------------------------------------------------------------

struct RankResult {
    std::optional<Ordinal> rank;  // empty: non-termination
    std::vector<RepSet> trace;    // D^0 = domain, D^1, ...
    bool stalled = false;
    bool capped = false;

    bool terminated() const { return rank.has_value(); }
    std::string rank_str() const { return rank ? rank->str() : (stalled ? "stalled" : "capped"); }
};

inline std::size_t default_cap(const Space& s) { return 10 * s.dims() + 16; }

/// Iterates D from the domain until the empty set, a repeated nonempty set,
/// or the cap.
inline RankResult iterate_rank(const Derivative& d, const RepSet& domain, std::optional<std::size_t> cap = std::nullopt)
{
    const std::size_t limit = cap.value_or(default_cap(domain.space()));
    if (limit < 1) throw std::invalid_argument("cap must be at least 1");
    RankResult r;
    r.trace.push_back(domain);
    for (std::size_t n = 0;; ++n) {
        const RepSet& cur = r.trace.back();
        if (cur.is_empty()) {
            r.rank = Ordinal(n);
            return r;
        }
        if (n >= limit) {
            r.capped = true;
            return r;
        }
        RepSet next = d(cur);
        if (next == cur) {
            r.stalled = true;
            return r;
        }
        r.trace.push_back(std::move(next));
    }
}

inline RankResult iterate_rank(const Derivative& d, const Space& space, std::optional<std::size_t> cap = std::nullopt)
{
    return iterate_rank(d, RepSet::full(space), cap);
}

struct DerivativeComparison {
    bool contained = true;
    std::optional<RepSet> failing_sample;
    RankResult first, second;
    bool ranks_ordered = false;
};

/// Checks D1(F) <= D2(F) on the samples, then compares the ranks.
inline DerivativeComparison compare_derivatives(const Derivative& d1, const Derivative& d2, const std::vector<RepSet>& samples,
                                                const RepSet& domain, std::optional<std::size_t> cap = std::nullopt)
{
    DerivativeComparison c;
    for (const auto& f : samples) {
        if (!d1(f).subset_of(d2(f))) {
            c.contained = false;
            c.failing_sample = f;
            break;
        }
    }
    c.first = iterate_rank(d1, domain, cap);
    c.second = iterate_rank(d2, domain, cap);
    if (c.first.rank && c.second.rank) c.ranks_ordered = *c.first.rank <= *c.second.rank;
    else c.ranks_ordered = !c.second.rank;
    // Stage-by-stage containment along the traces is what the rank comparison rests on.
    for (std::size_t i = 0; i < c.first.trace.size() && i < c.second.trace.size(); ++i)
        if (!c.first.trace[i].subset_of(c.second.trace[i])) c.contained = false;
    return c;
}

struct UglyLemmaCheck {
    bool condition1 = true;  // D(F) <= union of D_k(F) on the samples
    bool condition2 = true;  // D(F u F') <= D(F) u D(F') on sample pairs
    bool conclusion = true;  // D^{m n}(F) <= union of D_k^m(F), m <= m_max
    std::string detail;
    bool vacuous() const { return !(condition1 && condition2); }
    bool holds() const { return vacuous() || conclusion; }
};

inline RepSet iterate(const Derivative& d, RepSet f, std::size_t times)
{
    for (std::size_t i = 0; i < times && !f.is_empty(); ++i) f = d(f);
    return f;
}

/// The finite unrolling of the union lemma for derivatives.
inline UglyLemmaCheck check_ugly_lemma(const Derivative& d, const std::vector<Derivative>& parts, const std::vector<RepSet>& samples,
                                       std::size_t m_max = 3)
{
    UglyLemmaCheck r;
    const std::size_t n = parts.size();
    for (const auto& f : samples) {
        RepSet u(f.space());
        for (const auto& dk : parts) u = u | dk(f);
        if (!d(f).subset_of(u)) {
            r.condition1 = false;
            r.detail = "condition (1) fails on " + f.str();
        }
    }
    for (std::size_t a = 0; a < samples.size(); ++a)
        for (std::size_t b = a + 1; b < samples.size(); ++b) {
            if (!d(samples[a] | samples[b]).subset_of(d(samples[a]) | d(samples[b]))) {
                r.condition2 = false;
                r.detail = "condition (2) fails on " + samples[a].str() + " and " + samples[b].str();
            }
        }
    for (const auto& f : samples) {
        RepSet lhs = f;
        std::vector<RepSet> iter(n, f);
        for (std::size_t m = 1; m <= m_max; ++m) {
            lhs = iterate(d, lhs, n);
            RepSet rhs(f.space());
            for (std::size_t k = 0; k < n; ++k) rhs = rhs | (iter[k] = iterate(parts[k], iter[k], 1));
            if (!lhs.subset_of(rhs)) {
                r.conclusion = false;
                r.detail = "conclusion fails at m=" + std::to_string(m) + " on " + f.str();
            }
        }
    }
    return r;
}

}  // namespace kl
