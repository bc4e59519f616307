#pragma once

#include "kl/corpus.hpp"
#include "kl/derivative.hpp"
#include "kl/oracle.hpp"

#include <array>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace kl {

class RankError : public std::runtime_error {
public:
    RankError(const std::string& what, RepSet stalled) : std::runtime_error(what), stalled_(std::move(stalled)) {}
    const RepSet& stalled() const { return stalled_; }

private:
    RepSet stalled_;
};

inline Ordinal require_rank(const RankResult& r, const std::string& what)
{
    if (!r.rank) throw RankError(what + " did not terminate (" + r.rank_str() + ")", r.trace.back());
    return *r.rank;
}

inline RepSet sym_diff(const RepSet& a, const RepSet& b) { return (a - b) | (b - a); }

inline Ordinal max_ord(const Ordinal& a, const Ordinal& b) { return a < b ? b : a; }

/// Distinct positive differences between values of f, ascending.
inline std::vector<Rational> value_gaps(const std::vector<Rational>& vals)
{
    std::set<Rational> gaps;
    for (std::size_t i = 0; i < vals.size(); ++i)
        for (std::size_t j = i + 1; j < vals.size(); ++j)
            if (vals[i] != vals[j]) gaps.insert(abs(vals[i] - vals[j]));
    return {gaps.begin(), gaps.end()};
}

inline std::vector<Rational> value_gaps(const StepFunction& f) { return value_gaps(f.values()); }

/// Least gap between values of f, or 1 for a constant function.
inline Rational min_gap(const StepFunction& f)
{
    auto g = value_gaps(f);
    return g.empty() ? Rational(1) : g.front();
}

inline StepFunction characteristic_on(const RepSet& domain, const RepSet& a)
{
    return StepFunction(domain, {Piece{1, a & domain}, Piece{0, domain - a}});
}

// ---------------------------------------------------------------------------
// Separation rank

inline Ordinal sep_rank(const RepSet& a, const RepSet& b, const RepSet& domain, std::optional<std::size_t> cap = std::nullopt)
{
    return require_rank(iterate_rank(sep_derivative(a, b), domain, cap), "separation derivative");
}

struct PairRank {
    Rational p, q;
    RankResult result;
};

struct AlphaResult {
    Ordinal rank;
    std::vector<PairRank> pairs;
};

/// Max over value pairs p < q of the separation rank of {f <= p}, {f >= q}.
inline AlphaResult alpha_detail(const StepFunction& f, std::optional<std::size_t> cap = std::nullopt)
{
    const RepSet& dom = f.domain();
    AlphaResult out{dom.is_empty() ? Ordinal(0) : Ordinal(1), {}};
    const auto vals = f.values();
    for (std::size_t i = 0; i < vals.size(); ++i)
        for (std::size_t j = i + 1; j < vals.size(); ++j) {
            RankResult r = iterate_rank(sep_derivative(f.level_set(Relation::less_equal, vals[i]), f.level_set(Relation::greater_equal, vals[j])),
                                        dom, cap);
            out.rank = max_ord(out.rank, require_rank(r, "separation derivative"));
            out.pairs.push_back(PairRank{vals[i], vals[j], std::move(r)});
        }
    return out;
}

inline Ordinal alpha_rank(const StepFunction& f, std::optional<std::size_t> cap = std::nullopt) { return alpha_detail(f, cap).rank; }

/// F_{2e} = D^e(X), F_{2e+1} = cl(D^e(X) & B).
inline ClosedChain chain_from_derivative(const RepSet& a, const RepSet& b, const RepSet& domain, std::optional<std::size_t> cap = std::nullopt)
{
    RankResult r = iterate_rank(sep_derivative(a, b), domain, cap);
    require_rank(r, "separation derivative");
    std::vector<RepSet> sets;
    for (std::size_t e = 0; e + 1 < r.trace.size(); ++e) {
        sets.push_back(r.trace[e]);
        sets.push_back(closure(r.trace[e] & b));
    }
    while (sets.size() > 1 && sets.back().is_empty()) sets.pop_back();
    if (sets.empty()) sets.push_back(domain);
    ClosedChain c(domain, std::move(sets));
    RepSet td = transfinite_difference(c);
    if (!(a & domain).subset_of(td) || !(td & b).is_empty()) throw std::logic_error("constructed chain does not separate");
    return c;
}

inline ClosedChain chain_from_derivative(const RepSet& a, const RepSet& b, std::optional<std::size_t> cap = std::nullopt)
{
    return chain_from_derivative(a, b, RepSet::full(a.space()), cap);
}

struct ChainCertificate {
    std::size_t length = 0;
    std::vector<RepSet> trace;
    bool ok = false;
    std::optional<std::size_t> failing_stage;
};

/// Checks that the chain separates A from B, then D^e(X) <= F_e for every e
/// up to the chain length.
inline ChainCertificate derivative_bound_from_chain(const RepSet& a, const RepSet& b, const ClosedChain& c)
{
    const RepSet& dom = c.domain();
    const RepSet td = transfinite_difference(c);
    if (RepSet miss = (a & dom) - td; !miss.is_empty()) throw ValidationError("chain does not cover the first set", min_element(miss));
    if (RepSet bad = td & b; !bad.is_empty()) throw ValidationError("chain meets the second set", min_element(bad));
    ChainCertificate cert;
    cert.length = c.size();
    auto d = sep_derivative(a, b);
    RepSet f = dom;
    cert.trace.push_back(f);
    for (std::size_t e = 0; e <= c.size(); ++e) {
        if (!f.subset_of(c.at(e))) {
            cert.failing_stage = e;
            return cert;
        }
        if (f.is_empty()) break;
        f = d(f);
        cert.trace.push_back(f);
    }
    cert.ok = true;
    return cert;
}

// ---------------------------------------------------------------------------
// Oscillation and convergence ranks

struct EpsRank {
    Rational eps;
    RankResult result;
};

struct BetaResult {
    Ordinal rank;
    std::vector<EpsRank> per_eps;
};

inline BetaResult beta_detail(const StepFunction& f, std::optional<std::size_t> cap = std::nullopt)
{
    BetaResult out{f.domain().is_empty() ? Ordinal(0) : Ordinal(1), {}};
    for (const auto& eps : value_gaps(f)) {
        RankResult r = iterate_rank(osc_derivative(f, eps), f.domain(), cap);
        out.rank = max_ord(out.rank, require_rank(r, "oscillation derivative"));
        out.per_eps.push_back(EpsRank{eps, std::move(r)});
    }
    return out;
}

inline Ordinal beta_rank(const StepFunction& f, std::optional<std::size_t> cap = std::nullopt) { return beta_detail(f, cap).rank; }

inline Ordinal beta_rank(const StepFunction& f, const Rational& eps, std::optional<std::size_t> cap = std::nullopt)
{
    return require_rank(iterate_rank(osc_derivative(f, eps), f.domain(), cap), "oscillation derivative");
}

inline RankResult beta0_rank(const StepFunction& f, const Rational& eps, std::optional<std::size_t> cap = std::nullopt)
{
    return iterate_rank(osc0_derivative(f, eps), f.domain(), cap);
}

/// Least positive difference between values some f_k or the limit can take.
inline Rational template_resolution(const SeqTemplate& t)
{
    auto g = value_gaps(t.achievable_values());
    return g.empty() ? Rational(0) : g.front();
}

/// Throws with a witness when the template's limit differs from f on f's
/// domain, or when a probe point fails to converge.
inline void check_template_limit(const SeqTemplate& t, const StepFunction& f, Digit probe_bound = 5)
{
    const StepFunction lim = t.limit();
    for (const auto& p : f.pieces())
        for (const auto& q : lim.pieces())
            if (p.value != q.value) {
                if (RepSet bad = p.set & q.set; !bad.is_empty())
                    throw ValidationError("template limit " + rational_str(q.value) + " differs from f = " + rational_str(p.value), min_element(bad));
            }
    if (auto y = pointwise_convergence_failure(t, ProbeSet(t.space(), probe_bound)))
        throw ValidationError("template does not settle at its declared stage", y);
}

struct GammaBounds {
    Ordinal lower;
    std::optional<Ordinal> upper;
    Rational eps = 0;
    std::optional<RankResult> trace;
};

/// Lower bound beta(f); upper bound from the template's convergence rank at
/// its finest resolution.
inline GammaBounds gamma_bounds(const StepFunction& f, const std::optional<SeqTemplate>& t, std::optional<std::size_t> cap = std::nullopt,
                                Digit probe_bound = 5)
{
    GammaBounds g{beta_rank(f, cap), std::nullopt, 0, std::nullopt};
    if (!t) return g;
    check_template_limit(*t, f, probe_bound);
    g.eps = template_resolution(*t);
    if (g.eps == 0) {
        g.upper = f.domain().is_empty() ? Ordinal(0) : Ordinal(1);
        return g;
    }
    RankResult r = iterate_rank(conv_derivative(*t, g.eps), f.domain(), cap);
    g.upper = require_rank(r, "convergence derivative");
    g.trace = std::move(r);
    return g;
}

/// f_k = sum over even i of [U_k(F_i)] - [U_k(F_{i+1})] with collars U_k,
/// converging to the characteristic function of the transfinite difference.
inline SeqTemplate canonical_gamma_template(const ClosedChain& c, const Rational& scale = 1, const std::string& tag = "F")
{
    std::vector<TemplateComponent> comps;
    for (std::size_t i = 0; i < c.size(); i += 2) {
        const RepSet fi = c.at(i), fn = c.at(i + 1);
        if (fi == fn) continue;
        const std::string a = tag + std::to_string(i), b = tag + std::to_string(i + 1);
        if (!fi.is_empty()) comps.push_back(TemplateComponent{scale, MonotoneFamily::collar(fi, a), std::nullopt, "collar " + a});
        if (!fn.is_empty()) comps.push_back(TemplateComponent{-scale, MonotoneFamily::collar(fn, b), std::nullopt, "collar " + b});
    }
    return SeqTemplate(c.space(), std::move(comps));
}

/// Sum of canonical templates of the pieces of f.
inline SeqTemplate canonical_function_template(const StepFunction& f, std::optional<std::size_t> cap = std::nullopt)
{
    std::vector<TemplateComponent> comps;
    for (std::size_t i = 0; i < f.pieces().size(); ++i) {
        const auto& p = f.pieces()[i];
        if (p.value == 0) continue;
        ClosedChain c = chain_from_derivative(p.set, f.domain() - p.set, f.domain(), cap);
        SeqTemplate t = canonical_gamma_template(c, p.value, "P" + std::to_string(i) + "F");
        for (const auto& comp : t.components()) comps.push_back(comp);
    }
    return SeqTemplate(f.space(), std::move(comps));
}

/// D^e(X) <= F_e along the convergence derivative of the template.
inline ChainCertificate template_trace_in_chain(const SeqTemplate& t, const ClosedChain& c, std::optional<std::size_t> cap = std::nullopt)
{
    ChainCertificate cert;
    cert.length = c.size();
    const Rational eps = template_resolution(t);
    if (eps == 0) {
        cert.trace = {c.domain(), RepSet(c.space())};
        cert.ok = true;
        return cert;
    }
    RankResult r = iterate_rank(conv_derivative(t, eps), c.domain(), cap);
    cert.trace = r.trace;
    for (std::size_t e = 0; e < r.trace.size(); ++e)
        if (!r.trace[e].subset_of(c.at(e))) {
            cert.failing_stage = e;
            return cert;
        }
    cert.ok = r.terminated();
    return cert;
}

// ---------------------------------------------------------------------------
// Approximation and partitions

struct GridApproximation {
    StepFunction g;
    Rational eps;
    std::vector<Rational> levels;
    std::vector<ClosedChain> chains;
    std::vector<RepSet> separators;
    std::vector<ChainCertificate> certificates;
    Rational max_error;
    bool within_eps = false;
    std::size_t max_chain_length = 0;
};

inline Natural floor_div(const Rational& a, const Rational& b)
{
    const Rational q = a / b;
    return numerator(q) / denominator(q);
}

/// g = lo + eps * floor((f - lo) / eps), with each level set of g rebuilt
/// as the transfinite difference of a derivative chain.
inline GridApproximation grid_step_approximation(const StepFunction& f, const Rational& eps, std::optional<std::size_t> cap = std::nullopt)
{
    require_positive(eps);
    const RepSet& dom = f.domain();
    const auto vals = f.values();
    std::vector<Rational> levels;
    std::vector<RepSet> seps;
    std::vector<ClosedChain> chains;
    std::vector<ChainCertificate> certs;
    if (!vals.empty()) {
        const Rational lo = vals.front();
        const Natural top = floor_div(vals.back() - lo, eps);
        for (Natural m = 0; m <= top; ++m) levels.push_back(lo + eps * Rational(m));
        for (std::size_t m = 0; m + 1 < levels.size(); ++m) {
            RepSet a = f.level_set(Relation::less, levels[m + 1]);
            RepSet b = f.level_set(Relation::greater_equal, levels[m + 1]);
            ClosedChain c = chain_from_derivative(a, b, dom, cap);
            certs.push_back(derivative_bound_from_chain(a, b, c));
            seps.push_back(transfinite_difference(c));
            chains.push_back(std::move(c));
        }
        seps.push_back(dom);
    }
    std::vector<Piece> pieces;
    RepSet below(dom.space());
    for (std::size_t m = 0; m < seps.size(); ++m) {
        RepSet piece = seps[m] - below;
        if (!piece.is_empty()) pieces.push_back(Piece{levels[m], piece});
        below = below | seps[m];
    }
    GridApproximation out{StepFunction(dom, std::move(pieces)), eps, levels, std::move(chains), std::move(seps), std::move(certs), 0};
    for (const auto& p : f.pieces())
        for (const auto& q : out.g.pieces())
            if (!(p.set & q.set).is_empty()) out.max_error = std::max(out.max_error, Rational(abs(p.value - q.value)));
    out.within_eps = out.max_error <= eps;
    for (const auto& c : out.chains) out.max_chain_length = std::max(out.max_chain_length, c.size());
    return out;
}

struct PieceCertificate {
    RepSet piece;
    ClosedChain chain;
    ChainCertificate certificate;
    Ordinal alpha;
};

struct Rank4Partition {
    std::vector<PieceCertificate> pieces;
    bool all_within_4 = true;
};

/// The chain of iterated oscillation derivatives at eps.
inline ClosedChain oscillation_chain(const StepFunction& f, const Rational& eps, std::optional<std::size_t> cap = std::nullopt)
{
    RankResult r = iterate_rank(osc_derivative(f, eps), f.domain(), cap);
    require_rank(r, "oscillation derivative");
    r.trace.pop_back();
    if (r.trace.empty()) r.trace.push_back(f.domain());
    return ClosedChain(f.domain(), std::move(r.trace));
}

/// Refines the rings of C by the pieces of f; each refined piece H gets the
/// chain (X, X, cl(F_i & A), cl(F_i & A) & F_{i+1}).
inline Rank4Partition partition_rank4(const StepFunction& f, const ClosedChain& c, std::optional<std::size_t> cap = std::nullopt)
{
    const RepSet& dom = c.domain();
    if (!(f.domain() == dom)) throw ValidationError("function and chain live on different domains", min_element(sym_diff(f.domain(), dom)));
    Rank4Partition out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const RepSet ring = c.at(i) - c.at(i + 1);
        for (const auto& p : f.pieces()) {
            RepSet h = ring & p.set;
            if (h.is_empty()) continue;
            RepSet g = closure(c.at(i) & p.set);
            RepSet g2 = g & c.at(i + 1);
            if (!((g - g2) == h))
                throw ValidationError("ring " + std::to_string(i) + " is not locally constant for f", min_element(sym_diff(g - g2, h)));
            ClosedChain chain(dom, {dom, dom, g, g2});
            ChainCertificate cert = derivative_bound_from_chain(h, dom - h, chain);
            Ordinal a = alpha_rank(characteristic_on(dom, h), cap);
            out.all_within_4 = out.all_within_4 && cert.ok && a <= Ordinal(4);
            out.pieces.push_back(PieceCertificate{h, std::move(chain), std::move(cert), a});
        }
    }
    return out;
}

inline Rank4Partition partition_rank4(const StepFunction& f, std::optional<std::size_t> cap = std::nullopt)
{
    return partition_rank4(f, oscillation_chain(f, min_gap(f), cap), cap);
}

struct DeltaFinReport {
    GridApproximation approx;
    Ordinal alpha;
    Ordinal beta_fine;
    std::vector<Ordinal> piece_ranks;
    bool forward_ok = true;
    std::vector<std::size_t> separator_lengths;
    bool backward_ok = true;
    std::string detail;
};

/// Forward: grid pieces at the finest gap, separator chains <= 2 alpha(f),
/// piece ranks <= beta(f, gap). Backward: unions of pieces meeting {f <= p}
/// separate the level sets with certified chains, and alpha(f) is bounded by
/// their lengths.
inline DeltaFinReport delta_fin_roundtrip(const StepFunction& f, std::optional<std::size_t> cap = std::nullopt)
{
    const Rational gap = min_gap(f);
    DeltaFinReport r{grid_step_approximation(f, gap, cap), alpha_rank(f, cap), beta_rank(f, gap, cap), {}, true, {}, true, {}};
    const RepSet& dom = f.domain();
    if (!r.approx.within_eps) {
        r.forward_ok = false;
        r.detail = "grid error exceeds eps";
    }
    for (std::size_t m = 0; m < r.approx.chains.size(); ++m) {
        if (!r.approx.certificates[m].ok || Ordinal(r.approx.chains[m].size()) > Ordinal(2) * r.alpha) {
            r.forward_ok = false;
            r.detail = "separator chain " + std::to_string(m) + " exceeds 2 alpha";
        }
    }
    for (const auto& p : r.approx.g.pieces()) {
        Ordinal a = alpha_rank(characteristic_on(dom, p.set), cap);
        r.piece_ranks.push_back(a);
        if (a > r.beta_fine) {
            r.forward_ok = false;
            r.detail = "piece rank exceeds beta at the finest gap";
        }
    }
    const auto vals = f.values();
    Ordinal bound = dom.is_empty() ? Ordinal(0) : Ordinal(1);
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        RepSet low = f.level_set(Relation::less_equal, vals[i]);
        RepSet high = f.level_set(Relation::greater_equal, vals[i + 1]);
        RepSet h(dom.space());
        for (const auto& p : r.approx.g.pieces())
            if (!(p.set & low).is_empty()) h = h | p.set;
        try {
            ClosedChain c = chain_from_derivative(h, dom - h, dom, cap);
            ChainCertificate cert = derivative_bound_from_chain(low, high, c);
            r.separator_lengths.push_back(c.size());
            bound = max_ord(bound, Ordinal(c.size()));
            if (!cert.ok) {
                r.backward_ok = false;
                r.detail = "separator certificate failed at stage " + std::to_string(*cert.failing_stage);
            }
        } catch (const ValidationError& e) {
            r.backward_ok = false;
            r.detail = std::string("reconstructed separator: ") + e.what();
        }
    }
    if (r.alpha > bound) {
        r.backward_ok = false;
        r.detail = "alpha exceeds the reconstructed chain lengths";
    }
    return r;
}

// ---------------------------------------------------------------------------
// Structural bounds

struct UscReport {
    bool usc = false;
    std::optional<Ordinal> alpha;
    bool bound_holds = true;
    bool trace_ok = true;
};

inline UscReport usc_alpha_bound(const StepFunction& f, std::optional<std::size_t> cap = std::nullopt)
{
    UscReport r;
    r.usc = f.is_usc();
    if (!r.usc) return r;
    AlphaResult a = alpha_detail(f, cap);
    r.alpha = a.rank;
    r.bound_holds = a.rank <= Ordinal(2);
    for (const auto& pr : a.pairs) {
        const RepSet b = f.level_set(Relation::greater_equal, pr.q);
        if (pr.result.trace.size() > 3 || (pr.result.trace.size() > 1 && !pr.result.trace[1].subset_of(b))) r.trace_ok = false;
    }
    return r;
}

struct RestrictionReport {
    Ordinal full;
    Ordinal restricted;
    bool holds = false;
    bool chains_certified = true;
};

inline RestrictionReport restriction_monotonicity(const StepFunction& f, const RepSet& y, std::optional<std::size_t> cap = std::nullopt)
{
    if (y.is_empty()) throw ValidationError("subspace is empty");
    if (!is_closed(y)) throw ValidationError("subspace is not closed", min_element(closure(y) - y));
    if (!y.subset_of(f.domain())) throw ValidationError("subspace leaves the domain", min_element(y - f.domain()));
    RestrictionReport r{alpha_rank(f, cap), alpha_rank(f.restricted(y), cap)};
    r.holds = r.restricted <= r.full;
    const auto vals = f.values();
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        RepSet a = f.level_set(Relation::less_equal, vals[i]);
        RepSet b = f.level_set(Relation::greater_equal, vals[i + 1]);
        ClosedChain c = chain_from_derivative(a, b, f.domain(), cap).restricted(y);
        if (!derivative_bound_from_chain(a & y, b & y, c).ok) r.chains_certified = false;
    }
    return r;
}

struct SzepResult {
    RepSet h;
    RepSet y;
    ClosedChain chain;
    ChainCertificate certificate;
    bool substituted = false;
    bool separates = false;
};

/// Separates {f <= p} from {f >= q} by a transfinite difference built inside
/// Y = cl({f <= p} u {f >= q}) and lifted to the whole domain.
inline SzepResult szep_separator(const StepFunction& f, const Rational& p, const Rational& q, std::optional<std::size_t> cap = std::nullopt)
{
    if (!(p < q)) throw std::invalid_argument("separator needs p < q, got " + rational_str(p) + " and " + rational_str(q));
    const RepSet& dom = f.domain();
    const RepSet a = f.level_set(Relation::less_equal, p), b = f.level_set(Relation::greater_equal, q);
    const RepSet y = closure(a | b);
    const bool substituted = !(y == (a | b));
    std::vector<RepSet> lifted;
    if (a.is_empty()) {
        lifted = {dom, dom};
    } else {
        StepFunction f2(y, {Piece{0, a}, Piece{1, b}, Piece{Rational(1, 2), y - a - b}});
        ClosedChain inner = chain_from_derivative(f2.level_set(Relation::less_equal, 0), f2.level_set(Relation::greater_equal, 1), y, cap);
        if (!(y == dom)) lifted = {dom, dom};
        for (const auto& s : inner.sets()) lifted.push_back(closure(s));
    }
    ClosedChain chain(dom, std::move(lifted));
    RepSet h = transfinite_difference(chain);
    ChainCertificate cert = derivative_bound_from_chain(a, b, chain);
    const bool sep = a.subset_of(h) && (h & b).is_empty();
    return SzepResult{std::move(h), y, std::move(chain), std::move(cert), substituted, sep};
}

// ---------------------------------------------------------------------------
// Rank axioms

struct RankHandle {
    std::string name;
    std::function<Ordinal(const StepFunction&)> rank;
};

inline RankHandle alpha_handle(std::optional<std::size_t> cap = std::nullopt)
{
    return {"alpha", [cap](const StepFunction& f) { return alpha_rank(f, cap); }};
}

inline RankHandle beta_handle(std::optional<std::size_t> cap = std::nullopt)
{
    return {"beta", [cap](const StepFunction& f) { return beta_rank(f, cap); }};
}

inline RankHandle constant_handle(Ordinal c)
{
    return {"constant-" + c.str(), [c](const StepFunction&) { return c; }};
}

struct AxiomInstance {
    StepFunction f;
    StepFunction g;  // same space as f, for additivity
    RepSet a;        // for the characteristic-function property
    RepSet y;        // closed, nonempty
    RepSet perturb;  // for the uniform-limit property
};

inline std::vector<AxiomInstance> axiom_corpus(std::uint64_t seed, std::size_t n, std::size_t k_max = 4)
{
    CorpusGenerator gen(seed);
    std::vector<AxiomInstance> out;
    while (out.size() < n) {
        Space s = gen.space(1, k_max);
        RepSet y = gen.closed_set(s);
        if (y.is_empty()) y = RepSet::full(s);
        out.push_back(AxiomInstance{gen.step_function(s), gen.step_function(s), gen.set(s), y, gen.set(s)});
    }
    return out;
}

struct AxiomOutcome {
    int property;
    std::size_t instance;
    bool pass;
    std::string witness;
};

struct AxiomSuiteReport {
    std::string handle;
    std::vector<AxiomOutcome> outcomes;
    std::array<std::size_t, 5> passed{}, failed{};

    bool property_pass(int p) const { return failed[static_cast<std::size_t>(p - 1)] == 0; }
    bool all_pass() const
    {
        for (auto f : failed)
            if (f) return false;
        return true;
    }
    std::optional<AxiomOutcome> first_failure(int p) const
    {
        for (const auto& o : outcomes)
            if (o.property == p && !o.pass) return o;
        return std::nullopt;
    }
};

/// Finite forms: (1) rho(chi_A) <= chain length <= 2 rho(chi_A);
/// (2) rho(c f) = rho(f) for c = -1, 2 and rho(f + g) <= 2 max(rho f, rho g);
/// (3) rho(f) <= rho(f + d chi_G) for d = gap/3; (4) rho(h o f) = rho(f) for
/// increasing h and <= for a clamp; (5) rho(f|Y) <= rho(f).
inline AxiomSuiteReport rank_axiom_suite(const RankHandle& rho, const std::vector<AxiomInstance>& corpus, std::optional<std::size_t> cap = std::nullopt)
{
    AxiomSuiteReport rep{rho.name, {}, {}, {}};
    auto record = [&](int p, std::size_t i, bool ok, std::string w) {
        rep.outcomes.push_back(AxiomOutcome{p, i, ok, ok ? std::string() : std::move(w)});
        (ok ? rep.passed : rep.failed)[static_cast<std::size_t>(p - 1)]++;
    };
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& in = corpus[i];
        const Space s = in.f.space();
        const RepSet x = RepSet::full(s);
        const Ordinal rf = rho.rank(in.f);

        {
            ClosedChain c = chain_from_derivative(in.a, x - in.a, x, cap);
            const Ordinal r = rho.rank(StepFunction::characteristic(in.a));
            const Ordinal len(c.size());
            record(1, i, r <= len && len <= Ordinal(2) * r,
                   "A=" + in.a.str() + " rank " + r.str() + " chain length " + len.str());
        }
        {
            const Ordinal rn = rho.rank(scale_add(in.f, in.f, -1, 0));
            const Ordinal r2 = rho.rank(scale_add(in.f, in.f, 2, 0));
            const Ordinal rg = rho.rank(in.g);
            const Ordinal rs = rho.rank(scale_add(in.f, in.g, 1, 1));
            const bool ok = rn == rf && r2 == rf && rs <= Ordinal(2) * max_ord(rf, rg);
            record(2, i, ok, "f=" + in.f.str() + " g=" + in.g.str() + " ranks f " + rf.str() + " -f " + rn.str() + " 2f " + r2.str() + " g " + rg.str() + " f+g " + rs.str());
        }
        {
            const Rational d = min_gap(in.f) / 3;
            const StepFunction fn = scale_add(in.f, StepFunction::characteristic(in.perturb), 1, d);
            const Ordinal rn = rho.rank(fn);
            record(3, i, rf <= rn, "f=" + in.f.str() + " rank " + rf.str() + " perturbed rank " + rn.str());
        }
        {
            ValueMap inc{{}, true, false}, clamp{{}, false, false};
            const auto vals = in.f.values();
            const Rational mid = vals[vals.size() / 2];
            for (const auto& v : vals) {
                inc.table[v] = 2 * v + v * v * v + 1;
                clamp.table[v] = v < mid ? v : mid;
            }
            const Ordinal ri = rho.rank(remap(in.f, inc)), rc = rho.rank(remap(in.f, clamp));
            record(4, i, ri == rf && rc <= rf, "f=" + in.f.str() + " rank " + rf.str() + " increasing " + ri.str() + " clamp " + rc.str());
        }
        {
            const Ordinal ry = rho.rank(in.f.restricted(in.y));
            record(5, i, ry <= rf, "f=" + in.f.str() + " Y=" + in.y.str() + " rank " + rf.str() + " restricted " + ry.str());
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------

struct RankReport {
    Ordinal alpha;
    Ordinal alpha1_upper;
    Ordinal beta;
    Ordinal gamma_lower;
    std::optional<Ordinal> gamma_upper;
    std::vector<std::pair<std::string, std::string>> witnesses;
    std::vector<std::string> banners;
};

inline const char* vacuity_banner()
{
    return "finite-scale vacuity: all positive finite ordinals are ~-equivalent, so ~/<~ statements are checked through exact inequalities";
}

inline const char* gamma_banner() { return "gamma is reported as bounds (lower from beta, upper from a template); exact only when they meet"; }

inline std::string trace_str(const std::vector<RepSet>& trace)
{
    std::string s;
    for (std::size_t i = 0; i < trace.size(); ++i) s += (i ? " > " : "") + trace[i].str();
    return s;
}

/// All ranks of f; gamma's upper bound comes from t, or from the canonical
/// template when none is given.
inline RankReport rank_report(const StepFunction& f, const std::optional<SeqTemplate>& t = std::nullopt, std::optional<std::size_t> cap = std::nullopt,
                              Digit probe_bound = 5)
{
    RankReport r;
    AlphaResult a = alpha_detail(f, cap);
    r.alpha = a.rank;
    r.alpha1_upper = f.domain().is_empty() ? Ordinal(0) : Ordinal(1);
    for (const auto& pr : a.pairs) {
        ClosedChain c = chain_from_derivative(f.level_set(Relation::less_equal, pr.p), f.level_set(Relation::greater_equal, pr.q), f.domain(), cap);
        r.alpha1_upper = max_ord(r.alpha1_upper, Ordinal(c.size()));
        r.witnesses.emplace_back("alpha_trace[" + rational_str(pr.p) + "," + rational_str(pr.q) + "]", trace_str(pr.result.trace));
        r.witnesses.emplace_back("chain[" + rational_str(pr.p) + "," + rational_str(pr.q) + "]", c.str());
    }
    BetaResult b = beta_detail(f, cap);
    r.beta = b.rank;
    for (const auto& e : b.per_eps) r.witnesses.emplace_back("beta_trace[" + rational_str(e.eps) + "]", trace_str(e.result.trace));
    const SeqTemplate tt = t ? *t : canonical_function_template(f, cap);
    GammaBounds g = gamma_bounds(f, tt, cap, probe_bound);
    r.gamma_lower = g.lower;
    r.gamma_upper = g.upper;
    r.witnesses.emplace_back("gamma_template", (t ? "supplied " : "canonical ") + tt.str());
    if (g.trace) r.witnesses.emplace_back("gamma_trace[" + rational_str(g.eps) + "]", trace_str(g.trace->trace));
    r.banners = {vacuity_banner(), gamma_banner()};
    return r;
}

}  // namespace kl
