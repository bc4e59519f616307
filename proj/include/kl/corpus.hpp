#pragma once

#include "kl/functions.hpp"
#include "kl/ordinal.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <vector>

namespace kl {

/// Least-nonzero-index parity on [0, w^K]: A holds the points whose least
/// nonzero digit sits at an even position (w^K counts as position K), B the
/// rest together with 0.
struct ParitySets {
    RepSet a;
    RepSet b;
};

inline ParitySets parity_sets(const Space& space)
{
    const std::size_t k = space.dims();
    RepSet a(space);
    for (std::size_t j = 0; j < k; j += 2) {
        Box box = Box::any(k);
        for (std::size_t p = 0; p < j; ++p) box.digits[p] = DigitConstraint::finite({0});
        box.digits[j] = DigitConstraint::at_least(1);
        a = a | RepSet::from_box(space, box);
    }
    if (k % 2 == 0) a = a | RepSet::singleton(space, Point::top(k));
    return ParitySets{a, a.complement()};
}

inline StepFunction parity_function(const Space& space) { return StepFunction::characteristic(parity_sets(space).a); }

/// Seeded generator of random sets, chains and step functions with digit
/// constants <= max_constant.
class CorpusGenerator {
public:
    explicit CorpusGenerator(std::uint64_t seed = 0, Digit max_constant = 4) : rng_(seed), max_constant_(max_constant) {}

    std::mt19937_64& rng() { return rng_; }

    std::size_t uniform(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    Space space(std::size_t k_min = 1, std::size_t k_max = 5) { return Space(uniform(k_min, k_max)); }

    DigitConstraint constraint()
    {
        switch (uniform(0, 4)) {
        case 0:
        case 1: return DigitConstraint::any();
        case 2: {
            std::vector<Digit> v;
            for (std::size_t n = uniform(1, 2); n-- > 0;) v.push_back(uniform(0, max_constant_));
            return DigitConstraint::finite(std::move(v));
        }
        case 3: return DigitConstraint::at_least(uniform(0, max_constant_));
        default: {
            std::vector<Digit> v;
            for (std::size_t n = uniform(1, 2); n-- > 0;) v.push_back(uniform(0, max_constant_));
            return DigitConstraint::cofinite(std::move(v));
        }
        }
    }

    Box box(const Space& s)
    {
        Box b = Box::any(s.dims());
        for (auto& d : b.digits) d = constraint();
        b.includes_top = coin(0.2);
        return b;
    }

    RepSet set(const Space& s)
    {
        RepSet r(s);
        for (std::size_t n = uniform(1, 3); n-- > 0;) r = r | RepSet::from_box(s, box(s));
        return r;
    }

    RepSet closed_set(const Space& s) { return closure(set(s)); }

    /// Decreasing closed sets starting with the whole space; length in [1, max_len].
    ClosedChain chain(const Space& s, std::size_t max_len = 6)
    {
        std::vector<RepSet> sets{RepSet::full(s)};
        const std::size_t len = uniform(1, max_len);
        while (sets.size() < len) {
            RepSet next = sets.back() & closed_set(s);
            if (coin(0.3)) next = sets.back() & closure(RepSet::limits(s) & set(s));
            sets.push_back(next);
        }
        return ClosedChain(std::move(sets));
    }

    Rational value()
    {
        static const int table[][2] = {{0, 1}, {1, 2}, {1, 1}, {3, 2}, {2, 1}, {3, 1}, {-1, 1}, {5, 4}};
        const auto& e = table[uniform(0, 7)];
        return Rational(e[0], e[1]);
    }

    std::vector<Rational> distinct_values(std::size_t n)
    {
        std::vector<Rational> vals;
        while (vals.size() < n) {
            Rational v = value();
            if (std::find(vals.begin(), vals.end(), v) == vals.end()) vals.push_back(v);
        }
        return vals;
    }

    /// Step function on a partition cut out by random sets, or on the rings
    /// of a random chain.
    StepFunction step_function(const Space& s)
    {
        std::vector<RepSet> parts;
        if (coin()) {
            ClosedChain c = chain(s, 5);
            for (std::size_t i = 0; i < c.size(); ++i) parts.push_back(c.at(i) - c.at(i + 1));
        } else {
            RepSet rest = RepSet::full(s);
            for (std::size_t n = uniform(0, 3); n-- > 0;) {
                RepSet p = rest & set(s);
                parts.push_back(p);
                rest = rest - p;
            }
            parts.push_back(rest);
        }
        std::erase_if(parts, [](const RepSet& p) { return p.is_empty(); });
        auto vals = distinct_values(parts.size());
        std::vector<Piece> pieces;
        for (std::size_t i = 0; i < parts.size(); ++i) pieces.push_back(Piece{vals[i], parts[i]});
        return StepFunction(s, std::move(pieces));
    }

    /// Locally constant: values on the clopen intervals [0, p1], (p1, p2], ...,
    /// (pn, w^K].
    StepFunction continuous_function(const Space& s)
    {
        std::vector<Point> cuts;
        for (std::size_t n = uniform(0, 3); n-- > 0;) {
            std::vector<Digit> d(s.dims());
            for (auto& x : d) x = uniform(0, max_constant_);
            cuts.push_back(Point::from_digits(std::move(d)));
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        std::vector<RepSet> parts;
        RepSet below(s);
        for (const auto& c : cuts) {
            RepSet upto = RepSet::at_most(s, c);
            parts.push_back(upto - below);
            below = upto;
        }
        parts.push_back(RepSet::full(s) - below);
        auto vals = distinct_values(parts.size());
        std::vector<Piece> pieces;
        for (std::size_t i = 0; i < parts.size(); ++i) pieces.push_back(Piece{vals[i], parts[i]});
        return StepFunction(s, std::move(pieces));
    }

    /// Upper semicontinuous: a nonnegative combination of characteristic
    /// functions of closed sets.
    StepFunction usc_function(const Space& s)
    {
        std::vector<std::pair<RepSet, Rational>> terms;
        for (std::size_t n = uniform(1, 3); n-- > 0;) terms.emplace_back(closed_set(s), Rational(static_cast<long>(uniform(1, 3)), 2));
        std::vector<Piece> pieces;
        const std::size_t m = terms.size();
        for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
            RepSet cell = RepSet::full(s);
            Rational v = 0;
            for (std::size_t i = 0; i < m; ++i) {
                if (mask >> i & 1) {
                    cell = cell & terms[i].first;
                    v += terms[i].second;
                } else {
                    cell = cell - terms[i].first;
                }
            }
            if (!cell.is_empty()) pieces.push_back(Piece{v, cell});
        }
        return StepFunction(s, std::move(pieces));
    }

    Ordinal ordinal(int depth = 0)
    {
        std::vector<Ordinal> exps;
        for (std::size_t n = uniform(0, 3); n-- > 0;)
            exps.push_back(depth < 1 && uniform(0, 3) == 0 ? ordinal(depth + 1) : Ordinal(uniform(0, 3)));
        std::sort(exps.begin(), exps.end(), [](const Ordinal& a, const Ordinal& b) { return a > b; });
        exps.erase(std::unique(exps.begin(), exps.end()), exps.end());
        std::vector<Ordinal::Term> terms;
        for (auto& e : exps) terms.push_back(Ordinal::Term{e, Natural(uniform(1, 4))});
        return Ordinal::from_terms(std::move(terms));
    }

    MonotoneFamily monotone_family(const Space& s)
    {
        std::vector<ThresholdTerm> terms;
        for (std::size_t n = uniform(1, 3); n-- > 0;) {
            ThresholdTerm t{set(s), std::nullopt, static_cast<std::int64_t>(uniform(0, 3)) - 1};
            if (coin(0.8)) t.digit = uniform(0, s.dims() - 1);
            terms.push_back(std::move(t));
        }
        return MonotoneFamily(set(s), std::move(terms), "random");
    }

    SeqTemplate seq_template(const Space& s, std::size_t max_components = 3)
    {
        std::vector<TemplateComponent> comps;
        auto vals = distinct_values(uniform(1, max_components));
        for (const auto& v : vals) comps.push_back(TemplateComponent{v, monotone_family(s), std::nullopt, "random"});
        return SeqTemplate(s, std::move(comps));
    }

private:
    std::mt19937_64 rng_;
    Digit max_constant_;
};

}  // namespace kl
