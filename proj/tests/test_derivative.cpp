#include "kl/corpus.hpp"
#include "kl/derivative.hpp"
#include "kl/oracle.hpp"

#include <gtest/gtest.h>

using namespace kl;

namespace {

SeqTemplate successor_template()
{
    Space s(2);
    IntervalFamily fam;
    fam.lo = {AffineTerm{0, 0, 0}, AffineTerm{0, 1, 0}};
    fam.hi = {AffineTerm{0, 0, 1}, AffineTerm{0, 1, 0}};
    fam.count = AffineTerm{0, 0, 1};
    return SeqTemplate(s, {TemplateComponent{1, fam.to_monotone(s, "succ"), fam, "succ"}});
}

}  // namespace

TEST(Derivative, SeparationOnSuccessors)
{
    Space s(2);
    RepSet a = RepSet::successors(s);
    auto d = sep_derivative(a, a.complement());
    RankResult r = iterate_rank(d, s);
    ASSERT_TRUE(r.rank);
    EXPECT_EQ(*r.rank, Ordinal(2));
    EXPECT_EQ(r.trace[1], RepSet::limits(s));
}

TEST(Derivative, OscillationOnSuccessors)
{
    Space s(2);
    StepFunction f = StepFunction::characteristic(RepSet::successors(s));
    RankResult r = iterate_rank(osc_derivative(f, 1), s);
    EXPECT_EQ(r.rank_str(), "2");
    EXPECT_EQ(iterate_rank(osc_derivative(f, 2), s).rank_str(), "1");
    EXPECT_THROW(osc_derivative(f, 0), std::invalid_argument);
}

TEST(Derivative, ConvergenceOnSuccessors)
{
    Space s(2);
    SeqTemplate t = successor_template();
    RankResult r = iterate_rank(conv_derivative(t, 1), s);
    ASSERT_EQ(r.trace.size(), 3u);
    EXPECT_EQ(r.trace[1], RepSet::limits(s));
    EXPECT_TRUE(r.trace[2].is_empty());
    EXPECT_EQ(*r.rank, Ordinal(2));
}

TEST(Derivative, StallAndCap)
{
    Space s(2);
    Derivative id(DerivativeKind::custom, "id", [](const RepSet& f) { return f; });
    RankResult r = iterate_rank(id, s);
    EXPECT_TRUE(r.stalled);
    EXPECT_FALSE(r.rank);
    Derivative drop(DerivativeKind::custom, "drop-min", [](const RepSet& f) {
        auto m = min_element(f);
        return m ? f - RepSet::singleton(f.space(), *m) : f;
    });
    RankResult c = iterate_rank(drop, s, 4);
    EXPECT_TRUE(c.capped);
    EXPECT_EQ(c.trace.size(), 5u);
    Derivative bad(DerivativeKind::custom, "grow", [](const RepSet& f) { return RepSet::full(f.space()); });
    EXPECT_THROW(bad(RepSet(s)), DerivativeError);
}

TEST(Derivative, OscillationMatchesOracle)
{
    CorpusGenerator gen(11);
    for (int i = 0; i < 60; ++i) {
        Space s = gen.space(1, 3);
        StepFunction f = gen.step_function(s);
        RepSet F = gen.closed_set(s);
        Rational eps = gen.coin() ? Rational(1, 2) : Rational(1);
        RepSet d = osc_derivative(f, eps)(F);
        RepSet d0 = osc0_derivative(f, eps)(F);
        EXPECT_TRUE(is_closed(d));
        EXPECT_TRUE(d0.subset_of(d));
        EXPECT_TRUE(osc_derivative(f, eps)(F).subset_of(osc0_derivative(f, eps / 2)(F)));
        ProbeSet probes(s, 5);
        for (const auto& p : probes.points()) {
            ASSERT_EQ(d.contains(p), oscillation_oracle(f, p, F, eps)) << f.str() << " F=" << F.str() << " at " << p.str();
            ASSERT_EQ(d0.contains(p), oscillation0_oracle(f, p, F, eps)) << f.str() << " F=" << F.str() << " at " << p.str();
        }
    }
}

TEST(Derivative, ConvergenceMatchesOracle)
{
    CorpusGenerator gen(12, 3);
    std::size_t checked = 0;
    for (int i = 0; i < 40; ++i) {
        Space s = gen.space(1, 3);
        SeqTemplate t = gen.seq_template(s, 3);
        RepSet F = gen.coin() ? RepSet::full(s) : gen.closed_set(s);
        Rational eps = gen.coin() ? Rational(1, 2) : Rational(1);
        RepSet d = conv_derivative(t, eps)(F);
        EXPECT_TRUE(is_closed(d)) << t.str();
        ProbeSet probes(s, 4);
        for (const auto& p : probes.points()) {
            if (!F.contains(p) || (!p.is_limit() && !p.is_top())) continue;
            OracleVerdict v = seq_oscillation_oracle(t, p, F, eps);
            ASSERT_EQ(d.contains(p), v.value) << t.str() << "\nF=" << F.str() << " eps=" << rational_str(eps) << " at " << p.str();
            ++checked;
        }
    }
    EXPECT_GT(checked, 100u);
}

TEST(Derivative, SandwichAndComparison)
{
    CorpusGenerator gen(13);
    for (int i = 0; i < 30; ++i) {
        Space s = gen.space(1, 4);
        StepFunction f = gen.step_function(s);
        std::vector<RepSet> samples;
        for (int n = 0; n < 5; ++n) samples.push_back(gen.closed_set(s));
        auto c = compare_derivatives(osc0_derivative(f, 1), osc_derivative(f, 1), samples, RepSet::full(s));
        EXPECT_TRUE(c.contained);
        EXPECT_TRUE(c.ranks_ordered) << c.first.rank_str() << " vs " << c.second.rank_str();
        auto c2 = compare_derivatives(osc_derivative(f, 1), osc0_derivative(f, Rational(1, 2)), samples, RepSet::full(s));
        EXPECT_TRUE(c2.contained);
        EXPECT_TRUE(c2.ranks_ordered);
    }
}

TEST(Derivative, UglyLemmaOnSums)
{
    CorpusGenerator gen(14);
    for (int i = 0; i < 20; ++i) {
        Space s = gen.space(1, 3);
        StepFunction f = gen.step_function(s), g = gen.step_function(s);
        StepFunction h = pointwise(f, g, [](const Rational& a, const Rational& b) { return a + b; });
        std::vector<RepSet> samples{RepSet::full(s)};
        for (int n = 0; n < 4; ++n) samples.push_back(gen.closed_set(s));
        auto r = check_ugly_lemma(osc0_derivative(h, 1), {osc0_derivative(f, Rational(1, 2)), osc0_derivative(g, Rational(1, 2))}, samples);
        EXPECT_TRUE(r.condition1) << r.detail;
        EXPECT_TRUE(r.holds()) << r.detail;
    }
}

TEST(Derivative, ParityRank)
{
    for (std::size_t k = 1; k <= 4; ++k) {
        Space s(k);
        auto ps = parity_sets(s);
        RankResult r = iterate_rank(sep_derivative(ps.a, ps.b), s);
        ASSERT_TRUE(r.rank);
        EXPECT_EQ(*r.rank, Ordinal(k + 1)) << "K=" << k;
    }
}
