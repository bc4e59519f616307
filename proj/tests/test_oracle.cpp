#include "kl/constructions.hpp"
#include "kl/corpus.hpp"
#include "kl/verify.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace kl;

namespace {

Point P(std::vector<Digit> d) { return Point::from_digits(std::move(d)); }

IntervalFamily successor_family()
{
    IntervalFamily fam;
    fam.lo = {AffineTerm{0, 0, 0}, AffineTerm{0, 1, 0}};
    fam.hi = {AffineTerm{1, 0, 0}, AffineTerm{0, 1, 0}};
    fam.count = AffineTerm{0, 0, 1};
    return fam;
}

}  // namespace

TEST(Oracle, ProbeSetEnumeratesBoundedDigits)
{
    ProbeSet probes(Space(2), 3);
    EXPECT_EQ(probes.size(), 17u);
    std::set<std::string> seen;
    for (const auto& p : probes.points()) seen.insert(p.str());
    EXPECT_EQ(seen.size(), 17u);
    EXPECT_TRUE(probes.points().back().is_top());
    EXPECT_TRUE(seen.count("w*3 + 3"));
}

TEST(Oracle, FundamentalSequences)
{
    EXPECT_EQ(fundamental(P({0, 1}), 4), P({4, 0}));
    EXPECT_EQ(fundamental(P({0, 3}), 2), P({2, 2}));
    EXPECT_EQ(fundamental(Point::top(2), 5), P({0, 5}));
    EXPECT_THROW(fundamental(P({1, 1}), 2), std::invalid_argument);
}

TEST(Oracle, ProbeAgreesWithPlainOracles)
{
    CorpusGenerator gen(31);
    for (int i = 0; i < 20; ++i) {
        Space s = gen.space(1, 3);
        StepFunction f = gen.step_function(s);
        RepSet F = gen.closed_set(s);
        OscillationProbe probe(f, F);
        const ProbeSet probes(s, 4);
        for (const auto& eps : value_gaps(f))
            for (const auto& x : probes.points()) {
                ASSERT_EQ(probe.oscillation(x, eps), oscillation_oracle(f, x, F, eps)) << f.str() << " at " << x.str();
                ASSERT_EQ(probe.oscillation0(x, eps), oscillation0_oracle(f, x, F, eps)) << f.str() << " at " << x.str();
            }
    }
}

TEST(Oracle, TraceCheckersFlagCorruptedStages)
{
    Space s(2);
    RepSet a = RepSet::successors(s), b = a.complement();
    RankResult r = iterate_rank(sep_derivative(a, b), s);
    ProbeSet probes(s, 5);
    TraceCheck good = verify_sep_trace(a, b, r.trace, probes);
    EXPECT_TRUE(good.ok());
    EXPECT_GT(good.checked, 0u);

    auto bad = r.trace;
    bad[1] = bad[1] - RepSet::singleton(s, P({0, 1}));
    TraceCheck c = verify_sep_trace(a, b, bad, probes);
    EXPECT_FALSE(c.ok());
    ASSERT_TRUE(c.first_mismatch);
    EXPECT_NE(c.first_mismatch->find("stage 1 at w "), std::string::npos) << *c.first_mismatch;

    StepFunction f = StepFunction::characteristic(a);
    RankResult o = iterate_rank(osc_derivative(f, 1), s);
    EXPECT_TRUE(verify_osc_trace(f, 1, o.trace, probes).ok());
    RankResult o0 = iterate_rank(osc0_derivative(f, 1), s);
    EXPECT_TRUE(verify_osc0_trace(f, 1, o0.trace, probes).ok());
}

TEST(Oracle, ConvergenceTraceOfSuccessorTemplate)
{
    Space s(2);
    IntervalFamily fam = successor_family();
    SeqTemplate t(s, {TemplateComponent{1, fam.to_monotone(s, "succ"), fam, "succ"}});
    EXPECT_FALSE(verify_certificate(t, ProbeSet(s, 5)));
    EXPECT_FALSE(pointwise_convergence_failure(t, ProbeSet(s, 5)));
    RankResult r = iterate_rank(conv_derivative(t, 1), s);
    EXPECT_EQ(r.rank_str(), "2");
    TraceCheck c = verify_conv_trace(t, 1, r.trace, ProbeSet(s, 5));
    EXPECT_TRUE(c.ok()) << c.first_mismatch.value_or("");
    EXPECT_GT(c.checked, 0u);
    const RepSet X = RepSet::full(s);
    EXPECT_TRUE(seq_oscillation_oracle(t, Point::top(2), X, 1).value);
    EXPECT_FALSE(seq_oscillation_oracle(t, P({0, 1}), X, 1).value);
    EXPECT_FALSE(seq_oscillation_oracle(t, P({1, 3}), X, 1).value);
    EXPECT_EQ(seq_oscillation_oracle(t, Point::top(2), X, 1).confidence, Confidence::certified);
    EXPECT_EQ(seq_oscillation_oracle(t, Point::top(2), X, 1, std::nullopt, false).confidence, Confidence::bounded_only);
}

TEST(Oracle, CertificateCatchesMislabelledFamily)
{
    Space s(2);
    SeqTemplate t(s, {TemplateComponent{1, MonotoneFamily::stationary(RepSet(s)), successor_family(), "succ"}});
    auto msg = verify_certificate(t, ProbeSet(s, 3));
    ASSERT_TRUE(msg);
    EXPECT_NE(msg->find("disagrees with its monotone form"), std::string::npos) << *msg;
}

TEST(Oracle, ClosureCheckOnCorpus)
{
    CorpusGenerator gen(5);
    for (int i = 0; i < 50; ++i) {
        Space s = gen.space(1, 3);
        TraceCheck c = verify_closure(gen.set(s), ProbeSet(s, 5));
        ASSERT_TRUE(c.ok()) << *c.first_mismatch;
    }
}
