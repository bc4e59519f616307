#include "kl/corpus.hpp"
#include "kl/oracle.hpp"
#include "kl/topology.hpp"

#include <gtest/gtest.h>

using namespace kl;

namespace {

Point P(std::vector<Digit> d) { return Point::from_digits(std::move(d)); }

RepSet box_set(const Space& s, std::vector<DigitConstraint> d, bool top = false) { return RepSet::from_box(s, Box{std::move(d), top}); }

// Pointwise equality on the probe set.
void expect_same_on_probes(const RepSet& a, const RepSet& b, const ProbeSet& probes)
{
    for (const auto& p : probes.points()) ASSERT_EQ(a.contains(p), b.contains(p)) << p.str() << " in " << a.str() << " vs " << b.str();
}

}  // namespace

TEST(Topology, MembershipExamples)
{
    Space s(2);
    RepSet succ = RepSet::successors(s);
    EXPECT_TRUE(RepSet::full(s).contains(Point::zero(2)));
    EXPECT_FALSE(succ.contains(P({0, 1})));
    EXPECT_TRUE(succ.contains(P({3, 1})));
    EXPECT_THROW(succ.contains(Point::zero(3)), SpaceMismatch);
    EXPECT_THROW(succ | RepSet::full(Space(3)), SpaceMismatch);
}

TEST(Topology, ComplementOfSuccessors)
{
    Space s(2);
    RepSet c = RepSet::successors(s).complement();
    EXPECT_EQ(c, box_set(s, {DigitConstraint::finite({0}), DigitConstraint::any()}, true));
    expect_same_on_probes(c, RepSet::limits(s) | RepSet::singleton(s, Point::zero(2)), ProbeSet(s, 6));
    EXPECT_TRUE((c & c.complement()).is_empty());
    EXPECT_TRUE((c | c.complement()).is_full());
}

TEST(Topology, ClosureExamples)
{
    Space s(2);
    RepSet interval = RepSet::interval(s, P({3, 1}), P({0, 4}));
    EXPECT_EQ(closure(interval), interval);
    EXPECT_EQ(closure(RepSet::successors(s)), RepSet::full(s) - RepSet::singleton(s, Point::zero(2)));
    EXPECT_TRUE(closure(RepSet(s)).is_empty());
    EXPECT_TRUE(is_closed(RepSet::full(s)));
    EXPECT_FALSE(is_closed(RepSet::successors(s)));
    EXPECT_TRUE(is_closed(RepSet::successors(s).complement()));
}

TEST(Topology, MinAboveExamples)
{
    Space s(2);
    EXPECT_EQ(min_above(RepSet::successors(s), P({0, 1})), P({1, 1}));
    EXPECT_FALSE(min_above(RepSet(s), Point::zero(2)).has_value());
    EXPECT_EQ(min_above(RepSet::limits(s), P({5, 3})), P({0, 4}));
    EXPECT_EQ(min_above(box_set(s, {DigitConstraint::any(), DigitConstraint::finite({1})}, true), P({0, 2})), Point::top(2));
}

TEST(Topology, MaxElement)
{
    Space s(2);
    EXPECT_EQ(max_element(RepSet::full(s)), Point::top(2));
    EXPECT_FALSE(max_element(RepSet::successors(s)).has_value());
    EXPECT_EQ(max_element(RepSet::at_most(s, P({4, 2}))), P({4, 2}));
}

TEST(Topology, RelativeClosure)
{
    Space s(3);
    RepSet y = closure(RepSet::limits(s));
    RepSet d1 = box_set(s, {DigitConstraint::any(), DigitConstraint::at_least(1), DigitConstraint::any()});
    RelativeSet rel = restrict(d1, y);
    RepSet expected = closure(d1 & y) & y;
    EXPECT_EQ(rel.closure(), expected);
    ProbeSet probes(s, 5);
    for (const auto& p : probes.points()) {
        if (!y.contains(p)) continue;
        EXPECT_EQ(rel.closure().contains(p), closure_oracle(d1 & y, p)) << p.str();
    }
    EXPECT_THROW(restrict(d1, RepSet::successors(s)), std::invalid_argument);
    EXPECT_EQ(restrict(d1, RepSet::full(s)).closure(), closure(d1));
}

TEST(Topology, Printing)
{
    Space s(2);
    EXPECT_EQ(RepSet(s).str(), "empty");
    EXPECT_EQ(RepSet::full(s).str(), "all");
    EXPECT_EQ(RepSet::successors(s).str(), "d0 >= 1");
    EXPECT_EQ(RepSet::singleton(s, Point::top(2)).str(), "top");
    RepSet c = RepSet::successors(s).complement();
    EXPECT_EQ(RepSet::from_boxes(s, c.boxes()), c);
}

TEST(Topology, ClosureOracleExamples)
{
    Space s(2);
    EXPECT_TRUE(closure_oracle(RepSet::successors(s), P({0, 1})));
    RepSet high = box_set(s, {DigitConstraint::any(), DigitConstraint::at_least(1)});
    // w itself belongs to {d1 >= 1}; no member lies below it.
    EXPECT_TRUE(closure_oracle(high, P({0, 1})));
    EXPECT_FALSE(closure_oracle(high - RepSet::singleton(s, P({0, 1})), P({0, 1})));
    EXPECT_TRUE(closure_oracle(RepSet::full(s), P({2, 0})));
}

TEST(Topology, FundamentalSequences)
{
    Space s(3);
    ProbeSet probes(s, 4);
    RepSet all = RepSet::full(s);
    for (const auto& p : probes.points()) {
        if (!is_limit_point(p)) continue;
        for (Digit n = 0; n < 8; ++n) {
            EXPECT_LT(fundamental(p, n), fundamental(p, n + 1));
            EXPECT_LT(fundamental(p, n), p);
            EXPECT_LE(*min_above(all, fundamental(p, n)), p);
        }
    }
}

TEST(Topology, MinAboveMatchesEnumeration)
{
    CorpusGenerator gen(5);
    for (int i = 0; i < 150; ++i) {
        Space s = gen.space(1, 3);
        RepSet a = gen.set(s);
        ProbeSet probes(s, 6);
        const auto& pts = probes.points();
        for (std::size_t b = 0; b < pts.size(); ++b) {
            auto m = min_above(a, pts[b]);
            if (!m) {
                for (std::size_t c = 0; c < pts.size(); ++c) {
                    if (pts[b] < pts[c]) {
                        ASSERT_FALSE(a.contains(pts[c])) << a.str() << " above " << pts[b].str();
                    }
                }
                continue;
            }
            ASSERT_TRUE(a.contains(*m));
            ASSERT_LT(pts[b], *m);
            for (std::size_t c = 0; c < pts.size(); ++c) {
                if (pts[b] < pts[c] && pts[c] < *m) {
                    ASSERT_FALSE(a.contains(pts[c])) << a.str() << " above " << pts[b].str();
                }
            }
        }
    }
}

TEST(Topology, KuratowskiAndBooleanLaws)
{
    CorpusGenerator gen(1);
    for (int i = 0; i < 200; ++i) {
        Space s = gen.space();
        RepSet a = gen.set(s), b = gen.set(s), c = gen.set(s);
        RepSet ca = closure(a);
        EXPECT_TRUE(a.subset_of(ca));
        EXPECT_EQ(closure(ca), ca);
        EXPECT_EQ(closure(a | b), ca | closure(b));
        EXPECT_TRUE(is_closed(ca & closure(b)));
        EXPECT_EQ(~(a | b), ~a & ~b);
        EXPECT_EQ(~(a & b), ~a | ~b);
        EXPECT_EQ(a & (b | c), (a & b) | (a & c));
        EXPECT_EQ(a | (b & c), (a | b) & (a | c));
        EXPECT_EQ(~~a, a);
        EXPECT_EQ(interior(a), ~closure(~a));
        EXPECT_TRUE(interior(a).subset_of(a));
        EXPECT_EQ(RepSet::from_boxes(s, a.boxes()), a);
        if (!ca.is_empty()) {
            auto m = max_element(ca);
            ASSERT_TRUE(m.has_value());
            EXPECT_TRUE(ca.contains(*m));
        }
    }
}

TEST(Topology, ClosureMatchesOracle)
{
    CorpusGenerator gen(2);
    for (int i = 0; i < 120; ++i) {
        Space s = gen.space(1, 4);
        RepSet a = gen.set(s);
        RepSet ca = closure(a);
        ProbeSet probes(s, 5);
        for (const auto& p : probes.points()) {
            const bool o = closure_oracle(a, p);
            ASSERT_EQ(ca.contains(p), o) << "set " << a.str() << " point " << p.str();
            ASSERT_EQ(o, closure_oracle(a, p, default_horizon(a) + 5));
        }
    }
}

TEST(Topology, ParityTrace)
{
    Space s(2);
    auto ps = parity_sets(s);
    EXPECT_TRUE(ps.a.contains(P({1, 0})));
    EXPECT_TRUE(ps.b.contains(P({0, 1})));
    EXPECT_TRUE(ps.b.contains(Point::zero(2)));
    EXPECT_TRUE(ps.a.contains(Point::top(2)));
}
