#include "kl/oracle.hpp"
#include "kl/ordinal.hpp"

#include <gtest/gtest.h>

#include <random>

using kl::Ordinal;

namespace {

Ordinal O(const char* s) { return Ordinal::parse(s); }
const Ordinal w = Ordinal::omega();

Ordinal random_ordinal(std::mt19937_64& rng, int depth = 0)
{
    std::uniform_int_distribution<int> nterms(0, 3), coef(1, 4), fin(0, 3);
    int n = nterms(rng);
    std::vector<Ordinal> exps;
    for (int i = 0; i < n; ++i) {
        Ordinal e = depth < 1 && fin(rng) == 0 ? random_ordinal(rng, depth + 1) : Ordinal(fin(rng));
        exps.push_back(e);
    }
    std::sort(exps.begin(), exps.end(), [](const Ordinal& a, const Ordinal& b) { return a > b; });
    exps.erase(std::unique(exps.begin(), exps.end()), exps.end());
    std::vector<Ordinal::Term> terms;
    for (auto& e : exps) terms.push_back(Ordinal::Term{e, kl::Natural(coef(rng))});
    return Ordinal::from_terms(std::move(terms));
}

}  // namespace

TEST(Ordinal, CompareExamples)
{
    EXPECT_EQ(kl::cmp(0, 0), std::strong_ordering::equal);
    EXPECT_EQ(kl::cmp(w, w + 1), std::strong_ordering::less);
    EXPECT_EQ(kl::cmp(w * 2, w + 5), std::strong_ordering::greater);
}

TEST(Ordinal, AddExamples)
{
    EXPECT_EQ(Ordinal(1) + w, w);
    EXPECT_EQ((w + 1).str(), "w + 1");
    EXPECT_EQ(((w + 1) + (w + 1)).str(), "w*2 + 1");
}

TEST(Ordinal, MulExamples)
{
    EXPECT_EQ(Ordinal(2) * w, w);
    EXPECT_EQ((w * 2).str(), "w*2");
    EXPECT_EQ(((w + 1) * w).str(), "w^2");
    EXPECT_EQ((O("w^2 + w*3 + 2") * O("w + 2")).str(), "w^3 + w^2*2 + w*3 + 2");
}

TEST(Ordinal, OmegaPow)
{
    EXPECT_EQ(kl::omega_pow(0), Ordinal(1));
    EXPECT_EQ(kl::omega_pow(1), w);
    EXPECT_EQ(kl::omega_pow(w).str(), "w^w");
    EXPECT_EQ(kl::omega_pow(w + 1).str(), "w^(w + 1)");
}

TEST(Ordinal, ParsePrintRoundTrip)
{
    for (const char* s : {"0", "7", "w", "w^2*3 + w + 4", "w^w*2 + w^3", "w^(w + 1) + 1", "w^(w^w)"}) {
        EXPECT_EQ(O(s).str(), s);
        EXPECT_EQ(O(O(s).str().c_str()), O(s));
    }
    EXPECT_EQ(O("w*1 + 0").str(), "w");
    EXPECT_EQ(O("w^w^w"), O("w^(w^w)"));
    EXPECT_EQ(O("(w+1)*2").str(), "w*2 + 1");
}

TEST(Ordinal, ParseErrorsCarryColumn)
{
    try {
        O("w + + 1");
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("column 5"), std::string::npos) << e.what();
    }
    EXPECT_THROW(O("w^"), std::invalid_argument);
    EXPECT_THROW(O("3 x"), std::invalid_argument);
}

TEST(Ordinal, FromTermsValidates)
{
    EXPECT_THROW(Ordinal::from_terms({{Ordinal(1), 1}, {Ordinal(2), 1}}), std::invalid_argument);
    EXPECT_THROW(Ordinal::from_terms({{Ordinal(1), 0}}), std::invalid_argument);
}

TEST(Ordinal, Lesssim)
{
    EXPECT_TRUE(kl::lesssim(w, w + 1));
    EXPECT_EQ(kl::envelope(w), Ordinal(1));
    EXPECT_EQ(kl::envelope(w + 1), Ordinal(2));
    // 2w = w as a left product; w*2 lies above w^1.
    EXPECT_TRUE(kl::lesssim(Ordinal(2) * w, w));
    EXPECT_TRUE(kl::lesssim(w, w * 2));
    EXPECT_FALSE(kl::lesssim(w * 2, w));
    EXPECT_FALSE(kl::lesssim(kl::omega_pow(2), w));
    EXPECT_TRUE(kl::approx(Ordinal(2) * w, w));
    EXPECT_TRUE(kl::approx(w * 2, w + 1));
    EXPECT_FALSE(kl::approx(w, kl::omega_pow(2)));
    EXPECT_TRUE(kl::lesssim(0, 0));
    EXPECT_TRUE(kl::lesssim(w, 0));
    EXPECT_FALSE(kl::lesssim(w + 1, 0));
}

TEST(Ordinal, FinitesAreEquivalent)
{
    for (unsigned n = 1; n < 20; ++n)
        for (unsigned m = 1; m < 20; ++m) EXPECT_TRUE(kl::approx(n, m));
}

// The envelope reduction against the quantified definition, eta <= lead + 2.
TEST(Ordinal, EnvelopeMatchesQuantifiedDefinition)
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        Ordinal a = random_ordinal(rng), b = random_ordinal(rng);
        std::vector<Ordinal> etas;
        for (unsigned e = 1; e < 6; ++e) etas.push_back(e);
        for (const auto& x : {a, b}) {
            Ordinal l = x.leading_exponent();
            etas.push_back(l);
            etas.push_back(l + 1);
            etas.push_back(l + 2);
        }
        bool quantified = true;
        for (const auto& eta : etas) {
            if (eta < 1) continue;
            if (b <= kl::omega_pow(eta) && !(a <= kl::omega_pow(eta))) quantified = false;
        }
        EXPECT_EQ(quantified, kl::lesssim(a, b)) << a << " vs " << b;
    }
}

TEST(Ordinal, AlgebraicLaws)
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        Ordinal a = random_ordinal(rng), b = random_ordinal(rng), c = random_ordinal(rng);
        EXPECT_EQ((a + b) + c, a + (b + c));
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * (b + c), a * b + a * c);
        if (b < c) {
            EXPECT_LT(a + b, a + c);
            if (a > 0) {
                EXPECT_LT(a * b, a * c);
            }
            EXPECT_LE(b + a, c + a);
            EXPECT_LE(b * a, c * a);
        }
    }
    EXPECT_NE(Ordinal(1) + w, w + 1);
    EXPECT_NE((Ordinal(1) + 1) * w, w + w);
    EXPECT_NE(Ordinal(2) * w, w * 2);
}

TEST(Ordinal, TotalOrder)
{
    std::mt19937_64 rng(3);
    std::vector<Ordinal> v;
    for (int i = 0; i < 60; ++i) v.push_back(random_ordinal(rng));
    for (auto& a : v)
        for (auto& b : v) {
            EXPECT_EQ(kl::cmp(a, b) == 0, a.terms().size() == b.terms().size() && a.str() == b.str());
            EXPECT_EQ(kl::cmp(a, b) < 0, kl::cmp(b, a) > 0);
            for (auto& c : v)
                if (a < b && b < c) {
                    EXPECT_LT(a, c);
                }
        }
}

TEST(Ordinal, EnumerationOracleBelowOmegaCubed)
{
    kl::SmallOrdinalOracle oracle;
    using T = kl::SmallOrdinalOracle::Triple;
    std::vector<T> all;
    for (unsigned a2 = 0; a2 <= 4; ++a2)
        for (unsigned a1 = 0; a1 <= 4; ++a1)
            for (unsigned a0 = 0; a0 <= 4; ++a0) all.push_back(kl::SmallOrdinalOracle::make(a2, a1, a0));
    const Ordinal cube = kl::omega_pow(3);
    std::size_t compared = 0;
    for (const auto& x : all)
        for (const auto& y : all) {
            Ordinal a = kl::SmallOrdinalOracle::to_ordinal(x), b = kl::SmallOrdinalOracle::to_ordinal(y);
            EXPECT_EQ(kl::SmallOrdinalOracle::compare(x, y), kl::cmp(a, b));
            T s = oracle.add(x, y);
            ASSERT_FALSE(s.overflow);
            EXPECT_EQ(kl::SmallOrdinalOracle::to_ordinal(s), a + b) << a << " + " << b;
            T p = oracle.mul(x, y);
            if (p.overflow) {
                EXPECT_GE(a * b, cube) << a << " * " << b;
            } else {
                EXPECT_EQ(kl::SmallOrdinalOracle::to_ordinal(p), a * b) << a << " * " << b;
                ++compared;
            }
        }
    EXPECT_GT(compared, 1500u);
    EXPECT_EQ(kl::SmallOrdinalOracle::to_ordinal(oracle.mul(kl::SmallOrdinalOracle::make(0, 2, 0), kl::SmallOrdinalOracle::make(0, 1, 0))),
              kl::omega_pow(2));
}
