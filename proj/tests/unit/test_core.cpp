#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "rumor/core/errors.hpp"
#include "rumor/core/labels.hpp"
#include "rumor/core/prob_vector.hpp"
#include "rumor/core/random.hpp"

using namespace rumor;

TEST(SelfEntropy, Oracles) {
    EXPECT_DOUBLE_EQ(self_entropy({0.5, 0.5}), 1.0);
    EXPECT_DOUBLE_EQ(self_entropy({1.0, 0.0}), 0.0);
    EXPECT_DOUBLE_EQ(self_entropy({0.0, 1.0}), 0.0);
    EXPECT_NEAR(self_entropy({0.9, 0.1}), 0.46900, 1e-4);
    EXPECT_NEAR(self_entropy({0.7, 0.3}), 0.881291, 1e-6);
}

TEST(SelfEntropy, SymmetricAndPeakedAtHalf) {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const double a = unit_draw(rng);
        EXPECT_NEAR(self_entropy({a, 1.0 - a}), self_entropy({1.0 - a, a}), 1e-15);
    }
    double prev = 1.0;
    for (int i = 1; i <= 500; ++i) {
        const double a = 0.5 + i * 0.001;
        const double h = self_entropy({a, 1.0 - a});
        EXPECT_LT(h, prev) << a;
        prev = h;
    }
}

TEST(Decide, Examples) {
    EXPECT_EQ(decide({0.8, 0.2}, kTrueFalse, 1e-3), Veracity::True);
    EXPECT_EQ(decide({0.3, 0.7}, kTrueFalse, 1e-3), Veracity::False);
    EXPECT_EQ(decide({0.7, 0.3}, kTrueFalse, 1e-3), Veracity::True);
    EXPECT_EQ(decide({0.5, 0.5}, kTrueFalse, 1e-3), Veracity::Unverified);
    EXPECT_EQ(decide({0.5, 0.5}, kTrueFalse, 0.0), Veracity::Unverified);
    // H(0.5005) = 1 - ~7.2e-7
    const double h = self_entropy({0.5005, 0.4995});
    EXPECT_GE(h, 1.0 - 1e-3);
    EXPECT_NEAR(1.0 - h, 7.2e-7, 1e-8);
    EXPECT_EQ(decide({0.5005, 0.4995}, kTrueFalse, 1e-3), Veracity::Unverified);
    EXPECT_EQ(decide({0.5005, 0.4995}, kTrueFalse, 0.0), Veracity::True);
}

TEST(Decide, InvariantUnderJointSwap) {
    Rng rng(3);
    const std::pair<Veracity, Veracity> swapped{Veracity::False, Veracity::True};
    for (int i = 0; i < 2000; ++i) {
        const double a = unit_draw(rng);
        const double eps = unit_draw(rng) * 0.1;
        EXPECT_EQ(decide({a, 1.0 - a}, kTrueFalse, eps), decide({1.0 - a, a}, swapped, eps));
    }
}

TEST(Decide, NegativeEpsilonRejected) { EXPECT_THROW(decide({0.6, 0.4}, kTrueFalse, -1.0), std::invalid_argument); }

TEST(ProbVector, ValidatesSumAndRange) {
    EXPECT_THROW((BinaryProbs{0.6, 0.6}), std::invalid_argument);
    EXPECT_THROW((BinaryProbs{1.2, -0.2}), std::invalid_argument);
    EXPECT_THROW((TernaryProbs{0.5, 0.5}), std::invalid_argument);
    EXPECT_NO_THROW((BinaryProbs{0.5 + 1e-10, 0.5}));
    const std::vector<double> two{0.1, 0.9};
    EXPECT_EQ(BinaryProbs::from(two).argmax(), 1u);
    EXPECT_THROW(TernaryProbs::from(two), std::invalid_argument);
    EXPECT_THROW(BinaryProbs::normalized({0.0, 0.0}), std::invalid_argument);
}

TEST(ProbVector, NormalizedAndOneHot) {
    const auto p = BinaryProbs::normalized({0.8, 0.6});
    EXPECT_NEAR(p[0], 0.8 / 1.4, 1e-15);
    EXPECT_TRUE(TernaryProbs::one_hot(2).is_one_hot());
    EXPECT_FALSE(TernaryProbs{}.is_one_hot());
    EXPECT_NEAR(TernaryProbs{}[1], 1.0 / 3.0, 1e-15);
}

TEST(SmoothLabels, Formula) {
    const auto s = smooth_labels(TernaryProbs::one_hot(0), 0.3);
    EXPECT_NEAR(s[0], 0.8, 1e-15);
    EXPECT_NEAR(s[1], 0.1, 1e-15);
    EXPECT_NEAR(s[2], 0.1, 1e-15);
    EXPECT_THROW(smooth_labels(TernaryProbs::one_hot(0), 1.0), std::invalid_argument);
    const std::vector<double> hard{0.0, 1.0};
    const auto d = smooth_labels(hard, 0.2);
    EXPECT_NEAR(d[0], 0.1, 1e-15);
    EXPECT_NEAR(d[1], 0.9, 1e-15);
}

TEST(SmoothLabels, PreservesArgmaxBelowLimit) {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        std::array<double, 3> mass{unit_draw(rng) + 1e-3, unit_draw(rng) + 1e-3, unit_draw(rng) + 1e-3};
        const auto p = TernaryProbs::normalized(mass);
        const double rate = unit_draw(rng) * (2.0 / 3.0) * 0.999;
        EXPECT_EQ(smooth_labels(p, rate).argmax(), p.argmax());
    }
}

TEST(Labels, RoundTrip) {
    for (Veracity v : kVeracities) EXPECT_EQ(parse_veracity(to_string(v)), v);
    EXPECT_EQ(parse_stance("agree"), Stance::Agreement);
    EXPECT_EQ(parse_stance("disagreement"), Stance::Disagreement);
    EXPECT_EQ(parse_certainty("uncertain"), Certainty::Uncertain);
    EXPECT_FALSE(parse_veracity("maybe"));
    EXPECT_THROW(require_label<Veracity>("maybe", parse_veracity, "veracity"), CorpusFormatError);
}

TEST(Errors, KindsMapToExitCategories) {
    EXPECT_EQ(UsageError("x").kind(), ErrorKind::Usage);
    EXPECT_EQ(MalformedStructure("x").kind(), ErrorKind::Data);
    EXPECT_EQ(EmptyMatrix("x").kind(), ErrorKind::Data);
    EXPECT_EQ(UntrainedBackend("x").kind(), ErrorKind::Model);
    EXPECT_EQ(ModelFormatError("x").kind(), ErrorKind::Model);
}

TEST(Random, Deterministic) {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(uniform_index(a, 17), uniform_index(b, 17));
    // mt19937_64 is fully specified; the 10000th output is fixed by the standard.
    Rng c;
    c.discard(9999);
    EXPECT_EQ(c(), 9981545732273789042ull);
}

TEST(Random, SampleWithoutReplacement) {
    Rng rng(9);
    std::vector<int> pool(30);
    std::iota(pool.begin(), pool.end(), 0);
    const auto s = sample_without_replacement(pool, 21, rng);
    EXPECT_EQ(s.size(), 21u);
    EXPECT_EQ(std::set<int>(s.begin(), s.end()).size(), 21u);
    EXPECT_TRUE(sample_without_replacement(pool, 0, rng).empty());
    EXPECT_EQ(sample_without_replacement(pool, 50, rng).size(), 30u);
}
