#include "svcnch/dataset.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace svcnch;

namespace {

TEST(Parse, BasicTwoSamples) {
    const TrainingSet set = parse_libsvm("+1 1:0.5 3:2.0\n-1 2:1.0");
    ASSERT_EQ(set.size(), 2);
    EXPECT_EQ(set.dim, 3);
    EXPECT_EQ(set.pos_idx, std::vector<int>({0}));
    EXPECT_EQ(set.neg_idx, std::vector<int>({1}));
    EXPECT_DOUBLE_EQ(set.samples[0].feature(1), 0.5);
    EXPECT_DOUBLE_EQ(set.samples[0].feature(2), 0.0);  // absent index reads as zero
    EXPECT_DOUBLE_EQ(set.samples[0].feature(3), 2.0);
    EXPECT_DOUBLE_EQ(set.samples[1].feature(2), 1.0);
}

TEST(Parse, EmptyInputThrows) {
    EXPECT_THROW(parse_libsvm(""), EmptyInputError);
    EXPECT_THROW(parse_libsvm("   \n# only a comment\n"), EmptyInputError);
}

TEST(Parse, SingleClassThrows) {
    EXPECT_THROW(parse_libsvm("+1 1:1\n+1 1:2\n"), SingleClassError);
}

TEST(Parse, MalformedLineReportsLineNumber) {
    try {
        parse_libsvm("+1 1:0.5\n-1 2:oops\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line, 2);
    }
    EXPECT_THROW(parse_libsvm("+1 3:1 2:1\n-1 1:1\n"), ParseError);  // non-ascending index
    EXPECT_THROW(parse_libsvm("+1 0:1\n-1 1:1\n"), ParseError);      // index must be positive
    EXPECT_THROW(parse_libsvm("abc 1:1\n-1 1:1\n"), ParseError);
}

TEST(Parse, CommentsCrlfAndLabelMappings) {
    const TrainingSet a = parse_libsvm("# header\r\n1 1:1.0 # trailing\r\n0 1:2.0\r\n");
    ASSERT_EQ(a.size(), 2);
    EXPECT_EQ(a.samples[0].label, +1);  // larger raw label maps to +1
    EXPECT_EQ(a.samples[1].label, -1);

    const TrainingSet b = parse_libsvm("1 1:1.0\n2 1:2.0\n");
    EXPECT_EQ(b.samples[0].label, -1);
    EXPECT_EQ(b.samples[1].label, +1);

    EXPECT_THROW(parse_libsvm("1 1:1\n2 1:1\n3 1:1\n"), Error);  // three distinct labels
}

TEST(Parse, RoundTripOnFuzzedDatasets) {
    std::mt19937_64 gen(20240817);
    std::uniform_int_distribution<int> n_dist(2, 30);
    std::uniform_int_distribution<int> dim_dist(1, 12);
    std::uniform_real_distribution<double> val_dist(-50.0, 50.0);
    std::bernoulli_distribution keep(0.6);

    for (int rep = 0; rep < 10; ++rep) {
        TrainingSet orig;
        const int n = n_dist(gen);
        const int dim = dim_dist(gen);
        for (int i = 0; i < n; ++i) {
            Sample s;
            s.label = i % 2 == 0 ? +1 : -1;
            for (int j = 1; j <= dim; ++j) {
                if (keep(gen)) s.features.emplace_back(j, val_dist(gen));
            }
            orig.samples.push_back(std::move(s));
        }
        // make dim well-defined: force the max index to appear somewhere
        orig.samples[0].features.emplace_back(dim + 1, val_dist(gen));
        orig.dim = dim + 1;
        orig.rebuild_index();

        std::ostringstream ss;
        write_libsvm(orig, ss);
        const TrainingSet back = parse_libsvm(ss.str());
        EXPECT_EQ(back, orig) << "round-trip mismatch at rep " << rep;
    }
}

TEST(Standardize, TwoPointColumn) {
    const TrainingSet train = parse_libsvm("+1 1:1\n-1 1:3\n");
    const Standardized st = standardize(train, {});
    EXPECT_NEAR(st.train.samples[0].feature(1), -1.0, 1e-15);
    EXPECT_NEAR(st.train.samples[1].feature(1), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(st.stats.mean[0], 2.0);
    EXPECT_DOUBLE_EQ(st.stats.scale[0], 1.0);  // population standard deviation
}

TEST(Standardize, ConstantColumnGetsUnitScale) {
    const TrainingSet train = parse_libsvm("+1 1:5 2:1\n-1 1:5 2:2\n+1 1:5 2:3\n");
    const Standardized st = standardize(train, {});
    EXPECT_DOUBLE_EQ(st.stats.scale[0], 1.0);
    for (const Sample& s : st.train.samples) EXPECT_DOUBLE_EQ(s.feature(1), 0.0);
}

TEST(Standardize, RandomMatrixMomentsRecomputed) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> val(-10.0, 10.0);
    TrainingSet train;
    train.dim = 8;
    for (int i = 0; i < 50; ++i) {
        Sample s;
        s.label = i % 2 == 0 ? +1 : -1;
        for (int j = 1; j <= 8; ++j) s.features.emplace_back(j, val(gen));
        train.samples.push_back(std::move(s));
    }
    train.rebuild_index();
    const Standardized st = standardize(train, {});

    for (int j = 1; j <= 8; ++j) {
        double mean = 0.0;
        for (const Sample& s : st.train.samples) mean += s.feature(j);
        mean /= 50.0;
        double var = 0.0;
        for (const Sample& s : st.train.samples) var += (s.feature(j) - mean) * (s.feature(j) - mean);
        var /= 50.0;
        EXPECT_LE(std::fabs(mean), 1e-10);
        EXPECT_NEAR(var, 1.0, 1e-8);
    }
}

TEST(Standardize, StatsComeFromTrainOnly) {
    const TrainingSet train = parse_libsvm("+1 1:0\n-1 1:2\n");
    const TrainingSet test = parse_libsvm("+1 1:100\n-1 1:200\n");
    const Standardized st = standardize(train, test);
    EXPECT_DOUBLE_EQ(st.stats.mean[0], 1.0);
    EXPECT_DOUBLE_EQ(st.test.samples[0].feature(1), 99.0);  // (100 - 1) / 1
}

TEST(Standardize, Idempotent) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> val(-5.0, 5.0);
    TrainingSet train;
    train.dim = 4;
    for (int i = 0; i < 20; ++i) {
        Sample s;
        s.label = i % 2 == 0 ? +1 : -1;
        for (int j = 1; j <= 4; ++j) s.features.emplace_back(j, val(gen));
        train.samples.push_back(std::move(s));
    }
    train.rebuild_index();
    const Standardized once = standardize(train, {});
    const Standardized twice = standardize(once.train, {});
    for (int i = 0; i < 20; ++i) {
        for (int j = 1; j <= 4; ++j) {
            EXPECT_LE(std::fabs(twice.train.samples[i].feature(j) - once.train.samples[i].feature(j)), 1e-10);
        }
    }
}

TrainingSet alternating(int l) {
    TrainingSet set;
    set.dim = 1;
    for (int i = 0; i < l; ++i) {
        Sample s;
        s.label = i % 2 == 0 ? +1 : -1;
        s.features.emplace_back(1, static_cast<double>(i));
        set.samples.push_back(std::move(s));
    }
    set.rebuild_index();
    return set;
}

TEST(Split, EightyTwentyDeterministic) {
    const TrainingSet data = alternating(10);
    const auto [tr1, te1] = split(data, {.train_fraction = 0.8, .seed = 7});
    const auto [tr2, te2] = split(data, {.train_fraction = 0.8, .seed = 7});
    EXPECT_EQ(tr1.size(), 8);
    EXPECT_EQ(te1.size(), 2);
    EXPECT_EQ(tr1, tr2);
    EXPECT_EQ(te1, te2);

    const auto [tr3, te3] = split(data, {.train_fraction = 0.8, .seed = 8});
    EXPECT_NE(tr1, tr3);
}

TEST(Split, TinyBalancedSplitKeepsBothClasses) {
    const TrainingSet data = alternating(4);
    const auto [tr, te] = split(data, {.train_fraction = 0.5, .seed = 3});
    EXPECT_EQ(tr.size(), 2);
    EXPECT_EQ(tr.n_pos(), 1);
    EXPECT_EQ(tr.n_neg(), 1);
    EXPECT_EQ(te.n_pos(), 1);
    EXPECT_EQ(te.n_neg(), 1);
}

TEST(Split, ThirtySeedsGiveDistinctPermutationsAndCoverage) {
    const TrainingSet data = alternating(100);
    std::set<std::string> signatures;
    std::set<double> covered;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto [tr, te] = split(data, {.train_fraction = 0.8, .seed = seed});
        std::string sig;
        for (const Sample& s : tr.samples) sig += std::to_string(s.feature(1)) + ",";
        signatures.insert(sig);
        for (const Sample& s : te.samples) covered.insert(s.feature(1));
    }
    EXPECT_EQ(signatures.size(), 30u);
    EXPECT_GT(covered.size(), 50u);
}

TEST(Split, SubsetKeepsParentDim) {
    const TrainingSet data = parse_libsvm("+1 5:1\n-1 1:1\n+1 5:2\n-1 1:2\n");
    const auto [tr, te] = split(data, {.train_fraction = 0.5, .seed = 1});
    EXPECT_EQ(tr.dim, 5);
    EXPECT_EQ(te.dim, 5);
}

TEST(Split, ImpossibleFractionThrows) {
    const TrainingSet data = alternating(4);
    EXPECT_THROW(split(data, {.train_fraction = 0.05, .seed = 0}), SplitError);
}

}  // namespace
