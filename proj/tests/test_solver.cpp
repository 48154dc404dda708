#include "svcnch/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/instances.hpp"
#include "support/oracle.hpp"

using namespace svcnch;
using testsupport::make_instance;
using testsupport::make_state;

namespace {

TEST(InitAlpha, UniformPerClass) {
    const TrainingSet data = parse_libsvm("+1 1:1\n+1 1:2\n-1 1:3\n-1 1:4\n-1 1:5\n");
    const AlphaState s = init_alpha(data);
    const std::vector<double> expect{0.5, 0.5, 1.0 / 3, 1.0 / 3, 1.0 / 3};
    ASSERT_EQ(s.alpha.size(), 5u);
    for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(s.alpha[i], expect[i]);
}

TEST(InitAlpha, SingletonClassStartsAtUpperBound) {
    const TrainingSet data = parse_libsvm("+1 1:1\n-1 1:3\n-1 1:4\n");
    const AlphaState s = init_alpha(data);
    EXPECT_DOUBLE_EQ(s.alpha[0], 1.0);
}

TEST(InitAlpha, ClassSumsExact) {
    // l * round(1/l) stays within one ulp of 1 for every small class size
    for (int l = 1; l <= 12; ++l) {
        TrainingSet data;
        data.dim = 1;
        for (int i = 0; i < l + 2; ++i) {
            Sample s;
            s.label = i < l ? +1 : -1;
            s.features.emplace_back(1, static_cast<double>(i));
            data.samples.push_back(std::move(s));
        }
        data.rebuild_index();
        const AlphaState s = init_alpha(data);
        double pos_sum = 0.0;
        for (int i : data.pos_idx) pos_sum += s.alpha[i];
        EXPECT_LE(std::fabs(pos_sum - 1.0), 4e-16 * l);
    }
}

TEST(Objective, HandExpandedTwoPointCase) {
    const TrainingSet data = parse_libsvm("+1 1:2\n-1 1:2\n");
    const auto pack = build_gram<double>(data, {.gamma = 0.9, .c_reg = 1.0});
    const std::vector<double> alpha{1.0, 1.0};
    EXPECT_DOUBLE_EQ(objective(alpha, pack), 1.0);
    EXPECT_DOUBLE_EQ(oracle::qp_objective_raw(alpha, data, 0.9, 1.0), 1.0);
}

TEST(Objective, EqualsHalfSquaredHullPointDistance) {
    // f(alpha) = 1/2 ||u - v||^2 where u, v are the class convex combinations
    // in the regularized kernel's feature space
    std::mt19937_64 gen(3);
    const auto inst = make_instance(3, 4, 3, 0.6, 2.5, 77);
    const std::vector<double> alpha = testsupport::random_feasible_alpha(inst.data, gen);

    auto kbar = [&](int i, int j) { return inst.pack.kernel(i, j) + (i == j ? 1.0 / 2.5 : 0.0); };
    double uu = 0.0, vv = 0.0, uv = 0.0;
    for (int i : inst.data.pos_idx) {
        for (int j : inst.data.pos_idx) uu += alpha[i] * alpha[j] * kbar(i, j);
        for (int j : inst.data.neg_idx) uv += alpha[i] * alpha[j] * kbar(i, j);
    }
    for (int i : inst.data.neg_idx) {
        for (int j : inst.data.neg_idx) vv += alpha[i] * alpha[j] * kbar(i, j);
    }
    const double half_dist2 = 0.5 * (uu + vv - 2.0 * uv);
    EXPECT_NEAR(objective(alpha, inst.pack), half_dist2, 1e-12);
}

TEST(Objective, DiagonalSeparability) {
    // doubling 1/C adds exactly 1/2 * (1/C) * sum alpha_i^2
    std::mt19937_64 gen(4);
    const auto inst = make_instance(3, 3, 2, 1.4, 2.0, 11);
    auto pack_half_c = build_gram<double>(inst.data, {.gamma = 1.4, .c_reg = 1.0});  // 1/C doubles
    const std::vector<double> alpha = testsupport::random_feasible_alpha(inst.data, gen);
    double sum_sq = 0.0;
    for (double a : alpha) sum_sq += a * a;
    EXPECT_NEAR(objective(alpha, pack_half_c) - objective(alpha, inst.pack), 0.5 * 0.5 * sum_sq, 1e-14);
}

TEST(Gradient, ZeroVectorMapsToZero) {
    const auto inst = make_instance(2, 2, 2, 1.0, 1.0, 1);
    const std::vector<double> zero(4, 0.0);
    for (double g : gradient(zero, inst.pack)) EXPECT_DOUBLE_EQ(g, 0.0);
}

TEST(Gradient, MatchesFiniteDifferenceOfObjective) {
    std::mt19937_64 gen(5);
    const auto inst = make_instance(2, 3, 2, 0.7, 1.5, 23);
    const std::vector<double> alpha = testsupport::random_feasible_alpha(inst.data, gen);
    const std::vector<double> g = gradient(alpha, inst.pack);
    const std::vector<double> fd = oracle::fd_gradient(
        [&](const std::vector<double>& a) { return oracle::qp_objective_raw(a, inst.data, 0.7, 1.5); }, alpha,
        1e-6);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(g[i], fd[i], 1e-6 * std::max(1.0, std::fabs(g[i])));
    }
}

TEST(Gradient, InitialStateEqualsWeightedRowMeans) {
    const auto inst = make_instance(3, 4, 3, 0.5, 2.0, 31);
    AlphaState s = init_alpha(inst.data);
    refresh(s, inst.pack);
    for (int i = 0; i < 7; ++i) {
        double expect = 0.0;
        for (int j : inst.data.pos_idx) expect += inst.pack.reg(i, j) / 3.0;
        for (int j : inst.data.neg_idx) expect += inst.pack.reg(i, j) / 4.0;
        EXPECT_NEAR(s.grad[i], expect, 1e-12);
    }
}

TEST(Gradient, EulerIdentity) {
    // alpha^T grad = 2 * objective for the quadratic form
    std::mt19937_64 gen(6);
    for (int rep = 0; rep < 20; ++rep) {
        const auto inst = make_instance(3, 3, 2, 0.9, 1.0, 200 + rep);
        const std::vector<double> alpha = testsupport::random_feasible_alpha(inst.data, gen, rep % 2, 0);
        const std::vector<double> g = gradient(alpha, inst.pack);
        double dot = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) dot += alpha[i] * g[i];
        const double obj = objective(alpha, inst.pack);
        EXPECT_NEAR(dot, 2.0 * obj, 1e-10 * std::max(1.0, std::fabs(obj)));
    }
}

TEST(KktReport, InitStateHasFullUpAndLowSets) {
    const auto inst = make_instance(2, 2, 2, 1.0, 1.0, 8);
    AlphaState s = init_alpha(inst.data);
    refresh(s, inst.pack);
    const KktReport r = kkt_report(s, inst.data, 1e-6);
    // all components interior: extrema live over the whole class and the
    // interior means exist
    ASSERT_TRUE(r.mu_plus.has_value());
    ASSERT_TRUE(r.mu_minus.has_value());
    EXPECT_GE(r.m_plus, r.M_plus);  // max over a set >= min over the same set
    EXPECT_GE(r.m_minus, r.M_minus);
}

TEST(KktReport, BoundComponentSetMembership) {
    // positive component at 1 (others 0): it sits in the low set only
    const TrainingSet data = parse_libsvm("+1 1:0\n+1 1:4\n-1 1:1\n-1 1:2\n");
    const auto pack = build_gram<double>(data, {.gamma = 0.8, .c_reg = 1.0});
    AlphaState s = make_state({1.0, 0.0, 0.5, 0.5}, pack);
    const KktReport r = kkt_report(s, data, 1e-6);
    EXPECT_EQ(r.arg_M_plus, 0);              // only alpha_0 > 0 in the positive class
    EXPECT_EQ(r.arg_m_plus, 1);              // only alpha_1 < 1
    EXPECT_FALSE(r.mu_plus.has_value());     // no interior positive component
    EXPECT_TRUE(r.mu_minus.has_value());
}

TEST(KktReport, SatisfiedAtOracleOptimum) {
    const auto inst = make_instance(2, 2, 2, 1.0, 1.0, 404);
    const auto grid = oracle::grid_qp(inst.data, inst.pack, 1e-3);
    AlphaState s = make_state(grid.alpha_hat, inst.pack);
    const KktReport r = kkt_report(s, inst.data, 1e-1);  // grid resolution limits precision
    EXPECT_TRUE(r.satisfied);
}

TEST(ViolatingPair, SingleClassViolationSelectsThatClass) {
    const TrainingSet data = parse_libsvm("+1 1:1\n+1 1:1\n-1 1:0\n-1 1:9\n");
    const auto pack = build_gram<double>(data, {.gamma = 0.5, .c_reg = 1.0});
    // positive class: identical points, so both gradients match and the class
    // cannot violate; any violation lives in the negative class
    AlphaState s = make_state({0.5, 0.5, 0.9, 0.1}, pack);
    const KktReport r = kkt_report(s, data, 1e-9);
    ASSERT_FALSE(r.satisfied);
    const ViolatingPair p = violating_pair(s, data);
    EXPECT_EQ(p.cls, -1);
    EXPECT_TRUE(p.i == 2 || p.i == 3);
    EXPECT_TRUE(p.j == 2 || p.j == 3);
}

TEST(ViolatingPair, TieGoesToPositiveClass) {
    // mirror-symmetric classes produce identical violations in both
    const TrainingSet data = parse_libsvm("+1 1:0\n+1 1:1\n-1 1:0\n-1 1:1\n");
    const auto pack = build_gram<double>(data, {.gamma = 0.3, .c_reg = 1.0});
    AlphaState s = make_state({0.7, 0.3, 0.7, 0.3}, pack);
    const KktReport r = kkt_report(s, data, 0.0);
    if (!r.satisfied) {
        EXPECT_DOUBLE_EQ(r.m_plus - r.M_plus, r.m_minus - r.M_minus);
        EXPECT_EQ(violating_pair(s, data).cls, +1);
    }
}

TEST(ViolatingPair, MatchesExhaustivePairScan) {
    std::mt19937_64 gen(12);
    for (int rep = 0; rep < 25; ++rep) {
        const auto inst = make_instance(4, 4, 2, 1.1, 1.0, 500 + rep);
        AlphaState s = make_state(testsupport::random_feasible_alpha(inst.data, gen, rep % 3, rep % 2), inst.pack);
        const KktReport r = kkt_report(s, inst.data, 1e-12);
        if (r.satisfied) continue;
        const ViolatingPair p = violating_pair(s, inst.data);

        double best = -std::numeric_limits<double>::infinity();
        for (int cls : {+1, -1}) {
            const auto& idx = cls > 0 ? inst.data.pos_idx : inst.data.neg_idx;
            for (int i : idx) {
                if (at_upper(s.alpha[i])) continue;  // i must come from the up set
                for (int j : idx) {
                    if (at_lower(s.alpha[j])) continue;  // j from the low set
                    best = std::max(best, -s.grad[i] + s.grad[j]);
                }
            }
        }
        const double returned = -s.grad[p.i] + s.grad[p.j];
        EXPECT_NEAR(returned, best, 1e-12);
    }
}

}  // namespace
