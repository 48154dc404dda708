#pragma once

// Shared generators for randomized test instances and feasible dual states.

#include <random>
#include <vector>

#include "svcnch/kernel.hpp"
#include "svcnch/solver.hpp"

namespace svcnch::testsupport {

/// Random dense two-class instance with standard-normal features.
inline TrainingSet make_random_data(int n_pos, int n_neg, int dim, std::mt19937_64& gen) {
    std::normal_distribution<double> normal(0.0, 1.0);
    TrainingSet data;
    data.dim = dim;
    for (int i = 0; i < n_pos + n_neg; ++i) {
        Sample s;
        s.label = i < n_pos ? +1 : -1;
        for (int j = 1; j <= dim; ++j) s.features.emplace_back(j, normal(gen));
        data.samples.push_back(std::move(s));
    }
    data.rebuild_index();
    return data;
}

struct Instance {
    TrainingSet data;
    GramPack<double> pack;
    KernelParams params;
};

inline Instance make_instance(int n_pos, int n_neg, int dim, double gamma, double c_reg, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    Instance inst;
    inst.data = make_random_data(n_pos, n_neg, dim, gen);
    inst.params = {.gamma = gamma, .c_reg = c_reg};
    inst.pack = build_gram<double>(inst.data, inst.params);
    return inst;
}

/// Random point of the class simplex (uniform via normalized exponentials),
/// optionally with `n_zero` components pinned to the lower bound. Keeps at
/// least one free component.
inline void random_class_alpha(std::vector<double>& alpha, const std::vector<int>& idx, std::mt19937_64& gen,
                               int n_zero = 0) {
    std::exponential_distribution<double> expo(1.0);
    const int m = static_cast<int>(idx.size());
    n_zero = std::min(n_zero, m - 1);
    std::vector<double> w(static_cast<std::size_t>(m));
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
        w[static_cast<std::size_t>(k)] = k < m - n_zero ? expo(gen) : 0.0;
        total += w[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < m; ++k) alpha[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] =
        w[static_cast<std::size_t>(k)] / total;
}

inline std::vector<double> random_feasible_alpha(const TrainingSet& data, std::mt19937_64& gen, int n_zero_pos = 0,
                                                 int n_zero_neg = 0) {
    std::vector<double> alpha(static_cast<std::size_t>(data.size()), 0.0);
    random_class_alpha(alpha, data.pos_idx, gen, n_zero_pos);
    random_class_alpha(alpha, data.neg_idx, gen, n_zero_neg);
    return alpha;
}

/// Wrap an alpha vector in a state with fresh gradient and objective.
template <typename Scalar>
AlphaState make_state(std::vector<double> alpha, const GramPack<Scalar>& pack) {
    AlphaState s;
    s.alpha = std::move(alpha);
    refresh(s, pack);
    return s;
}

}  // namespace svcnch::testsupport
