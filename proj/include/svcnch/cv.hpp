#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "svcnch/maxmin.hpp"
#include "svcnch/model.hpp"

namespace svcnch {

/// Candidate grids for the cross-validated baseline: odd powers of two,
/// gamma in [2^-15, 2^3] and C in [2^-5, 2^15].
inline std::vector<double> cv_gamma_grid() {
    std::vector<double> g;
    for (int k = -15; k <= 3; k += 2) g.push_back(std::pow(2.0, k));
    return g;
}

inline std::vector<double> cv_c_grid() {
    std::vector<double> c;
    for (int k = -5; k <= 15; k += 2) c.push_back(std::pow(2.0, k));
    return c;
}

struct CvConfig {
    int folds = 5;
    std::uint64_t seed = 0;
    double eps1 = 1e-6;
    int epoch_alpha = 2000;
    InnerSolver solver = InnerSolver::kPga;
};

struct CvSelection {
    double gamma = 0.0;
    double c_reg = 1.0;
    double cv_accuracy = 0.0;
    int models_trained = 0;
};

/// Plain k-fold grid search over (gamma, C): every fold trains one model
/// per grid point and the pair with the best mean validation accuracy
/// wins (first in gamma-then-C scan order on ties). Fold squared-distance
/// caches are shared across the whole grid.
inline CvSelection cv_grid_search(const TrainingSet& train, const CvConfig& cfg) {
    const int l = train.size();
    std::vector<int> idx(static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::mt19937_64 gen(cfg.seed);
    detail::shuffle_indices(idx, gen);

    struct Fold {
        TrainingSet fit_raw;
        TrainingSet val_raw;
        TrainingSet fit_std;
        StandardizationStats stats;
        GramPack<double> pack;
        bool usable = false;
    };
    std::vector<Fold> folds(static_cast<std::size_t>(cfg.folds));
    for (int f = 0; f < cfg.folds; ++f) {
        const int lo = f * l / cfg.folds;
        const int hi = (f + 1) * l / cfg.folds;
        std::vector<int> val_idx(idx.begin() + lo, idx.begin() + hi);
        std::vector<int> fit_idx;
        fit_idx.reserve(static_cast<std::size_t>(l - (hi - lo)));
        fit_idx.insert(fit_idx.end(), idx.begin(), idx.begin() + lo);
        fit_idx.insert(fit_idx.end(), idx.begin() + hi, idx.end());

        Fold& fold = folds[static_cast<std::size_t>(f)];
        fold.fit_raw = subset(train, fit_idx);
        fold.val_raw = subset(train, val_idx);
        if (fold.fit_raw.n_pos() == 0 || fold.fit_raw.n_neg() == 0 || fold.val_raw.size() == 0) continue;
        Standardized st = standardize(fold.fit_raw, {});
        fold.fit_std = std::move(st.train);
        fold.stats = std::move(st.stats);
        fold.pack = build_gram<double>(fold.fit_std, {.gamma = 1.0, .c_reg = 1.0});
        fold.usable = true;
    }

    CvSelection best;
    best.cv_accuracy = -1.0;
    for (double gamma : cv_gamma_grid()) {
        for (Fold& fold : folds) {
            if (fold.usable) set_gamma(fold.pack, gamma);
        }
        for (double c : cv_c_grid()) {
            double acc_sum = 0.0;
            int acc_cnt = 0;
            for (Fold& fold : folds) {
                if (!fold.usable) continue;
                fold.pack.c_reg = c;
                fold.pack.inv_c = 1.0 / c;
                const AlphaState state =
                    cfg.solver == InnerSolver::kPga
                        ? pga_solve(fold.fit_std, fold.pack, cfg.eps1, cfg.epoch_alpha)
                        : smo_solve(fold.fit_std, fold.pack, cfg.eps1, cfg.epoch_alpha);
                ++best.models_trained;
                const SvcModel model = make_model(state, fold.fit_std, {.gamma = gamma, .c_reg = c}, fold.stats);
                acc_sum += evaluate(model, fold.val_raw).accuracy;
                ++acc_cnt;
            }
            if (acc_cnt == 0) continue;
            const double mean_acc = acc_sum / acc_cnt;
            if (mean_acc > best.cv_accuracy) {
                best.cv_accuracy = mean_acc;
                best.gamma = gamma;
                best.c_reg = c;
            }
        }
    }
    return best;
}

}  // namespace svcnch
