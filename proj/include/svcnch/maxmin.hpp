#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "svcnch/pga.hpp"
#include "svcnch/smo.hpp"

namespace svcnch {

enum class InnerSolver { kPga, kSmo };

struct MaxMinConfig {
    double gamma0 = 0.004;
    double c_reg = 1.0;
    double eps1 = 1e-6;
    double eps2 = 1e-3;
    int epoch_gamma = 500;
    int epoch_alpha = 2000;
    double gamma_lo = std::pow(2.0, -15);
    double gamma_hi = std::pow(2.0, 3);
    InnerSolver inner_solver = InnerSolver::kPga;
    double eta_floor = 1e-10;
    int max_halvings = 40;
};

/// One accepted outer iteration: the gamma the inner problem was solved
/// at, the inner minimum there, the gamma-derivative, the learning rate
/// used for the update proposed from here (0 on the final row), and how
/// many halvings that update needed.
struct GammaIteration {
    double gamma = 0.0;
    double objective = 0.0;
    double grad_gamma = 0.0;
    double eta = 0.0;
    int halvings = 0;
};

struct GammaTrace {
    std::vector<GammaIteration> iterations;
};

enum class MaxMinOutcome { kConverged, kStalled, kEpochExhausted };

struct MaxMinResult {
    AlphaState alpha;
    double gamma = 0.0;
    GammaTrace trace;
    MaxMinOutcome outcome = MaxMinOutcome::kConverged;
    int inner_solves = 0;  // includes rejected halving trials
};

/// One ascent step on gamma, clamped to the search interval.
inline double gamma_step(double gamma, double grad, double eta, double lo, double hi) {
    return std::clamp(gamma + eta * grad, lo, hi);
}

/// Dynamic learning rate: 1 on the first update, afterwards the size of
/// the previous accepted gamma move (floored away from zero).
inline double dynamic_eta(double prev_gamma, double new_gamma, bool initial, double eta_floor = 1e-10) {
    if (initial) return 1.0;
    return std::max(std::fabs(new_gamma - prev_gamma), eta_floor);
}

/// `iter,gamma,objective,grad_gamma,eta,halvings` rows, one per accepted
/// outer iteration.
inline void write_trace_csv(const GammaTrace& trace, std::ostream& os) {
    os << "iter,gamma,objective,grad_gamma,eta,halvings\n";
    std::string line;
    for (std::size_t k = 0; k < trace.iterations.size(); ++k) {
        const GammaIteration& it = trace.iterations[k];
        line.clear();
        line += std::to_string(k + 1);
        line += ',';
        detail::format_double(line, it.gamma);
        line += ',';
        detail::format_double(line, it.objective);
        line += ',';
        detail::format_double(line, it.grad_gamma);
        line += ',';
        detail::format_double(line, it.eta);
        line += ',';
        line += std::to_string(it.halvings);
        line += '\n';
        os << line;
    }
}

/// Alternate the inner dual solve with gradient ascent on gamma until
/// |f'(gamma)| <= eps2. A proposed gamma is accepted only if the re-solved
/// inner minimum increases; otherwise the learning rate is halved, up to
/// max_halvings (then the loop stops and reports a stall). Inner solves
/// warm-start from the previous optimum, which is feasible at any gamma.
template <typename Scalar>
MaxMinResult maxmin_train(const TrainingSet& data, GramPack<Scalar>& pack, const MaxMinConfig& cfg,
                          const StepObserver& observe = {}) {
    auto solve = [&](const AlphaState* warm) {
        return cfg.inner_solver == InnerSolver::kPga
                   ? pga_solve(data, pack, cfg.eps1, cfg.epoch_alpha, warm, observe)
                   : smo_solve(data, pack, cfg.eps1, cfg.epoch_alpha, warm, observe);
    };

    MaxMinResult res;
    double gamma = std::clamp(cfg.gamma0, cfg.gamma_lo, cfg.gamma_hi);
    set_gamma(pack, gamma);
    AlphaState alpha = solve(nullptr);
    ++res.inner_solves;

    double prev_gamma = gamma;
    bool first_update = true;
    res.outcome = MaxMinOutcome::kEpochExhausted;

    for (int n = 1; n <= cfg.epoch_gamma; ++n) {
        const double fp = gamma_derivative(alpha.alpha, pack, gamma);
        GammaIteration rec{gamma, alpha.obj, fp, 0.0, 0};

        if (std::fabs(fp) <= cfg.eps2) {
            res.trace.iterations.push_back(rec);
            res.outcome = MaxMinOutcome::kConverged;
            break;
        }
        if (n == cfg.epoch_gamma) {
            res.trace.iterations.push_back(rec);
            break;
        }

        double eta = dynamic_eta(prev_gamma, gamma, first_update, cfg.eta_floor);
        bool accepted = false;
        AlphaState trial_alpha;
        double trial_gamma = gamma;
        for (int h = 0; h <= cfg.max_halvings; ++h) {
            trial_gamma = gamma_step(gamma, fp, eta, cfg.gamma_lo, cfg.gamma_hi);
            if (trial_gamma == gamma) break;  // clamped against the wall; halving cannot help
            set_gamma(pack, trial_gamma);
            trial_alpha = solve(&alpha);
            ++res.inner_solves;
            if (trial_alpha.obj > alpha.obj) {
                accepted = true;
                rec.eta = eta;
                rec.halvings = h;
                break;
            }
            eta *= 0.5;
            if (eta < cfg.eta_floor) break;
        }

        res.trace.iterations.push_back(rec);
        if (!accepted) {
            set_gamma(pack, gamma);  // leave the pack at the returned gamma
            res.outcome = MaxMinOutcome::kStalled;
            break;
        }

        prev_gamma = gamma;
        gamma = trial_gamma;
        alpha = std::move(trial_alpha);
        first_update = false;
    }

    res.alpha = std::move(alpha);
    res.gamma = gamma;
    return res;
}

}  // namespace svcnch
