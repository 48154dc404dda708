#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <vector>

#include "svcnch/solver.hpp"

namespace svcnch {

/// Analytic solution of the two-variable subproblem on a same-class pair
/// (i, j): alpha_i + alpha_j is pinned to its current sum, both components
/// stay in [0, 1].
struct PairSolution {
    int i = -1;
    int j = -1;
    double alpha_i_uc = 0.0;  // unconstrained optimum
    double alpha_j_uc = 0.0;
    double alpha_i_new = 0.0;  // clipped onto the feasible segment
    double alpha_j_new = 0.0;
    double sum_const = 0.0;
};

/// Requires a fresh gradient. The linear terms are recovered from the
/// cached gradient in O(1) instead of the O(l) definition sum.
template <typename Scalar>
PairSolution pair_subproblem(const AlphaState& state, const GramPack<Scalar>& pack, int i, int j) {
    if (pack.label[static_cast<std::size_t>(i)] != pack.label[static_cast<std::size_t>(j)] || i == j) {
        throw Error("pair_subproblem: pair must be two distinct samples of one class");
    }
    const double ai = state.alpha[static_cast<std::size_t>(i)];
    const double aj = state.alpha[static_cast<std::size_t>(j)];
    const double s = ai + aj;

    const double gii = pack.reg(i, i);
    const double gjj = pack.reg(j, j);
    const double gij = pack.reg(i, j);  // off-diagonal, so just g(i,j)

    // rest-of-alpha contributions: r_i = grad_i - reg(i,i) a_i - reg(i,j) a_j
    const double ri = state.grad[static_cast<std::size_t>(i)] - gii * ai - gij * aj;
    const double rj = state.grad[static_cast<std::size_t>(j)] - gjj * aj - gij * ai;

    const double denom = gii + gjj - 2.0 * gij;  // = k_ii + k_jj + 2/C - 2 y_i y_j k_ij > 0
    assert(denom > 0.0);

    PairSolution sol;
    sol.i = i;
    sol.j = j;
    sol.sum_const = s;
    sol.alpha_i_uc = ((gjj - gij) * s + rj - ri) / denom;
    sol.alpha_j_uc = s - sol.alpha_i_uc;

    const double lo = std::max(0.0, s - 1.0);
    const double hi = std::min(s, 1.0);
    sol.alpha_i_new = std::clamp(sol.alpha_i_uc, lo, hi);
    sol.alpha_j_new = s - sol.alpha_i_new;
    return sol;
}

/// Maximal-violating-pair SMO. Stops when m+ <= M+ + eps1 and
/// m- <= M- + eps1, or after max_epochs pair updates (converged flag left
/// false in that case). `warm` optionally seeds alpha with any feasible
/// point.
template <typename Scalar>
AlphaState smo_solve(const TrainingSet& data, const GramPack<Scalar>& pack, double eps1, int max_epochs,
                     const AlphaState* warm = nullptr, const StepObserver& observe = {}) {
    AlphaState state = warm ? *warm : init_alpha(data);
    state.converged = false;
    state.iterations = 0;
    refresh(state, pack);

    const int n = pack.n;
    int since_refresh = 0;
    for (int it = 1; it <= max_epochs; ++it) {
        const KktReport report = kkt_report(state, data, eps1);
        if (report.satisfied) {
            state.converged = true;
            break;
        }
        const ViolatingPair pair = violating_pair(report);
        const PairSolution sol = pair_subproblem(state, pack, pair.i, pair.j);

        const double di = sol.alpha_i_new - state.alpha[static_cast<std::size_t>(pair.i)];
        const double dj = sol.alpha_j_new - state.alpha[static_cast<std::size_t>(pair.j)];
        state.alpha[static_cast<std::size_t>(pair.i)] = sol.alpha_i_new;
        state.alpha[static_cast<std::size_t>(pair.j)] = sol.alpha_j_new;

        // rank-2 gradient update from the two touched columns
        const Scalar* ci = pack.gram.data() + static_cast<std::size_t>(pair.i) * n;
        const Scalar* cj = pack.gram.data() + static_cast<std::size_t>(pair.j) * n;
        for (int k = 0; k < n; ++k) {
            state.grad[static_cast<std::size_t>(k)] +=
                di * static_cast<double>(ci[k]) + dj * static_cast<double>(cj[k]);
        }
        state.grad[static_cast<std::size_t>(pair.i)] += di * pack.inv_c;
        state.grad[static_cast<std::size_t>(pair.j)] += dj * pack.inv_c;
        state.iterations = it;

        if (++since_refresh >= 100) {
            refresh(state, pack);
            since_refresh = 0;
        } else {
            double acc = 0.0;
            for (std::size_t k = 0; k < state.alpha.size(); ++k) acc += state.alpha[k] * state.grad[k];
            state.obj = 0.5 * acc;
        }
        if (observe) observe(state);
    }

    refresh(state, pack);
    state.converged = state.converged || kkt_report(state, data, eps1).satisfied;
    return state;
}

}  // namespace svcnch
