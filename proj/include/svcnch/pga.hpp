#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "svcnch/solver.hpp"

namespace svcnch {

/// A bound multiplier this far below zero triggers a constraint release;
/// smaller magnitudes are indistinguishable from rounding noise.
inline constexpr double kReleaseTol = 1e-12;

/// Direction components with |d_i| below this are ignored when computing
/// the feasible step bound.
inline constexpr double kDirectionTol = 1e-14;

/// Feasible descent direction: the projection of -grad onto the tangent
/// space of the active constraints (closed form: per-class mean
/// subtraction over interior components, zero at active bounds), plus the
/// multiplier of every active bound constraint.
struct DirectionInfo {
    std::vector<double> d;
    std::vector<std::pair<int, double>> bound_mult;  // (index, multiplier), ascending index
    std::optional<int> released;
    double d_inf_norm = 0.0;
};

/// Bounded exact line search result for the quadratic restricted to
/// alpha + eta*d.
struct StepInfo {
    double eta_bar = 0.0;   // unconstrained 1-D minimizer
    double eta_max = 0.0;   // largest feasible step (may be +inf)
    double eta_star = 0.0;  // clamp(eta_bar, 0, eta_max)
};

namespace detail {

/// Two-component fallback for a class with no interior component (the
/// per-class mean is undefined there): move mass along the class's
/// violating pair, which is itself a valid projected direction.
inline void pair_fallback(const AlphaState& state, std::vector<double>& d, int arg_up, int arg_low) {
    if (arg_up < 0 || arg_low < 0 || arg_up == arg_low) return;
    const double vi = -state.grad[static_cast<std::size_t>(arg_up)];
    const double vj = -state.grad[static_cast<std::size_t>(arg_low)];
    if (vi - vj <= 0.0) return;  // class already satisfies its optimality condition
    d[static_cast<std::size_t>(arg_up)] = 0.5 * (vi - vj);
    d[static_cast<std::size_t>(arg_low)] = -0.5 * (vi - vj);
}

}  // namespace detail

/// Closed-form projected direction. Requires a fresh gradient in `state`
/// and the matching KKT report (for the per-class interior means).
inline DirectionInfo direction(const AlphaState& state, const TrainingSet& data, const KktReport& report) {
    DirectionInfo info;
    info.d.assign(state.alpha.size(), 0.0);

    auto fill_class = [&](const std::vector<int>& idx, const std::optional<double>& mu, int arg_m, int arg_M) {
        if (!mu) {
            detail::pair_fallback(state, info.d, arg_m, arg_M);
            return;
        }
        for (int i : idx) {
            const double a = state.alpha[static_cast<std::size_t>(i)];
            const double v = -state.grad[static_cast<std::size_t>(i)];
            if (interior(a)) {
                info.d[static_cast<std::size_t>(i)] = v - *mu;
            } else if (at_lower(a)) {
                info.bound_mult.emplace_back(i, *mu - v);  // grad_i + mu
            } else {
                info.bound_mult.emplace_back(i, v - *mu);  // -grad_i - mu
            }
        }
    };
    fill_class(data.pos_idx, report.mu_plus, report.arg_m_plus, report.arg_M_plus);
    fill_class(data.neg_idx, report.mu_minus, report.arg_m_minus, report.arg_M_minus);
    std::sort(info.bound_mult.begin(), info.bound_mult.end());

    for (double v : info.d) info.d_inf_norm = std::max(info.d_inf_norm, std::fabs(v));
    return info;
}

/// Drop the active bound constraint with the most negative multiplier:
/// its component joins the free set of its class, the class mean is
/// recomputed over the enlarged set, and the direction is rebuilt there.
inline DirectionInfo release(const AlphaState& state, const TrainingSet& data, const DirectionInfo& info,
                             const KktReport& report) {
    int j = -1;
    double worst = 0.0;
    for (const auto& [idx, m] : info.bound_mult) {
        if (m < worst) {
            worst = m;
            j = idx;
        }
    }
    if (j < 0) throw std::logic_error("release: no negative bound multiplier");

    const int cls = data.samples[static_cast<std::size_t>(j)].label;
    const std::vector<int>& idx = cls > 0 ? data.pos_idx : data.neg_idx;

    double mu_acc = 0.0;
    int cnt = 0;
    for (int i : idx) {
        if (i == j || interior(state.alpha[static_cast<std::size_t>(i)])) {
            mu_acc += -state.grad[static_cast<std::size_t>(i)];
            ++cnt;
        }
    }
    const double mu = mu_acc / cnt;

    DirectionInfo out;
    out.d = info.d;
    out.released = j;
    for (int i : idx) {
        const std::size_t u = static_cast<std::size_t>(i);
        if (i == j || interior(state.alpha[u])) {
            out.d[u] = -state.grad[u] - mu;
        } else {
            const double v = -state.grad[u];
            out.bound_mult.emplace_back(i, at_lower(state.alpha[u]) ? mu - v : v - mu);
        }
    }
    // other class untouched: copy its multipliers through
    for (const auto& [i, m] : info.bound_mult) {
        if (data.samples[static_cast<std::size_t>(i)].label != cls) out.bound_mult.emplace_back(i, m);
    }
    std::sort(out.bound_mult.begin(), out.bound_mult.end());

    (void)report;
    for (double v : out.d) out.d_inf_norm = std::max(out.d_inf_norm, std::fabs(v));
    return out;
}

/// Largest eta keeping alpha + eta*d inside [0,1]^l; +inf when no
/// component binds.
inline double step_bounds(const AlphaState& state, const DirectionInfo& info) {
    double eta_max = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < info.d.size(); ++i) {
        const double di = info.d[i];
        if (std::fabs(di) < kDirectionTol) continue;
        const double cand = di < 0.0 ? state.alpha[i] / (-di) : (1.0 - state.alpha[i]) / di;
        eta_max = std::min(eta_max, cand);
    }
    return std::max(eta_max, 0.0);
}

/// Exact minimizer of the quadratic along d, clamped to [0, eta_max].
/// When reg_d is supplied it receives (G + I/C) d for reuse by the caller.
template <typename Scalar>
StepInfo line_search(const AlphaState& state, const DirectionInfo& info, const GramPack<Scalar>& pack,
                     double eta_max, std::vector<double>* reg_d = nullptr) {
    std::vector<double> local;
    std::vector<double>& s = reg_d ? *reg_d : local;
    pack.reg_mul(info.d, s);

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < info.d.size(); ++i) {
        num += info.d[i] * state.grad[i];  // d^T (G + I/C) alpha via the fresh gradient
        den += info.d[i] * s[i];
    }
    assert(den > 0.0 && "line_search: direction quadratic form must be positive");

    StepInfo step;
    step.eta_bar = -num / den;
    step.eta_max = eta_max;
    step.eta_star = std::clamp(step.eta_bar, 0.0, eta_max);
    return step;
}

using StepObserver = std::function<void(const AlphaState&)>;

/// Projected gradient solver. Iterates direction / release / bounded exact
/// line search until the KKT conditions hold at eps1 (converged flag set)
/// or max_epochs runs out (flag left false; the state is still feasible).
/// `warm` optionally seeds alpha with any feasible point.
template <typename Scalar>
AlphaState pga_solve(const TrainingSet& data, const GramPack<Scalar>& pack, double eps1, int max_epochs,
                     const AlphaState* warm = nullptr, const StepObserver& observe = {}) {
    AlphaState state = warm ? *warm : init_alpha(data);
    state.converged = false;
    state.iterations = 0;
    refresh(state, pack);

    int since_refresh = 0;
    std::vector<double> reg_d;
    for (int it = 1; it <= max_epochs; ++it) {
        const KktReport report = kkt_report(state, data, eps1);
        DirectionInfo info = direction(state, data, report);

        if (info.d_inf_norm <= eps1) {
            double worst = 0.0;
            for (const auto& [idx, m] : info.bound_mult) worst = std::min(worst, m);
            if (worst < -kReleaseTol) {
                info = release(state, data, info, report);
            } else if (report.satisfied) {
                state.converged = true;
                break;
            }
            if (info.d_inf_norm == 0.0) {
                // nowhere to move and nothing to release: optimal
                state.converged = true;
                break;
            }
        }

        const double eta_max = step_bounds(state, info);
        const StepInfo step = line_search(state, info, pack, eta_max, &reg_d);
        if (!(step.eta_star > 0.0)) {
            state.converged = report.satisfied;
            break;
        }

        double lin = 0.0, quad = 0.0;
        for (std::size_t i = 0; i < state.alpha.size(); ++i) {
            lin += info.d[i] * state.grad[i];
            quad += info.d[i] * reg_d[i];
            state.alpha[i] = std::clamp(state.alpha[i] + step.eta_star * info.d[i], 0.0, 1.0);
            state.grad[i] += step.eta_star * reg_d[i];
        }
        state.obj += step.eta_star * lin + 0.5 * step.eta_star * step.eta_star * quad;
        state.iterations = it;

        if (++since_refresh >= 100) {
            refresh(state, pack);
            since_refresh = 0;
        }
        if (observe) observe(state);
    }

    refresh(state, pack);
    // epoch exhaustion with a state that nonetheless satisfies the optimality
    // conditions still counts as converged
    state.converged = state.converged || kkt_report(state, data, eps1).satisfied;
    return state;
}

}  // namespace svcnch
