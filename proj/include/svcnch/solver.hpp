#pragma once

#include <cassert>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <vector>

#include "svcnch/dataset.hpp"
#include "svcnch/kernel.hpp"

namespace svcnch {

/// A component this close to 0 or 1 counts as sitting on that bound.
inline constexpr double kBoundTol = 1e-12;

inline bool at_lower(double a) { return a <= kBoundTol; }
inline bool at_upper(double a) { return a >= 1.0 - kBoundTol; }
inline bool interior(double a) { return !at_lower(a) && !at_upper(a); }

/// Dual state: alpha lives on the product of the two class simplices
/// (per-class sum 1, components in [0,1]); grad caches (G + I/C) alpha and
/// obj caches the objective value whenever the owning solver marks them fresh.
struct AlphaState {
    std::vector<double> alpha;
    std::vector<double> grad;
    double obj = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Uniform start: 1/l+ on the positive class, 1/l- on the negative class.
inline AlphaState init_alpha(const TrainingSet& data) {
    AlphaState s;
    s.alpha.assign(static_cast<std::size_t>(data.size()), 0.0);
    const double ap = 1.0 / data.n_pos();
    const double an = 1.0 / data.n_neg();
    for (int i : data.pos_idx) s.alpha[static_cast<std::size_t>(i)] = ap;
    for (int i : data.neg_idx) s.alpha[static_cast<std::size_t>(i)] = an;
    return s;
}

/// 1/2 alpha^T (G + I/C) alpha, computed from scratch.
template <typename Scalar>
double objective(const std::vector<double>& alpha, const GramPack<Scalar>& pack) {
    return 0.5 * pack.reg_quadform(alpha);
}

/// (G + I/C) alpha, computed from scratch.
template <typename Scalar>
std::vector<double> gradient(const std::vector<double>& alpha, const GramPack<Scalar>& pack) {
    std::vector<double> g;
    pack.reg_mul(alpha, g);
    return g;
}

template <typename Scalar>
void refresh(AlphaState& s, const GramPack<Scalar>& pack) {
    pack.reg_mul(s.alpha, s.grad);
    double acc = 0.0;
    for (std::size_t i = 0; i < s.alpha.size(); ++i) acc += s.alpha[i] * s.grad[i];
    s.obj = 0.5 * acc;
}

/// First-order optimality summary. Per class c, over v_i = -grad_i:
///   m_c = max over the up set (alpha_i < 1), M_c = min over the low set
///   (alpha_i > 0); the state is optimal iff m_c <= M_c (+eps) for both
///   classes. mu_c is the mean of v_i over strictly interior components and
///   is absent when the class has none.
struct KktReport {
    std::optional<double> mu_plus;
    std::optional<double> mu_minus;
    double m_plus = -std::numeric_limits<double>::infinity();
    double M_plus = std::numeric_limits<double>::infinity();
    double m_minus = -std::numeric_limits<double>::infinity();
    double M_minus = std::numeric_limits<double>::infinity();
    int arg_m_plus = -1;
    int arg_M_plus = -1;
    int arg_m_minus = -1;
    int arg_M_minus = -1;
    double max_violation = 0.0;
    bool satisfied = false;
};

/// Requires a fresh gradient in `state`.
inline KktReport kkt_report(const AlphaState& state, const TrainingSet& data, double eps) {
    KktReport r;
    auto scan = [&](const std::vector<int>& idx, std::optional<double>& mu, double& m, double& M,
                    int& arg_m, int& arg_M) {
        double mu_acc = 0.0;
        int mu_cnt = 0;
        for (int i : idx) {
            const double a = state.alpha[static_cast<std::size_t>(i)];
            const double v = -state.grad[static_cast<std::size_t>(i)];
            if (!at_upper(a) && v > m) {
                m = v;
                arg_m = i;
            }
            if (!at_lower(a) && v < M) {
                M = v;
                arg_M = i;
            }
            if (interior(a)) {
                mu_acc += v;
                ++mu_cnt;
            }
        }
        if (mu_cnt > 0) mu = mu_acc / mu_cnt;
    };
    scan(data.pos_idx, r.mu_plus, r.m_plus, r.M_plus, r.arg_m_plus, r.arg_M_plus);
    scan(data.neg_idx, r.mu_minus, r.m_minus, r.M_minus, r.arg_m_minus, r.arg_M_minus);
    const double vp = r.m_plus - r.M_plus;
    const double vn = r.m_minus - r.M_minus;
    r.max_violation = std::max({vp, vn, 0.0});
    r.satisfied = vp <= eps && vn <= eps;
    return r;
}

/// The class-consistent (up, low) index pair with the largest violation
/// m - M. Ties between classes go to the positive class; ties inside an
/// argmax/argmin go to the lowest index (first strict improvement wins in
/// an ascending scan). Must not be called on a satisfied state.
struct ViolatingPair {
    int i = -1;
    int j = -1;
    int cls = 0;  // +1 or -1
};

inline ViolatingPair violating_pair(const KktReport& r) {
    assert(!r.satisfied && "violating_pair called on a satisfied state");
    const double vp = r.m_plus - r.M_plus;
    const double vn = r.m_minus - r.M_minus;
    if (vp >= vn) return {r.arg_m_plus, r.arg_M_plus, +1};
    return {r.arg_m_minus, r.arg_M_minus, -1};
}

inline ViolatingPair violating_pair(const AlphaState& state, const TrainingSet& data) {
    return violating_pair(kkt_report(state, data, 0.0));
}

}  // namespace svcnch
