#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "svcnch/dataset.hpp"
#include "svcnch/errors.hpp"

namespace svcnch {

/// Gaussian width gamma and penalty C (enters the problem as 1/C on the
/// Gram diagonal).
struct KernelParams {
    double gamma = 0.004;
    double c_reg = 1.0;
};

/// exp(-gamma * ||a - b||^2), in (0, 1].
inline double gaussian_kernel(const std::vector<double>& a, const std::vector<double>& b, double gamma) {
    if (a.size() != b.size()) throw DimensionError("gaussian_kernel: vector length mismatch");
    double d2 = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

/// Cached kernel matrices for one dataset: pairwise squared distances
/// (gamma-independent), the label-signed Gram matrix, and the regularized
/// Gram exposed as an accessor (adds 1/C on the diagonal; never stored).
///
/// Scalar selects the storage precision of the two l*l matrices; every
/// accumulation downstream runs in double. Storage for l samples is
/// 2*l*l*sizeof(Scalar) bytes, which is the memory ceiling for large sets
/// (float halves it).
template <typename Scalar = double>
struct GramPack {
    int n = 0;
    double gamma = 0.0;
    double c_reg = 1.0;
    double inv_c = 1.0;
    std::vector<Scalar> sqdist;       // n*n, symmetric, zero diagonal
    std::vector<Scalar> gram;         // n*n, G[i][j] = y_i y_j exp(-gamma sqdist)
    std::vector<std::int8_t> label;   // +1 / -1 per sample

    double sq(int i, int j) const { return static_cast<double>(sqdist[static_cast<std::size_t>(i) * n + j]); }
    double g(int i, int j) const { return static_cast<double>(gram[static_cast<std::size_t>(i) * n + j]); }

    /// Regularized Gram entry: g(i,j) + delta_ij / C.
    double reg(int i, int j) const { return g(i, j) + (i == j ? inv_c : 0.0); }

    /// Plain (unsigned) kernel value k(x_i, x_j).
    double kernel(int i, int j) const { return g(i, j) * label[static_cast<std::size_t>(i)] * label[static_cast<std::size_t>(j)]; }

    /// y = (G + I/C) x with double accumulation.
    void reg_mul(const std::vector<double>& x, std::vector<double>& y) const {
        y.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const Scalar* row = gram.data() + static_cast<std::size_t>(i) * n;
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += static_cast<double>(row[j]) * x[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = acc + inv_c * x[static_cast<std::size_t>(i)];
        }
    }

    /// x^T (G + I/C) x.
    double reg_quadform(const std::vector<double>& x) const {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const Scalar* row = gram.data() + static_cast<std::size_t>(i) * n;
            double r = 0.0;
            for (int j = 0; j < n; ++j) r += static_cast<double>(row[j]) * x[static_cast<std::size_t>(j)];
            acc += x[static_cast<std::size_t>(i)] * (r + inv_c * x[static_cast<std::size_t>(i)]);
        }
        return acc;
    }
};

/// Re-exponentiate the Gram matrix at a new gamma; sqdist and labels are
/// reused, so this is one elementwise exp pass.
template <typename Scalar>
void set_gamma(GramPack<Scalar>& pack, double gamma) {
    const int n = pack.n;
    for (int i = 0; i < n; ++i) {
        Scalar* grow = pack.gram.data() + static_cast<std::size_t>(i) * n;
        const Scalar* drow = pack.sqdist.data() + static_cast<std::size_t>(i) * n;
        const double yi = pack.label[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            const double k = std::exp(-gamma * static_cast<double>(drow[j]));
            grow[j] = static_cast<Scalar>(yi * pack.label[static_cast<std::size_t>(j)] * k);
        }
    }
    pack.gamma = gamma;
}

template <typename Scalar = double>
GramPack<Scalar> build_gram(const TrainingSet& data, const KernelParams& params) {
    GramPack<Scalar> pack;
    const int n = data.size();
    pack.n = n;
    pack.c_reg = params.c_reg;
    pack.inv_c = 1.0 / params.c_reg;
    pack.sqdist.assign(static_cast<std::size_t>(n) * n, Scalar(0));
    pack.gram.assign(static_cast<std::size_t>(n) * n, Scalar(0));
    pack.label.resize(static_cast<std::size_t>(n));

    std::vector<std::vector<double>> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        x[static_cast<std::size_t>(i)] = data.samples[static_cast<std::size_t>(i)].dense(data.dim);
        pack.label[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(data.samples[static_cast<std::size_t>(i)].label);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const auto& a = x[static_cast<std::size_t>(i)];
            const auto& b = x[static_cast<std::size_t>(j)];
            double d2 = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) {
                const double d = a[k] - b[k];
                d2 += d * d;
            }
            pack.sqdist[static_cast<std::size_t>(i) * n + j] = static_cast<Scalar>(d2);
            pack.sqdist[static_cast<std::size_t>(j) * n + i] = static_cast<Scalar>(d2);
        }
    }
    set_gamma(pack, params.gamma);
    return pack;
}

/// d/dgamma of 1/2 alpha^T (G(gamma) + I/C) alpha at fixed alpha:
///   1/2 sum_ij alpha_i alpha_j y_i y_j (-sqdist_ij) exp(-gamma sqdist_ij).
/// The diagonal 1/C term is gamma-free and contributes nothing.
template <typename Scalar>
double gamma_derivative(const std::vector<double>& alpha, const GramPack<Scalar>& pack, double gamma) {
    const int n = pack.n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const Scalar* drow = pack.sqdist.data() + static_cast<std::size_t>(i) * n;
        const double yi = pack.label[static_cast<std::size_t>(i)];
        double r = 0.0;
        for (int j = 0; j < n; ++j) {
            const double d2 = static_cast<double>(drow[j]);
            r += pack.label[static_cast<std::size_t>(j)] * (-d2) * std::exp(-gamma * d2) * alpha[static_cast<std::size_t>(j)];
        }
        acc += alpha[static_cast<std::size_t>(i)] * yi * r;
    }
    return 0.5 * acc;
}

}  // namespace svcnch
