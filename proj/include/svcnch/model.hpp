#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "svcnch/dataset.hpp"
#include "svcnch/kernel.hpp"
#include "svcnch/solver.hpp"

namespace svcnch {

inline constexpr int kModelFormatVersion = 1;

struct SupportVector {
    std::vector<double> x;  // standardized feature vector, length stats.dim()
    int label = 0;
    double alpha = 0.0;
};

/// Trained predictor. Support vectors live in standardized space; decide()
/// standardizes its input internally, so callers always pass raw features.
struct SvcModel {
    int format_version = kModelFormatVersion;
    double gamma = 0.0;
    double c_reg = 1.0;
    double p_star = 0.0;
    double q_star = 0.0;
    StandardizationStats stats;
    std::vector<SupportVector> support;
};

struct EvalReport {
    double accuracy = 0.0;
    int n_correct = 0;
    int n_total = 0;
    std::optional<double> fisher_ratio;
};

/// Projections of the two closest hull points onto the separating
/// direction: the per-j value sum_{i in S} y_i a_i k(x_j, x_i) + y_j a_j / C
/// averaged over the in-class support vectors (positive class gives p*,
/// negative gives q*). At a converged alpha the per-j values agree to the
/// solver tolerance, so the average only removes an arbitrary choice.
inline std::pair<double, double> thresholds(const AlphaState& state, const TrainingSet& data,
                                            const KernelParams& params) {
    std::vector<int> sv;
    for (int i = 0; i < data.size(); ++i) {
        if (state.alpha[static_cast<std::size_t>(i)] > kBoundTol) sv.push_back(i);
    }
    std::vector<std::vector<double>> x(sv.size());
    for (std::size_t k = 0; k < sv.size(); ++k) x[k] = data.samples[static_cast<std::size_t>(sv[k])].dense(data.dim);

    double p_acc = 0.0, q_acc = 0.0;
    int p_cnt = 0, q_cnt = 0;
    for (std::size_t a = 0; a < sv.size(); ++a) {
        const Sample& sj = data.samples[static_cast<std::size_t>(sv[a])];
        double val = sj.label * state.alpha[static_cast<std::size_t>(sv[a])] / params.c_reg;
        for (std::size_t b = 0; b < sv.size(); ++b) {
            const Sample& si = data.samples[static_cast<std::size_t>(sv[b])];
            val += si.label * state.alpha[static_cast<std::size_t>(sv[b])] * gaussian_kernel(x[a], x[b], params.gamma);
        }
        if (sj.label > 0) {
            p_acc += val;
            ++p_cnt;
        } else {
            q_acc += val;
            ++q_cnt;
        }
    }
    if (p_cnt == 0 || q_cnt == 0) throw Error("thresholds: a class has no support vector");
    return {p_acc / p_cnt, q_acc / q_cnt};
}

/// Assemble the predictor from a solved state. `data` must be the
/// standardized training set the solve ran on; `stats` the transform that
/// produced it.
inline SvcModel make_model(const AlphaState& state, const TrainingSet& data, const KernelParams& params,
                           const StandardizationStats& stats) {
    SvcModel m;
    m.gamma = params.gamma;
    m.c_reg = params.c_reg;
    m.stats = stats;
    const auto [p, q] = thresholds(state, data, params);
    m.p_star = p;
    m.q_star = q;
    for (int i = 0; i < data.size(); ++i) {
        const double a = state.alpha[static_cast<std::size_t>(i)];
        if (a > kBoundTol) {
            const Sample& s = data.samples[static_cast<std::size_t>(i)];
            m.support.push_back({s.dense(stats.dim()), s.label, a});
        }
    }
    return m;
}

/// Raw decision value at a raw (unstandardized) input.
inline double decision_value(const std::vector<double>& x_raw, const SvcModel& model) {
    const std::size_t dim = static_cast<std::size_t>(model.stats.dim());
    if (x_raw.size() > dim) {
        throw DimensionError("decide: input has " + std::to_string(x_raw.size()) + " features, model expects <= " +
                             std::to_string(dim));
    }
    std::vector<double> x = x_raw;
    x.resize(dim, 0.0);
    model.stats.apply(x);

    double val = 0.0;
    for (const SupportVector& sv : model.support) {
        val += sv.label * sv.alpha * gaussian_kernel(x, sv.x, model.gamma);
    }
    return val - 0.5 * (model.p_star + model.q_star);
}

/// sign of the decision value; exact zero maps to +1.
inline int decide(const std::vector<double>& x_raw, const SvcModel& model) {
    return decision_value(x_raw, model) >= 0.0 ? +1 : -1;
}

/// Fraction of correct decisions on a raw (unstandardized) test set.
inline EvalReport evaluate(const SvcModel& model, const TrainingSet& test) {
    EvalReport r;
    r.n_total = test.size();
    for (const Sample& s : test.samples) {
        if (decide(s.dense(test.dim), model) == s.label) ++r.n_correct;
    }
    r.accuracy = r.n_total > 0 ? static_cast<double>(r.n_correct) / r.n_total : 0.0;
    return r;
}

/// Separability diagnostic in the kernel feature space: squared distance
/// of the class means over the summed in-class spread, everything expanded
/// in kernel evaluations (k(x,x) = 1 for the Gaussian kernel):
///   D_inter = A+ + A- - 2B,  D_inner = (1 - A+) + (1 - A-)
/// with A_c the in-class and B the cross-class mean kernel value.
inline double fisher_ratio(const TrainingSet& data, const KernelParams& params) {
    if (data.n_pos() == 0 || data.n_neg() == 0) throw Error("fisher_ratio: both classes must be nonempty");
    std::vector<std::vector<double>> x(static_cast<std::size_t>(data.size()));
    for (int i = 0; i < data.size(); ++i) x[static_cast<std::size_t>(i)] = data.samples[static_cast<std::size_t>(i)].dense(data.dim);

    auto mean_kernel = [&](const std::vector<int>& ia, const std::vector<int>& ib) {
        double acc = 0.0;
        for (int i : ia) {
            for (int j : ib) acc += gaussian_kernel(x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)], params.gamma);
        }
        return acc / (static_cast<double>(ia.size()) * static_cast<double>(ib.size()));
    };
    const double a_pos = mean_kernel(data.pos_idx, data.pos_idx);
    const double a_neg = mean_kernel(data.neg_idx, data.neg_idx);
    const double b = mean_kernel(data.pos_idx, data.neg_idx);

    const double d_inter = a_pos + a_neg - 2.0 * b;
    const double d_inner = std::max((1.0 - a_pos) + (1.0 - a_neg), 0.0);
    if (d_inter <= 0.0) return 0.0;
    return d_inter / d_inner;
}

/// Versioned line-oriented text format, 17 significant digits everywhere:
///   svcnch-model v1
///   gamma / c / p_star / q_star lines
///   dim N, mean ..., scale ...
///   support COUNT, then one `<label> <alpha> <idx>:<val>...` line each
///   end
inline void save_model(const SvcModel& model, std::ostream& os) {
    std::string line;
    auto num_line = [&](const char* key, double v) {
        line.clear();
        line += key;
        line += ' ';
        detail::format_double(line, v);
        line += '\n';
        os << line;
    };
    os << "svcnch-model v" << model.format_version << '\n';
    num_line("gamma", model.gamma);
    num_line("c", model.c_reg);
    num_line("p_star", model.p_star);
    num_line("q_star", model.q_star);
    os << "dim " << model.stats.dim() << '\n';
    for (const char* key : {"mean", "scale"}) {
        const auto& v = key[0] == 'm' ? model.stats.mean : model.stats.scale;
        line = key;
        for (double t : v) {
            line += ' ';
            detail::format_double(line, t);
        }
        line += '\n';
        os << line;
    }
    os << "support " << model.support.size() << '\n';
    for (const SupportVector& sv : model.support) {
        line = sv.label > 0 ? "+1 " : "-1 ";
        detail::format_double(line, sv.alpha);
        for (std::size_t j = 0; j < sv.x.size(); ++j) {
            if (sv.x[j] == 0.0) continue;
            line += ' ';
            line += std::to_string(j + 1);
            line += ':';
            detail::format_double(line, sv.x[j]);
        }
        line += '\n';
        os << line;
    }
    os << "end\n";
}

namespace detail {

inline std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> toks;
    std::size_t i = 0;
    while (i < line.size()) {
        std::size_t j = line.find_first_of(" \t", i);
        if (j == std::string_view::npos) j = line.size();
        if (j > i) toks.push_back(line.substr(i, j - i));
        i = j + 1;
    }
    return toks;
}

}  // namespace detail

inline SvcModel load_model(std::istream& is) {
    auto next_line = [&](std::string& out) {
        if (!std::getline(is, out)) throw CorruptModelError("model file truncated");
        if (!out.empty() && out.back() == '\r') out.pop_back();
    };
    std::string line;

    next_line(line);
    {
        auto toks = detail::split_tokens(line);
        if (toks.size() != 2 || toks[0] != "svcnch-model" || toks[1].size() < 2 || toks[1][0] != 'v') {
            throw CorruptModelError("not a svcnch model file");
        }
        int version = 0;
        if (!detail::parse_int(toks[1].substr(1), version)) throw CorruptModelError("bad version field");
        if (version != kModelFormatVersion) throw VersionMismatchError(version, kModelFormatVersion);
    }

    SvcModel m;
    auto expect_num = [&](const char* key) {
        next_line(line);
        auto toks = detail::split_tokens(line);
        double v = 0.0;
        if (toks.size() != 2 || toks[0] != key || !detail::parse_double(toks[1], v)) {
            throw CorruptModelError(std::string("expected '") + key + " <value>' line");
        }
        return v;
    };
    m.gamma = expect_num("gamma");
    m.c_reg = expect_num("c");
    m.p_star = expect_num("p_star");
    m.q_star = expect_num("q_star");

    next_line(line);
    int dim = 0;
    {
        auto toks = detail::split_tokens(line);
        if (toks.size() != 2 || toks[0] != "dim" || !detail::parse_int(toks[1], dim) || dim < 0) {
            throw CorruptModelError("expected 'dim <n>' line");
        }
    }
    for (const char* key : {"mean", "scale"}) {
        next_line(line);
        auto toks = detail::split_tokens(line);
        if (toks.empty() || toks[0] != key || static_cast<int>(toks.size()) != dim + 1) {
            throw CorruptModelError(std::string("expected '") + key + "' line with " + std::to_string(dim) + " values");
        }
        std::vector<double>& v = key[0] == 'm' ? m.stats.mean : m.stats.scale;
        v.resize(static_cast<std::size_t>(dim));
        for (int j = 0; j < dim; ++j) {
            if (!detail::parse_double(toks[static_cast<std::size_t>(j) + 1], v[static_cast<std::size_t>(j)])) {
                throw CorruptModelError(std::string("bad value in '") + key + "' line");
            }
        }
    }

    next_line(line);
    int n_sv = 0;
    {
        auto toks = detail::split_tokens(line);
        if (toks.size() != 2 || toks[0] != "support" || !detail::parse_int(toks[1], n_sv) || n_sv < 0) {
            throw CorruptModelError("expected 'support <count>' line");
        }
    }
    m.support.reserve(static_cast<std::size_t>(n_sv));
    for (int k = 0; k < n_sv; ++k) {
        next_line(line);
        auto toks = detail::split_tokens(line);
        if (toks.size() < 2) throw CorruptModelError("bad support vector line");
        double label = 0.0, alpha = 0.0;
        if (!detail::parse_double(toks[0], label) || (label != 1.0 && label != -1.0) ||
            !detail::parse_double(toks[1], alpha)) {
            throw CorruptModelError("bad support vector line");
        }
        SupportVector sv;
        sv.label = label > 0 ? +1 : -1;
        sv.alpha = alpha;
        sv.x.assign(static_cast<std::size_t>(dim), 0.0);
        int prev = 0;
        for (std::size_t t = 2; t < toks.size(); ++t) {
            std::size_t colon = toks[t].find(':');
            int idx = 0;
            double val = 0.0;
            if (colon == std::string_view::npos || !detail::parse_int(toks[t].substr(0, colon), idx) ||
                !detail::parse_double(toks[t].substr(colon + 1), val) || idx <= prev || idx > dim) {
                throw CorruptModelError("bad support vector feature entry");
            }
            sv.x[static_cast<std::size_t>(idx) - 1] = val;
            prev = idx;
        }
        m.support.push_back(std::move(sv));
    }
    next_line(line);
    if (line != "end") throw CorruptModelError("missing end marker");
    return m;
}

inline SvcModel load_model_string(const std::string& text) {
    std::istringstream is(text);
    return load_model(is);
}

}  // namespace svcnch
