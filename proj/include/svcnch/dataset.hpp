#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "svcnch/errors.hpp"

namespace svcnch {

/// One labeled sample in sparse form: (1-based feature index, value) pairs,
/// indices strictly increasing. Absent indices read as 0.0.
struct Sample {
    std::vector<std::pair<int, double>> features;
    int label = 0;  // +1 or -1

    double feature(int idx) const {
        auto it = std::lower_bound(features.begin(), features.end(), idx,
                                   [](const auto& p, int i) { return p.first < i; });
        return (it != features.end() && it->first == idx) ? it->second : 0.0;
    }

    /// Dense copy, length dim (zero-padded).
    std::vector<double> dense(int dim) const {
        std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
        for (const auto& [idx, val] : features) {
            if (idx <= dim) v[static_cast<std::size_t>(idx) - 1] = val;
        }
        return v;
    }

    bool operator==(const Sample&) const = default;
};

/// A two-class dataset. pos_idx/neg_idx are 0-based positions into samples;
/// together they cover every sample exactly once and are both nonempty.
struct TrainingSet {
    std::vector<Sample> samples;
    int dim = 0;
    std::vector<int> pos_idx;
    std::vector<int> neg_idx;

    int size() const { return static_cast<int>(samples.size()); }
    int n_pos() const { return static_cast<int>(pos_idx.size()); }
    int n_neg() const { return static_cast<int>(neg_idx.size()); }

    void rebuild_index() {
        pos_idx.clear();
        neg_idx.clear();
        for (int i = 0; i < size(); ++i) {
            (samples[static_cast<std::size_t>(i)].label > 0 ? pos_idx : neg_idx).push_back(i);
        }
    }

    bool operator==(const TrainingSet&) const = default;
};

/// Per-feature mean and scale (standard deviation with a constant-column guard).
struct StandardizationStats {
    std::vector<double> mean;
    std::vector<double> scale;  // > 0 for all features

    int dim() const { return static_cast<int>(mean.size()); }

    /// (x - mean) / scale applied in place to a dense vector.
    void apply(std::vector<double>& x) const {
        for (std::size_t j = 0; j < x.size() && j < mean.size(); ++j) {
            x[j] = (x[j] - mean[j]) / scale[j];
        }
    }

    bool operator==(const StandardizationStats&) const = default;
};

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
};

namespace detail {

inline bool parse_double(std::string_view tok, double& out) {
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc{} && ptr == tok.data() + tok.size();
}

inline bool parse_int(std::string_view tok, int& out) {
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc{} && ptr == tok.data() + tok.size();
}

inline void format_double(std::string& out, double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    (void)ec;
    out.append(buf, ptr);
}

/// Unbiased draw from [0, n).
inline std::uint64_t bounded_rand(std::mt19937_64& gen, std::uint64_t n) {
    const std::uint64_t rem = std::numeric_limits<std::uint64_t>::max() % n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - rem;
    std::uint64_t v;
    do {
        v = gen();
    } while (v >= limit);
    return v % n;
}

/// Engine-stable Fisher-Yates (std::shuffle draws are implementation-defined).
inline void shuffle_indices(std::vector<int>& idx, std::mt19937_64& gen) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        std::swap(idx[i - 1], idx[bounded_rand(gen, i)]);
    }
}

}  // namespace detail

/// Raw LIBSVM rows with labels left as parsed. `#` starts a comment,
/// blank lines are skipped, CRLF accepted. Feature indices must be
/// positive and strictly increasing within a row.
struct RawRows {
    std::vector<std::vector<std::pair<int, double>>> features;
    std::vector<double> labels;
    int dim = 0;
};

inline RawRows parse_libsvm_rows(std::string_view text) {
    RawRows out;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (std::size_t h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.remove_suffix(1);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
        if (line.empty()) continue;

        std::vector<std::string_view> toks;
        std::size_t i = 0;
        while (i < line.size()) {
            std::size_t j = line.find_first_of(" \t", i);
            if (j == std::string_view::npos) j = line.size();
            if (j > i) toks.push_back(line.substr(i, j - i));
            i = j + 1;
        }

        double label;
        if (!detail::parse_double(toks[0], label)) {
            throw ParseError(line_no, "bad label token '" + std::string(toks[0]) + "'");
        }
        std::vector<std::pair<int, double>> feats;
        feats.reserve(toks.size() - 1);
        int prev_idx = 0;
        for (std::size_t t = 1; t < toks.size(); ++t) {
            std::size_t colon = toks[t].find(':');
            if (colon == std::string_view::npos) {
                throw ParseError(line_no, "expected index:value, got '" + std::string(toks[t]) + "'");
            }
            int idx;
            double val;
            if (!detail::parse_int(toks[t].substr(0, colon), idx) || idx <= 0) {
                throw ParseError(line_no, "bad feature index in '" + std::string(toks[t]) + "'");
            }
            if (!detail::parse_double(toks[t].substr(colon + 1), val)) {
                throw ParseError(line_no, "bad feature value in '" + std::string(toks[t]) + "'");
            }
            if (idx <= prev_idx) {
                throw ParseError(line_no, "feature indices must be strictly increasing");
            }
            prev_idx = idx;
            feats.emplace_back(idx, val);
        }
        out.dim = std::max(out.dim, prev_idx);
        out.features.push_back(std::move(feats));
        out.labels.push_back(label);
    }
    return out;
}

/// Parse a two-class LIBSVM dataset. Raw labels may be any two distinct
/// numeric values ({+1,-1}, {0,1}, {1,2}, ...); the larger maps to +1.
inline TrainingSet parse_libsvm(std::string_view text) {
    RawRows rows = parse_libsvm_rows(text);
    if (rows.labels.empty()) throw EmptyInputError();

    double lo = rows.labels[0], hi = rows.labels[0];
    for (double v : rows.labels) {
        if (v != lo && v != hi) {
            if (lo == hi) {
                (v < lo ? lo : hi) = v;
            } else {
                throw Error("labels not mappable to {+1,-1}: more than two distinct values");
            }
        }
    }
    if (lo == hi) throw SingleClassError("dataset contains a single class");

    TrainingSet set;
    set.dim = rows.dim;
    set.samples.reserve(rows.labels.size());
    for (std::size_t i = 0; i < rows.labels.size(); ++i) {
        Sample s;
        s.features = std::move(rows.features[i]);
        s.label = rows.labels[i] == hi ? +1 : -1;
        set.samples.push_back(std::move(s));
    }
    set.rebuild_index();
    return set;
}

/// Inverse of parse_libsvm at 17 significant digits (round-trip exact).
inline void write_libsvm(const TrainingSet& set, std::ostream& os) {
    std::string line;
    for (const Sample& s : set.samples) {
        line.clear();
        line += s.label > 0 ? "+1" : "-1";
        for (const auto& [idx, val] : s.features) {
            line += ' ';
            line += std::to_string(idx);
            line += ':';
            detail::format_double(line, val);
        }
        line += '\n';
        os << line;
    }
}

struct Standardized {
    TrainingSet train;
    TrainingSet test;
    StandardizationStats stats;
};

/// Center/scale every feature using moments of `train` only (population
/// variance), then apply the same transform to both sets. Constant columns
/// keep scale 1 so they become centered zeros.
inline Standardized standardize(const TrainingSet& train, const TrainingSet& test) {
    if (train.samples.empty()) throw Error("standardize: empty training set");
    const int dim = std::max(train.dim, test.dim);
    const double n = static_cast<double>(train.size());

    StandardizationStats stats;
    stats.mean.assign(static_cast<std::size_t>(dim), 0.0);
    stats.scale.assign(static_cast<std::size_t>(dim), 1.0);

    for (const Sample& s : train.samples) {
        for (const auto& [idx, val] : s.features) stats.mean[static_cast<std::size_t>(idx) - 1] += val;
    }
    for (double& m : stats.mean) m /= n;

    std::vector<double> var(static_cast<std::size_t>(dim), 0.0);
    for (const Sample& s : train.samples) {
        std::vector<double> x = s.dense(dim);
        for (int j = 0; j < dim; ++j) {
            const double d = x[static_cast<std::size_t>(j)] - stats.mean[static_cast<std::size_t>(j)];
            var[static_cast<std::size_t>(j)] += d * d;
        }
    }
    for (int j = 0; j < dim; ++j) {
        const double sd = std::sqrt(var[static_cast<std::size_t>(j)] / n);
        // numerically-constant columns get the neutral scale
        if (sd > 1e-12 * std::max(1.0, std::fabs(stats.mean[static_cast<std::size_t>(j)]))) {
            stats.scale[static_cast<std::size_t>(j)] = sd;
        }
    }

    auto transform = [&](const TrainingSet& in) {
        TrainingSet out;
        out.dim = dim;
        out.samples.reserve(in.samples.size());
        for (const Sample& s : in.samples) {
            std::vector<double> x = s.dense(dim);
            stats.apply(x);
            Sample t;
            t.label = s.label;
            t.features.reserve(static_cast<std::size_t>(dim));
            for (int j = 0; j < dim; ++j) t.features.emplace_back(j + 1, x[static_cast<std::size_t>(j)]);
            out.samples.push_back(std::move(t));
        }
        out.rebuild_index();
        return out;
    };

    Standardized out;
    out.train = transform(train);
    out.test = test.samples.empty() ? TrainingSet{.samples = {}, .dim = dim, .pos_idx = {}, .neg_idx = {}}
                                    : transform(test);
    out.stats = std::move(stats);
    return out;
}

/// Subset by 0-based sample positions; dim is inherited from the parent.
inline TrainingSet subset(const TrainingSet& data, const std::vector<int>& indices) {
    TrainingSet out;
    out.dim = data.dim;
    out.samples.reserve(indices.size());
    for (int i : indices) out.samples.push_back(data.samples[static_cast<std::size_t>(i)]);
    out.rebuild_index();
    return out;
}

/// Seeded shuffle split into round(train_fraction * l) training samples and
/// the rest. Deterministic for a fixed seed. If either side misses a class
/// the seed is bumped and the shuffle retried a bounded number of times.
inline std::pair<TrainingSet, TrainingSet> split(const TrainingSet& data, const SplitSpec& spec) {
    const int l = data.size();
    const int n_train = static_cast<int>(std::llround(spec.train_fraction * l));
    if (n_train <= 0 || n_train >= l) {
        throw SplitError("split: train_fraction " + std::to_string(spec.train_fraction) +
                         " leaves one side empty for l=" + std::to_string(l));
    }

    constexpr int kMaxRetries = 256;
    std::vector<int> idx(static_cast<std::size_t>(l));
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        for (int i = 0; i < l; ++i) idx[static_cast<std::size_t>(i)] = i;
        std::mt19937_64 gen(spec.seed + static_cast<std::uint64_t>(attempt));
        detail::shuffle_indices(idx, gen);

        std::vector<int> train_idx(idx.begin(), idx.begin() + n_train);
        std::vector<int> test_idx(idx.begin() + n_train, idx.end());
        TrainingSet train = subset(data, train_idx);
        TrainingSet test = subset(data, test_idx);
        if (train.n_pos() >= 1 && train.n_neg() >= 1 && test.n_pos() >= 1 && test.n_neg() >= 1) {
            return {std::move(train), std::move(test)};
        }
    }
    throw SplitError("split: could not produce a two-class train/test pair after bounded retries");
}

}  // namespace svcnch
