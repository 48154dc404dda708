// Command-line front end: train / predict / eval / bench on LIBSVM-format
// datasets. All output is deterministic for fixed flags and input bytes.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svcnch/svcnch.hpp"

namespace {

struct CommonOpts {
    std::string data_path;
    double fraction = 0.8;
    std::uint64_t seed = 0;
    double gamma0 = 0.004;
    double c_reg = 1.0;
    double eps1 = 1e-6;
    double eps2 = 1e-3;
    int epoch_gamma = 500;
    int epoch_alpha = 2000;
    std::string solver = "pga";
    std::string gram_precision = "f64";
};

void add_common_flags(CLI::App* cmd, CommonOpts& o, bool with_split) {
    cmd->add_option("--data", o.data_path, "input dataset (LIBSVM sparse text)")->required();
    if (with_split) {
        cmd->add_option("--fraction", o.fraction, "training fraction of the split");
        cmd->add_option("--seed", o.seed, "split seed");
    }
    cmd->add_option("--gamma0", o.gamma0, "initial Gaussian width");
    cmd->add_option("--c", o.c_reg, "penalty parameter C");
    cmd->add_option("--eps1", o.eps1, "inner solver tolerance");
    cmd->add_option("--eps2", o.eps2, "outer |f'(gamma)| tolerance");
    cmd->add_option("--epoch-gamma", o.epoch_gamma, "max outer iterations");
    cmd->add_option("--epoch-alpha", o.epoch_alpha, "max inner iterations");
    cmd->add_option("--solver", o.solver, "inner solver")->check(CLI::IsMember({"pga", "smo"}));
    cmd->add_option("--gram-precision", o.gram_precision, "Gram matrix storage precision")
        ->check(CLI::IsMember({"f64", "f32"}));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw svcnch::Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw svcnch::Error("cannot open '" + path + "' for writing");
    out << content;
}

svcnch::MaxMinConfig to_config(const CommonOpts& o) {
    svcnch::MaxMinConfig cfg;
    cfg.gamma0 = o.gamma0;
    cfg.c_reg = o.c_reg;
    cfg.eps1 = o.eps1;
    cfg.eps2 = o.eps2;
    cfg.epoch_gamma = o.epoch_gamma;
    cfg.epoch_alpha = o.epoch_alpha;
    cfg.inner_solver = o.solver == "smo" ? svcnch::InnerSolver::kSmo : svcnch::InnerSolver::kPga;
    return cfg;
}

std::string header_line(const char* cmd, const CommonOpts& o, bool with_split) {
    std::ostringstream ss;
    ss << "svcnch " << cmd << ": data=" << o.data_path;
    if (with_split) ss << " fraction=" << o.fraction << " seed=" << o.seed;
    ss << " gamma0=" << o.gamma0 << " c=" << o.c_reg << " eps1=" << o.eps1 << " eps2=" << o.eps2
       << " epoch_gamma=" << o.epoch_gamma << " epoch_alpha=" << o.epoch_alpha << " solver=" << o.solver
       << " gram=" << o.gram_precision;
    return ss.str();
}

struct TrainedRun {
    svcnch::SvcModel model;
    svcnch::MaxMinResult result;
    svcnch::TrainingSet train_raw;
    svcnch::TrainingSet test_raw;  // empty when no split requested
};

/// Split (optional), standardize, run the full maxmin pipeline, build the
/// predictor.
TrainedRun run_pipeline(const svcnch::TrainingSet& all, const CommonOpts& o, bool do_split) {
    TrainedRun run;
    if (do_split && o.fraction < 1.0) {
        auto [train_raw, test_raw] = svcnch::split(all, {.train_fraction = o.fraction, .seed = o.seed});
        run.train_raw = std::move(train_raw);
        run.test_raw = std::move(test_raw);
    } else {
        run.train_raw = all;
    }
    svcnch::Standardized st = svcnch::standardize(run.train_raw, {});
    const svcnch::MaxMinConfig cfg = to_config(o);

    if (o.gram_precision == "f32") {
        auto pack = svcnch::build_gram<float>(st.train, {.gamma = cfg.gamma0, .c_reg = cfg.c_reg});
        run.result = svcnch::maxmin_train(st.train, pack, cfg);
    } else {
        auto pack = svcnch::build_gram<double>(st.train, {.gamma = cfg.gamma0, .c_reg = cfg.c_reg});
        run.result = svcnch::maxmin_train(st.train, pack, cfg);
    }
    run.model = svcnch::make_model(run.result.alpha, st.train,
                                   {.gamma = run.result.gamma, .c_reg = cfg.c_reg}, st.stats);
    return run;
}

void warn_outcome(const svcnch::MaxMinResult& r) {
    if (r.outcome == svcnch::MaxMinOutcome::kStalled) {
        std::cout << "WARN: gamma ascent stalled (halvings exhausted); returning best gamma found\n";
    } else if (r.outcome == svcnch::MaxMinOutcome::kEpochExhausted) {
        std::cout << "WARN: outer iteration budget exhausted before |f'(gamma)| tolerance\n";
    }
}

int cmd_train(const CommonOpts& o, const std::string& out_path, const std::string& trace_path) {
    std::cout << header_line("train", o, true) << "\n";
    const svcnch::TrainingSet all = svcnch::parse_libsvm(read_file(o.data_path));
    TrainedRun run = run_pipeline(all, o, true);

    const auto& trace = run.result.trace.iterations;
    const double final_grad = trace.empty() ? 0.0 : std::fabs(trace.back().grad_gamma);
    std::cout << "selected_gamma=" << run.result.gamma << " outer_iterations=" << trace.size()
              << " final_abs_grad=" << final_grad
              << " inner_solves=" << run.result.inner_solves << "\n";
    warn_outcome(run.result);

    const svcnch::EvalReport train_rep = svcnch::evaluate(run.model, run.train_raw);
    std::cout << "train_accuracy=" << train_rep.accuracy << "\n";
    if (run.test_raw.size() > 0) {
        std::cout << "test_accuracy=" << svcnch::evaluate(run.model, run.test_raw).accuracy << "\n";
    }

    if (!out_path.empty()) {
        std::ostringstream ss;
        svcnch::save_model(run.model, ss);
        write_file(out_path, ss.str());
        std::cout << "model_written=" << out_path << "\n";
    }
    if (!trace_path.empty()) {
        std::ostringstream ss;
        svcnch::write_trace_csv(run.result.trace, ss);
        write_file(trace_path, ss.str());
        std::cout << "trace_written=" << trace_path << "\n";
    }
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path, const std::string& out_path) {
    std::ifstream min(model_path, std::ios::binary);
    if (!min) throw svcnch::Error("cannot open '" + model_path + "'");
    const svcnch::SvcModel model = svcnch::load_model(min);

    const svcnch::RawRows rows = svcnch::parse_libsvm_rows(read_file(data_path));
    if (rows.dim > model.stats.dim()) {
        throw svcnch::DimensionError("data has " + std::to_string(rows.dim) + " features, model expects <= " +
                                     std::to_string(model.stats.dim()));
    }
    std::string out;
    for (const auto& feats : rows.features) {
        std::vector<double> x(static_cast<std::size_t>(model.stats.dim()), 0.0);
        for (const auto& [idx, val] : feats) x[static_cast<std::size_t>(idx) - 1] = val;
        out += svcnch::decide(x, model) > 0 ? "+1\n" : "-1\n";
    }
    write_file(out_path, out);
    std::cout << "predictions_written=" << out_path << " count=" << rows.features.size() << "\n";
    return 0;
}

struct Stats {
    double mean = 0.0;
    double stdev = 0.0;
};

Stats mean_std(const std::vector<double>& v) {
    Stats s;
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - s.mean) * (x - s.mean);
    s.stdev = std::sqrt(acc / static_cast<double>(v.size()));
    return s;
}

int cmd_eval(const CommonOpts& o, int repeats, const std::string& out_path, const std::string& baseline) {
    std::cout << header_line("eval", o, true) << " repeats=" << repeats << " baseline=" << baseline << "\n";
    const svcnch::TrainingSet all = svcnch::parse_libsvm(read_file(o.data_path));
    const bool with_cv = baseline == "cv";

    std::string csv = with_cv ? "repeat,seed,gamma,models,test_acc,bl_gamma,bl_c,bl_models,bl_test_acc\n"
                              : "repeat,seed,gamma,models,test_acc\n";
    std::vector<double> accs, models, bl_accs, bl_models;
    for (int r = 0; r < repeats; ++r) {
        CommonOpts ro = o;
        ro.seed = o.seed + static_cast<std::uint64_t>(r);
        TrainedRun run = run_pipeline(all, ro, true);
        const double acc = svcnch::evaluate(run.model, run.test_raw).accuracy;
        const double n_models = static_cast<double>(run.result.trace.iterations.size());
        accs.push_back(acc);
        models.push_back(n_models);

        std::ostringstream row;
        row << r << ',' << ro.seed << ',' << run.result.gamma << ',' << n_models << ',' << acc;

        if (with_cv) {
            auto [train_raw, test_raw] = svcnch::split(all, {.train_fraction = o.fraction, .seed = ro.seed});
            svcnch::CvConfig cv_cfg;
            cv_cfg.seed = ro.seed;
            cv_cfg.eps1 = o.eps1;
            cv_cfg.epoch_alpha = o.epoch_alpha;
            cv_cfg.solver = o.solver == "smo" ? svcnch::InnerSolver::kSmo : svcnch::InnerSolver::kPga;
            const svcnch::CvSelection sel = svcnch::cv_grid_search(train_raw, cv_cfg);

            svcnch::Standardized st = svcnch::standardize(train_raw, {});
            auto pack = svcnch::build_gram<double>(st.train, {.gamma = sel.gamma, .c_reg = sel.c_reg});
            const svcnch::AlphaState state =
                cv_cfg.solver == svcnch::InnerSolver::kPga
                    ? svcnch::pga_solve(st.train, pack, o.eps1, o.epoch_alpha)
                    : svcnch::smo_solve(st.train, pack, o.eps1, o.epoch_alpha);
            const svcnch::SvcModel bl_model =
                svcnch::make_model(state, st.train, {.gamma = sel.gamma, .c_reg = sel.c_reg}, st.stats);
            const double bl_acc = svcnch::evaluate(bl_model, test_raw).accuracy;
            bl_accs.push_back(bl_acc);
            bl_models.push_back(static_cast<double>(sel.models_trained));
            row << ',' << sel.gamma << ',' << sel.c_reg << ',' << sel.models_trained << ',' << bl_acc;
        }
        csv += row.str() + "\n";
        std::cout << "repeat=" << r << " seed=" << ro.seed << " gamma=" << run.result.gamma
                  << " models=" << n_models << " test_acc=" << acc << "\n";
    }

    const Stats acc_stats = mean_std(accs);
    const Stats model_stats = mean_std(models);
    std::cout << "maxmin: mean_acc=" << acc_stats.mean << " std_acc=" << acc_stats.stdev
              << " mean_models=" << model_stats.mean << "\n";
    if (with_cv) {
        const Stats bl_acc_stats = mean_std(bl_accs);
        const Stats bl_model_stats = mean_std(bl_models);
        std::cout << "cv_baseline: mean_acc=" << bl_acc_stats.mean << " std_acc=" << bl_acc_stats.stdev
                  << " mean_models=" << bl_model_stats.mean << "\n";
    }
    if (!out_path.empty()) {
        write_file(out_path, csv);
        std::cout << "csv_written=" << out_path << "\n";
    }
    return 0;
}

int cmd_bench(const CommonOpts& o) {
    std::cout << header_line("bench", o, false) << "\n";
    const svcnch::TrainingSet all = svcnch::parse_libsvm(read_file(o.data_path));
    svcnch::Standardized st = svcnch::standardize(all, {});
    auto pack = svcnch::build_gram<double>(st.train, {.gamma = o.gamma0, .c_reg = o.c_reg});

    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const svcnch::AlphaState pga = svcnch::pga_solve(st.train, pack, o.eps1, o.epoch_alpha);
    const auto t1 = clock::now();
    const svcnch::AlphaState smo = svcnch::smo_solve(st.train, pack, o.eps1, o.epoch_alpha);
    const auto t2 = clock::now();

    const auto ms = [](auto a, auto b) {
        return std::chrono::duration_cast<std::chrono::microseconds>(b - a).count() / 1000.0;
    };
    std::cout << "pga: iterations=" << pga.iterations << " converged=" << pga.converged
              << " objective=" << pga.obj << " wall_ms=" << ms(t0, t1) << "\n";
    std::cout << "smo: iterations=" << smo.iterations << " converged=" << smo.converged
              << " objective=" << smo.obj << " wall_ms=" << ms(t1, t2) << "\n";
    std::cout << "objective_abs_diff=" << std::fabs(pga.obj - smo.obj) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"support vector classification via closest points of two normal convex hulls, "
                 "with gradient-selected Gaussian kernel width"};
    app.require_subcommand(1);

    CommonOpts train_o, eval_o, bench_o;
    std::string model_out, trace_out, pred_model, pred_data, pred_out, eval_out;
    std::string baseline = "none";
    int repeats = 1;

    CLI::App* train = app.add_subcommand("train", "select gamma and train a model on a seeded split");
    add_common_flags(train, train_o, true);
    train->add_option("--out", model_out, "model file to write");
    train->add_option("--trace", trace_out, "gamma trace CSV to write");

    CLI::App* predict = app.add_subcommand("predict", "label a dataset with a trained model");
    predict->add_option("--model", pred_model, "model file")->required();
    predict->add_option("--data", pred_data, "input dataset")->required();
    predict->add_option("--out", pred_out, "output label file")->required();

    CLI::App* eval = app.add_subcommand("eval", "repeated seeded splits with mean/std summary");
    add_common_flags(eval, eval_o, true);
    eval->add_option("--repeats", repeats, "number of seeded splits")->check(CLI::PositiveNumber);
    eval->add_option("--out", eval_out, "per-split results CSV");
    eval->add_option("--baseline", baseline, "also run a baseline")->check(CLI::IsMember({"none", "cv"}));

    CLI::App* bench = app.add_subcommand("bench", "run both inner solvers at fixed gamma and compare");
    add_common_flags(bench, bench_o, false);

    CLI11_PARSE(app, argc, argv);

    try {
        std::cout.precision(12);
        if (train->parsed()) return cmd_train(train_o, model_out, trace_out);
        if (predict->parsed()) return cmd_predict(pred_model, pred_data, pred_out);
        if (eval->parsed()) return cmd_eval(eval_o, repeats, eval_out, baseline);
        if (bench->parsed()) return cmd_bench(bench_o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
