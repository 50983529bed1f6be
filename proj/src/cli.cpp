/*
 * Copyright 2026 The kcgflr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "kcgflr/cli.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>

#include <omp.h>

#include <CLI11.hpp>

#include "kcgflr/analysis.hpp"
#include "kcgflr/cg.hpp"
#include "kcgflr/error.hpp"
#include "kcgflr/gram.hpp"
#include "kcgflr/io.hpp"
#include "kcgflr/model.hpp"

namespace kcgflr {

namespace {

namespace fs = std::filesystem;
using io::json;

struct CommonOptions {
    std::string config;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

template <typename T>
T field_or(const json& doc, const char* key, std::string_view context, T fallback) {
    if (!doc.contains(key)) return fallback;
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidConfig(std::string(context) + "." + key, "wrong type");
    }
}

template <typename T>
T required(const json& doc, const char* key, std::string_view context) {
    if (!doc.contains(key)) throw InvalidConfig(std::string(context) + "." + key, "required field is missing");
    return field_or<T>(doc, key, context, T{});
}

json load_config(const fs::path& path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const IoError&) {
        throw InvalidConfig("--config", "cannot read config file " + path.string());
    }
    try {
        // Configs may carry // and /* */ comments.
        return json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw InvalidConfig("--config", path.string() + ": " + e.what());
    }
}

ModelParams parse_model(const json& doc) {
    if (!doc.is_object()) throw InvalidConfig("model", "expected an object");
    io::require_known_keys(doc, {"s", "alpha", "theta", "J", "omega", "sigma"}, "model");
    ModelParams p;
    p.s = field_or(doc, "s", "model", p.s);
    p.alpha = field_or(doc, "alpha", "model", p.alpha);
    p.theta = field_or(doc, "theta", "model", p.theta);
    p.J = field_or(doc, "J", "model", p.J);
    p.omega = field_or(doc, "omega", "model", p.omega);
    p.sigma = field_or(doc, "sigma", "model", p.sigma);
    try {
        build_model(p);
    } catch (const InvalidConfig& e) {
        throw InvalidConfig("model." + e.field(), e.what());
    }
    return p;
}

int run_simulate(const CommonOptions& opts, std::ostream& out) {
    const json cfg = load_config(opts.config);
    io::require_known_keys(cfg, {"model", "n", "seed", "stream"}, "");
    const ModelParams params = parse_model(cfg.value("model", json::object()));
    const auto n = required<std::size_t>(cfg, "n", "config");
    if (n < 1) throw InvalidConfig("n", "must be >= 1");
    const std::uint64_t seed = opts.seed.value_or(field_or<std::uint64_t>(cfg, "seed", "config", 0));
    const auto stream = field_or<std::uint64_t>(cfg, "stream", "config", 0);

    const Dataset data = sample_dataset(build_model(params), n, RngSpec{seed, stream, 0});
    const fs::path target = fs::path(opts.out_dir) / "dataset.json";
    io::write_dataset(data, target);
    out << "wrote " << target.string() << " (n=" << n << ", J=" << params.J << ")\n";
    return 0;
}

StoppingRule parse_rule(const json& doc, const Dataset& data) {
    if (!doc.is_object()) throw InvalidConfig("rule", "expected an object");
    const auto type = required<std::string>(doc, "type", "rule");
    if (type == "fixed") {
        io::require_known_keys(doc, {"type", "m"}, "rule");
        return FixedIterations{required<std::size_t>(doc, "m", "rule")};
    }
    if (type == "threshold") {
        io::require_known_keys(doc, {"type", "omega"}, "rule");
        const auto omega = required<double>(doc, "omega", "rule");
        if (!(omega > 0.0)) throw InvalidConfig("rule.omega", "must be positive");
        return Threshold{omega};
    }
    if (type == "theorem") {
        io::require_known_keys(doc, {"type", "tau", "alpha", "s"}, "rule");
        TheoremSchedule rule{field_or(doc, "tau", "rule", 1.0), field_or(doc, "alpha", "rule", data.params.alpha),
                             field_or(doc, "s", "rule", data.params.s)};
        if (!(rule.tau > 0.0)) throw InvalidConfig("rule.tau", "must be positive");
        if (!(rule.alpha > 0.0)) throw InvalidConfig("rule.alpha", "must be positive");
        if (!(rule.s > 0.0 && rule.s < 1.0)) throw InvalidConfig("rule.s", "must lie in (0, 1)");
        return rule;
    }
    throw InvalidConfig("rule.type", "must be one of fixed, threshold, theorem; got '" + type + "'");
}

int run_fit(const CommonOptions& opts, std::ostream& out) {
    const json cfg = load_config(opts.config);
    io::require_known_keys(cfg, {"dataset", "rule", "m_max", "reorthogonalize", "verify_psd"}, "");
    fs::path dataset_path = required<std::string>(cfg, "dataset", "config");
    if (dataset_path.is_relative()) dataset_path = fs::path(opts.config).parent_path() / dataset_path;
    Dataset data;
    try {
        data = io::read_dataset(dataset_path);
    } catch (const IoError&) {
        throw InvalidConfig("dataset", "cannot read dataset file " + dataset_path.string());
    } catch (const InvalidConfig& e) {
        throw InvalidConfig("dataset." + e.field(), std::string(e.what()) + " in " + dataset_path.string());
    }
    ModelParams kernel_params = data.params;
    // Kernel eigenvalues depend on s, theta and J only.
    kernel_params.alpha = 1.0;
    kernel_params.omega = 1.0;
    kernel_params.sigma = 0.0;
    SpectralModel kernel_model;
    try {
        kernel_model = build_model(kernel_params);
    } catch (const InvalidConfig& e) {
        throw InvalidConfig("dataset." + e.field(), e.what());
    }
    const StoppingRule rule = parse_rule(required<json>(cfg, "rule", "config"), data);
    IterationBudget budget;
    if (cfg.contains("m_max")) {
        budget.m_max = required<std::size_t>(cfg, "m_max", "config");
        if (*budget.m_max < 1) throw InvalidConfig("m_max", "must be >= 1");
    }
    budget.reorthogonalize = field_or(cfg, "reorthogonalize", "config", false);
    budget.verify_psd = field_or(cfg, "verify_psd", "config", true);

    const GramMatrix k = gram_spectral(data.xcoefs, kernel_model.t);
    const FitResult fit = cg_fit(k, data.y, rule, budget);
    const CoefVector beta_hat = predict_beta(data.xcoefs, kernel_model.t, fit.coeffs);

    json doc;
    doc["n"] = data.n();
    doc["m_star"] = fit.m_star;
    doc["stop_reason"] = std::string(to_string(fit.stop_reason));
    doc["trace"] = fit.trace;
    doc["coeffs"] = std::vector<double>(fit.coeffs.data(), fit.coeffs.data() + fit.coeffs.size());
    doc["beta_hat"] = std::vector<double>(beta_hat.coeffs().data(), beta_hat.coeffs().data() + beta_hat.size());
    if (const auto* t = std::get_if<TheoremSchedule>(&rule)) doc["omega"] = omega_threshold(t->tau, t->alpha, t->s, data.n());
    if (const auto* t = std::get_if<Threshold>(&rule)) doc["omega"] = t->omega;
    if (data.beta_star) doc["l2_error"] = l2_error(beta_hat, *data.beta_star);

    const fs::path target = fs::path(opts.out_dir) / "fit.json";
    io::write_file_atomic(target, doc.dump(1) + "\n");
    out << "wrote " << target.string() << " (m*=" << fit.m_star << ", " << to_string(fit.stop_reason) << ")\n";
    return 0;
}

int run_rate(const CommonOptions& opts, std::ostream& out) {
    const json cfg = load_config(opts.config);
    io::require_known_keys(cfg, {"model", "tau", "n_grid", "replications", "seed", "verify_psd"}, "");
    RateConfig rc;
    rc.model = parse_model(cfg.value("model", json::object()));
    rc.tau = field_or(cfg, "tau", "config", rc.tau);
    rc.n_grid = field_or(cfg, "n_grid", "config", rc.n_grid);
    rc.replications = field_or(cfg, "replications", "config", rc.replications);
    rc.seed = opts.seed.value_or(field_or(cfg, "seed", "config", rc.seed));
    rc.verify_psd = field_or(cfg, "verify_psd", "config", rc.verify_psd);
    validate(rc);

    const RateResult result = run_rate_experiment(rc, opts.threads.value_or(0));
    const fs::path dir(opts.out_dir);
    io::write_rate_csv(result, dir / "rate.csv");
    io::write_file_atomic(dir / "rate-summary.json", io::rate_summary_json(rc, result).dump(2) + "\n");
    out << "slope " << result.fit.slope << " (expected " << result.expected_slope << ")\n";
    for (const auto& s : result.per_n)
        out << "  n=" << s.n << " median_l2_error=" << s.median_l2_error << " median_m_star=" << s.median_m_star
            << "\n";
    out << "wrote " << (dir / "rate.csv").string() << " and " << (dir / "rate-summary.json").string() << "\n";
    return 0;
}

int run_effdim(const CommonOptions& opts, std::ostream& out) {
    const json cfg = load_config(opts.config);
    io::require_known_keys(cfg, {"s", "J", "lambdas"}, "");
    const auto s = required<double>(cfg, "s", "config");
    const auto J = required<std::size_t>(cfg, "J", "config");
    const auto lambdas = required<std::vector<double>>(cfg, "lambdas", "config");
    if (!(s > 0.0 && s < 1.0)) throw InvalidConfig("s", "must lie in (0, 1)");
    if (J < 1) throw InvalidConfig("J", "must be >= 1");
    for (double l : lambdas)
        if (!(l > 0.0)) throw InvalidConfig("lambdas", "every lambda must be positive");

    Eigen::VectorXd xi(static_cast<Eigen::Index>(J));
    for (Eigen::Index j = 0; j < xi.size(); ++j) xi[j] = std::pow(static_cast<double>(j + 1), -1.0 / s);
    std::string csv = "lambda,effective_dimension,scaled\n";
    for (double l : lambdas) {
        const double value = effective_dimension(xi, l);
        csv += io::format_double(l) + "," + io::format_double(value) + "," + io::format_double(value * std::pow(l, s)) +
               "\n";
    }
    const fs::path target = fs::path(opts.out_dir) / "effdim.csv";
    io::write_file_atomic(target, csv);
    out << "wrote " << target.string() << "\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kernel conjugate gradient for functional linear regression", "kcgflr"};
    app.require_subcommand(1);
    CommonOptions opts;
    std::uint64_t seed = 0;
    int threads = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config, "JSON config file")->required();
        cmd->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
        cmd->add_option("--seed", seed, "override the master seed");
        cmd->add_option("--threads", threads, "OpenMP threads")->check(CLI::PositiveNumber);
    };
    auto* simulate = app.add_subcommand("simulate", "sample a dataset from the spectral model");
    auto* fit = app.add_subcommand("fit", "fit the CG estimator to a dataset");
    auto* rate = app.add_subcommand("rate", "Monte Carlo convergence-rate experiment");
    auto* effdim = app.add_subcommand("effdim", "effective dimension of the simulated spectrum");
    for (auto* cmd : {simulate, fit, rate, effdim}) add_common(cmd);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    CLI::App* chosen = app.get_subcommands().front();
    if (chosen->count("--seed") > 0) opts.seed = seed;
    if (chosen->count("--threads") > 0) {
        opts.threads = threads;
        omp_set_num_threads(threads);
    }

    try {
        if (chosen == simulate) return run_simulate(opts, out);
        if (chosen == fit) return run_fit(opts, out);
        if (chosen == rate) return run_rate(opts, out);
        return run_effdim(opts, out);
    } catch (const InvalidConfig& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace kcgflr
