#include "cli.hpp"

#include "garma/errors.hpp"
#include "garma/estimator.hpp"
#include "garma/experiments.hpp"
#include "garma/forecaster.hpp"
#include "garma/io.hpp"
#include "garma/simulator.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace garma::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

struct NotConverged : Error {
    using Error::Error;
};

struct ModelFlags {
    std::vector<int> garma{0, 0};
    std::vector<int> harmonics;
    bool trend = false;
    double trend_scale = 1.0;
    bool no_intercept = false;
    double clip = kDefaultClip;
    int max_iter = 200;
    double tol = 1e-8;
    std::size_t fit_length = 0;  // 0 = every row

    void add(CLI::App& app) {
        app.add_option("--garma", garma, "AR and MA orders p q")->expected(2);
        app.add_option("--harmonics", harmonics, "harmonic periods (adds cos/sin pairs)");
        app.add_flag("--trend", trend, "add a linear trend column");
        app.add_option("--trend-scale", trend_scale, "multiplier on t in the trend column");
        app.add_flag("--no-intercept", no_intercept, "drop the intercept column");
        app.add_option("--clip", clip, "threshold c in y* = max(y, c)");
        app.add_option("--max-iter", max_iter, "Fisher scoring iteration cap");
        app.add_option("--tol", tol, "score norm tolerance");
        app.add_option("--fit-length", fit_length, "use only the first N rows for fitting");
    }

    bool schema_requested() const { return !harmonics.empty() || trend || no_intercept; }

    CovariateSchema schema() const {
        CovariateSchema s;
        s.intercept = !no_intercept;
        s.trend = trend;
        s.trend_scale = trend_scale;
        s.periods = harmonics;
        s.validate();
        return s;
    }

    FitOptions fit_options() const {
        FitOptions o;
        o.max_iterations = max_iter;
        o.gradient_tolerance = tol;
        o.validate();
        return o;
    }
};

struct TruncFlags {
    double floor = 1e-6;
    int patience = 3;
    int hard_cap = 500;

    void add(CLI::App& app) {
        app.add_option("--floor", floor, "relative mass floor for candidate enumeration");
        app.add_option("--patience", patience, "sub-floor candidates tolerated past the mode");
        app.add_option("--hard-cap", hard_cap, "maximum candidate values per coordinate");
    }

    TruncationRule rule() const {
        TruncationRule r{floor, patience, hard_cap};
        r.validate();
        return r;
    }
};

/// Data loaded for fit/forecast: full table plus the design actually used.
struct Prepared {
    io::SeriesTable table;
    SeriesFrame full;  // every row, covariates resolved
    std::vector<std::string> names;
    std::optional<CovariateSchema> schema;
    ModelSpec spec;
    std::size_t fit_length = 0;

    SeriesFrame fit_frame() const { return full.head(fit_length); }
};

Prepared prepare(const std::string& input, const ModelFlags& mf) {
    Prepared p;
    p.table = io::read_series_csv(fs::path(input));
    p.full = p.table.frame();
    if (mf.schema_requested() || p.table.covariate_names.empty()) {
        p.schema = mf.schema();
        p.full.covariates = p.schema->build(p.full.size(), p.full.time_origin);
        p.names = p.schema->column_names();
    } else {
        p.names = p.table.covariate_names;
    }
    p.spec.p = mf.garma[0];
    p.spec.q = mf.garma[1];
    p.spec.k = static_cast<int>(p.full.covariates.cols());
    p.spec.c = mf.clip;
    p.spec.validate();
    for (int j = 1; j <= p.spec.p; ++j) p.names.push_back("AR(" + std::to_string(j) + ")");
    for (int j = 1; j <= p.spec.q; ++j) p.names.push_back("MA(" + std::to_string(j) + ")");
    p.fit_length = mf.fit_length == 0 ? p.full.size() : mf.fit_length;
    if (p.fit_length > p.full.size()) {
        throw ValidationError("--fit-length " + std::to_string(p.fit_length) + " exceeds the " +
                              std::to_string(p.full.size()) + " rows of " + input);
    }
    return p;
}

std::optional<fs::path> output_dir(const std::string& flag) {
    if (!flag.empty()) return fs::path(flag);
    if (const char* env = std::getenv("GARMA_OUTPUT_DIR"); env && *env) return fs::path(env);
    return std::nullopt;
}

std::ofstream open_file(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw IngestionError("cannot write " + path.string());
    return f;
}

void write_json(const fs::path& path, const Json& j) { open_file(path) << j.dump(2) << '\n'; }

std::string format_region(const HdrRegion& r) { return io::format_set(r); }

std::string level_label(double level) {
    std::ostringstream ss;
    ss << level * 100.0 << "% HDR";
    return ss.str();
}

void validate_levels(const std::vector<double>& levels) {
    if (levels.empty()) throw InvalidSpec("at least one HDR level is required");
    for (double l : levels) {
        if (!(l > 0.0 && l < 1.0)) throw InvalidSpec("HDR level must lie in (0,1)");
    }
}

void print_fit(std::ostream& out, const FittedModel& fitted, const std::vector<std::string>& names,
               std::size_t n) {
    out << "Poisson GARMA(" << fitted.spec.p << "," << fitted.spec.q << ") fit on " << n
        << " observations\n";
    out << std::left << std::setw(16) << "term" << std::right << std::setw(12) << "estimate"
        << std::setw(12) << "std.error" << '\n';
    const Vector flat = fitted.params.flatten();
    out << std::fixed << std::setprecision(3);
    for (Eigen::Index i = 0; i < flat.size(); ++i) {
        out << std::left << std::setw(16) << names[static_cast<std::size_t>(i)] << std::right
            << std::setw(12) << flat[i] << std::setw(12) << fitted.std_errors[i] << '\n';
    }
    out << "deviance (saturated)  " << fitted.deviance << '\n';
    out << "-2 log likelihood     " << fitted.neg2_loglik() << '\n';
    out << "converged             " << (fitted.converged ? "yes" : "no") << " after "
        << fitted.iterations << " iterations\n";
    out.unsetf(std::ios::floatfield);
    for (const auto& w : fitted.warnings) out << "warning: " << w << '\n';
}

// ---- fit ------------------------------------------------------------------

struct FitCmd {
    std::string input;
    ModelFlags model;
    std::string out_dir;
    bool json = false;
};

int cmd_fit(const FitCmd& c, std::ostream& out) {
    const Prepared p = prepare(c.input, c.model);
    const SeriesFrame frame = p.fit_frame();
    const FittedModel fitted = fit(p.spec, frame, c.model.fit_options());
    Json j = io::to_json(fitted, p.names);
    j["input"] = c.input;
    j["n"] = frame.size();
    if (c.json) {
        out << j.dump(2) << '\n';
    } else {
        print_fit(out, fitted, p.names, frame.size());
    }
    if (auto dir = output_dir(c.out_dir)) write_json(*dir / "fit.json", j);
    if (!fitted.converged) throw NotConverged("Fisher scoring did not converge");
    return kOk;
}

// ---- forecast -------------------------------------------------------------

struct ForecastCmd {
    std::string input;
    ModelFlags model;
    TruncFlags trunc;
    int horizon = 1;
    int m_step = 0;
    std::vector<double> levels{0.5, 0.75};
    std::string future_covariates;
    std::string out_dir;
    bool json = false;
};

Matrix future_rows(const Prepared& p, const std::string& path, std::size_t count) {
    const std::size_t n = p.fit_length;
    if (!path.empty()) {
        Matrix m = io::read_matrix_csv(fs::path(path));
        if (static_cast<std::size_t>(m.rows()) < count || m.cols() != p.spec.k) {
            throw ValidationError("--future-covariates needs " + std::to_string(count) +
                                  " rows of " + std::to_string(p.spec.k) + " columns");
        }
        return m.topRows(static_cast<Eigen::Index>(count));
    }
    if (p.schema) {
        return p.schema->build(count, p.full.time_origin + static_cast<int>(n));
    }
    if (p.full.size() < n + count) {
        throw ValidationError("CSV covariates end before the forecast horizon; pass --future-covariates");
    }
    return p.full.covariates.middleRows(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(count));
}

int cmd_forecast(const ForecastCmd& c, std::ostream& out) {
    validate_levels(c.levels);
    const Prepared p = prepare(c.input, c.model);
    const SeriesFrame frame = p.fit_frame();
    const FitOptions opts = c.model.fit_options();
    const TruncationRule rule = c.trunc.rule();
    const auto dir = output_dir(c.out_dir);

    Json report;
    report["input"] = c.input;
    report["n"] = frame.size();
    report["model"] = {{"p", p.spec.p}, {"q", p.spec.q}, {"k", p.spec.k}, {"c", p.spec.c}};
    report["levels"] = c.levels;

    if (c.m_step > 0) {
        const Matrix fx = future_rows(p, c.future_covariates, static_cast<std::size_t>(c.m_step));
        const ForecastDistribution dist = m_step_pl(p.spec, frame, fx, c.m_step, opts, rule);
        Json block = io::to_json(dist, c.levels);
        const std::size_t target = frame.size() + static_cast<std::size_t>(c.m_step) - 1;
        std::optional<Count> truth;
        if (target < p.full.size()) truth = p.full.counts[target];
        block["truth"] = truth ? Json(*truth) : Json(nullptr);
        report["m_step"] = c.m_step;
        report["forecast"] = block;

        if (c.json) {
            out << report.dump(2) << '\n';
        } else {
            out << c.m_step << "-step forecast (" << dist.refits << " lattice refits)\n";
            io::write_two_step_table(out, dist, c.levels, target + 1, truth);
        }
        if (dir) {
            write_json(*dir / "forecast.json", report);
            auto f = open_file(*dir / "forecast_distribution.csv");
            io::write_distribution_csv(f, dist, c.levels);
        }
        return kOk;
    }

    if (c.horizon < 1) throw InvalidSpec("--horizon must be >= 1");
    const auto h = static_cast<std::size_t>(c.horizon);
    const std::size_t available = p.full.size() - frame.size();
    if (h > 1 && available < h - 1) {
        throw ValidationError("rolling forecasts over " + std::to_string(h) + " steps need " +
                              std::to_string(h - 1) + " realized counts after the fit window; " +
                              "use --fit-length or --m-step");
    }
    const std::size_t nfuture = std::min(available, h);
    const std::vector<Count> future(p.full.counts.begin() + static_cast<std::ptrdiff_t>(frame.size()),
                                    p.full.counts.begin() +
                                        static_cast<std::ptrdiff_t>(frame.size() + nfuture));
    const Matrix fx = future_rows(p, c.future_covariates, h);
    const auto steps = rolling_forecast(p.spec, frame, c.horizon, future, fx, c.levels, opts, rule);

    Json js = Json::array();
    std::vector<Count> points, truths;
    for (const auto& s : steps) {
        js.push_back(io::to_json(s));
        if (s.truth) {
            points.push_back(s.point);
            truths.push_back(*s.truth);
        }
    }
    report["horizon"] = c.horizon;
    report["steps"] = js;
    report["rmse"] = truths.empty() ? Json(nullptr) : Json(rmse(points, truths));

    if (c.json) {
        out << report.dump(2) << '\n';
    } else {
        out << std::setw(6) << "t" << std::setw(6) << "Yhat";
        for (double l : c.levels) out << std::setw(16) << level_label(l);
        out << std::setw(8) << "Y" << '\n';
        for (std::size_t i = 0; i < steps.size(); ++i) {
            out << std::setw(6) << frame.time_origin + frame.size() + i + 1 << std::setw(6)
                << steps[i].point;
            for (const auto& r : steps[i].regions) out << std::setw(16) << format_region(r);
            out << std::setw(8) << (steps[i].truth ? std::to_string(*steps[i].truth) : "-") << '\n';
        }
        if (!truths.empty()) out << "RMSE " << rmse(points, truths) << '\n';
    }
    if (dir) {
        write_json(*dir / "forecast.json", report);
        for (std::size_t i = 0; i < steps.size(); ++i) {
            auto f = open_file(*dir / ("forecast_step" + std::to_string(i + 1) + ".csv"));
            io::write_distribution_csv(f, steps[i].dist, c.levels);
        }
    }
    return kOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateCmd {
    std::string scenario;
    int model = 0;
    std::optional<std::size_t> n;
    std::optional<std::uint64_t> seed;
    std::string out_file;
};

int cmd_simulate(const SimulateCmd& c, std::ostream& out) {
    SimScenario scn;
    if (!c.scenario.empty()) {
        scn = io::scenario_from_json(io::read_json(fs::path(c.scenario)));
    } else if (c.model == 1) {
        scn = model1_scenario(100, 0);
    } else if (c.model == 2) {
        scn = model2_scenario(100, 0);
    } else {
        throw InvalidSpec("simulate needs --scenario FILE or --model 1|2");
    }
    if (c.n) scn.n = *c.n;
    if (c.seed) scn.seed = *c.seed;
    scn.validate();

    const SeriesFrame frame = simulate(scn);
    const std::vector<std::string> comments{
        "garma simulate seed=" + std::to_string(scn.seed) + " n=" + std::to_string(scn.n),
        "scenario " + io::to_json(scn).dump()};
    if (c.out_file.empty()) {
        io::write_series_csv(out, frame, scn.schema.column_names(), comments);
    } else {
        auto f = open_file(fs::path(c.out_file));
        io::write_series_csv(f, frame, scn.schema.column_names(), comments);
    }
    return kOk;
}

// ---- study ----------------------------------------------------------------

struct StudyCmd {
    std::string id;
    std::optional<std::size_t> n;
    bool smoke = false;
    std::optional<std::size_t> replicates;
    std::uint64_t seed = StudyConfig{}.seed;
    int horizon = 10;
    std::vector<double> levels{0.5, 0.75};
    std::string out_dir;
    unsigned threads = 0;
    std::string data = GARMAPL_DEFAULT_POLIO;
    std::size_t fit_length = 158;
    double lag5 = 0.01;
    TruncFlags trunc;
};

Json seed_registry(const std::string& id, std::uint64_t master,
                   const std::vector<const StudyResult*>& studies) {
    Json j;
    j["study"] = id;
    j["master_seed"] = master;
    j["replicate_seed_rule"] = "xoshiro256** seeded by splitmix64(master ^ 0x9E3779B97F4A7C15*(i+1))";
    Json reps = Json::array();
    if (!studies.empty()) {
        for (const auto& o : studies.front()->outcomes) {
            reps.push_back({{"index", o.index}, {"seed", o.seed}});
        }
    }
    j["replicates"] = reps;
    return j;
}

void write_replicates_csv(const fs::path& path, const StudyResult& s) {
    auto f = open_file(path);
    f << "index,seed,failed,rmse\n" << std::setprecision(17);
    for (const auto& o : s.outcomes) {
        f << o.index << ',' << o.seed << ',' << (o.failed ? 1 : 0) << ',' << o.rmse << '\n';
    }
}

void print_study(std::ostream& out, const StudyResult& s) {
    out << s.scenario << ": n=" << s.n << " replicates=" << s.replicates
        << " failures=" << s.failures << '\n';
    out << std::setw(6) << "step" << std::setw(8) << "truth" << std::setw(8) << "Yhat";
    for (double l : s.levels) out << std::setw(16) << level_label(l);
    out << '\n';
    for (int h = 0; h < s.horizon; ++h) {
        const auto hs = static_cast<std::size_t>(h);
        out << std::setw(6) << h + 1 << std::setw(8) << s.truth_first[hs] << std::setw(8)
            << s.median_point[hs];
        for (std::size_t l = 0; l < s.levels.size(); ++l) {
            std::ostringstream r;
            r << '[' << s.median_lower[l][hs] << ", " << s.median_upper[l][hs] << ']';
            out << std::setw(16) << r.str();
        }
        out << '\n';
    }
    out << "RMSE (mean over replicates)   " << s.rmse << '\n';
    out << "RMSE (replicate 0 truth)      " << s.rmse_first_replicate << '\n';
    out << "RMSE (median per replicate)   " << s.median_replicate_rmse << '\n';
    for (const auto& w : s.warnings) out << "warning: " << w << '\n';
}

int cmd_study(const StudyCmd& c, std::ostream& out) {
    validate_levels(c.levels);
    const fs::path dir = output_dir(c.out_dir).value_or(fs::path("garma_out")) / c.id;
    StudyConfig cfg;
    cfg.n = c.n.value_or(100);
    cfg.replicates = c.replicates.value_or(c.smoke ? 50 : 1000);
    cfg.horizon = c.horizon;
    cfg.seed = c.seed;
    cfg.levels = c.levels;
    cfg.threads = c.threads;
    cfg.trunc = c.trunc.rule();
    if (cfg.horizon < 1) throw InvalidSpec("--horizon must be >= 1");
    if (cfg.replicates < 1) throw InvalidSpec("--replicates must be >= 1");

    if (c.id == "sim1" || c.id == "sim2") {
        const StudyResult s = simulation_study(c.id == "sim1" ? 1 : 2, cfg);
        print_study(out, s);
        write_json(dir / "study.json", io::to_json(s));
        auto f = open_file(dir / "figure.csv");
        io::write_study_csv(f, s);
        write_replicates_csv(dir / "replicates.csv", s);
        write_json(dir / "seeds.json", seed_registry(c.id, cfg.seed, {&s}));
    } else if (c.id == "polio") {
        const io::SeriesTable table = io::read_series_csv(fs::path(c.data));
        const SeriesFrame frame = table.frame_with(polio_schema().build(table.counts.size(), 0));
        const PolioReport rep =
            polio_study(frame, c.fit_length, cfg.horizon, cfg.levels, cfg.fit, cfg.trunc);
        print_fit(out, rep.fit, rep.coefficient_names, c.fit_length);
        print_study(out, rep.forecasts);
        Json fj = io::to_json(rep.fit, rep.coefficient_names);
        fj["n"] = c.fit_length;
        fj["data"] = c.data;
        write_json(dir / "fit.json", fj);
        write_json(dir / "study.json", io::to_json(rep.forecasts));
        auto f = open_file(dir / "figure.csv");
        io::write_study_csv(f, rep.forecasts);
        write_json(dir / "seeds.json", seed_registry(c.id, 0, {}));
        if (!rep.fit.converged) throw NotConverged("polio fit did not converge");
    } else if (c.id == "robustness") {
        const RobustnessResult r = robustness_study(cfg, c.lag5);
        print_study(out, r.true_model);
        print_study(out, r.misspecified);
        Json j;
        j["lag5"] = r.lag5;
        j["true_model"] = io::to_json(r.true_model);
        j["misspecified"] = io::to_json(r.misspecified);
        j["true_captures"] = r.true_captures;
        j["misspecified_captures"] = r.misspecified_captures;
        write_json(dir / "robustness.json", j);
        auto f1 = open_file(dir / "figure_true.csv");
        io::write_study_csv(f1, r.true_model);
        auto f2 = open_file(dir / "figure_misspecified.csv");
        io::write_study_csv(f2, r.misspecified);
        write_json(dir / "seeds.json", seed_registry(c.id, cfg.seed, {&r.true_model}));
    } else if (c.id == "two-step") {
        const TwoStepReport rep = two_step_study(cfg.n, cfg.seed, cfg.levels, cfg.fit, cfg.trunc);
        out << "two-step forecast, Model 1, n=" << rep.n << " seed=" << rep.seed << " ("
            << rep.seconds << " s, " << rep.dist.refits << " refits)\n";
        io::write_two_step_table(out, rep.dist, cfg.levels, rep.n + 2, rep.truth);
        write_json(dir / "two_step.json", io::to_json(rep));
        auto t = open_file(dir / "two_step_table.csv");
        t << "y,yhat";
        for (const auto& r : rep.regions) t << ",hdr_" << r.level;
        t << '\n' << rep.truth << ',' << rep.point;
        for (const auto& r : rep.regions) t << ",\"" << format_region(r) << '"';
        t << '\n';
        auto d = open_file(dir / "distribution.csv");
        io::write_distribution_csv(d, rep.dist, cfg.levels);
        Json seeds;
        seeds["study"] = c.id;
        seeds["seed"] = rep.seed;
        write_json(dir / "seeds.json", seeds);
    } else {
        throw InvalidSpec("unknown study '" + c.id + "'");
    }
    out << "outputs written to " << dir.string() << '\n';
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Poisson GARMA fitting and profile predictive likelihood forecasting", "garma"};
    app.require_subcommand(1);

    FitCmd fit_c;
    auto* fit_app = app.add_subcommand("fit", "fit a Poisson GARMA model to a count series");
    fit_app->add_option("input", fit_c.input, "CSV with columns time,count[,covariates]")->required();
    fit_c.model.add(*fit_app);
    fit_app->add_option("--out", fit_c.out_dir, "output directory (default $GARMA_OUTPUT_DIR)");
    fit_app->add_flag("--json", fit_c.json, "print the JSON report instead of a table");

    ForecastCmd fc_c;
    auto* fc_app = app.add_subcommand("forecast", "profile predictive likelihood forecasts");
    fc_app->add_option("input", fc_c.input, "CSV with columns time,count[,covariates]")->required();
    fc_c.model.add(*fc_app);
    fc_c.trunc.add(*fc_app);
    fc_app->add_option("--horizon", fc_c.horizon, "rolling one-step forecasts to produce");
    fc_app->add_option("--m-step", fc_c.m_step, "forecast y_{n+m} directly from the lattice");
    fc_app->add_option("--hdr", fc_c.levels, "HDR levels");
    fc_app->add_option("--future-covariates", fc_c.future_covariates, "CSV of future covariate rows");
    fc_app->add_option("--out", fc_c.out_dir, "output directory (default $GARMA_OUTPUT_DIR)");
    fc_app->add_flag("--json", fc_c.json, "print the JSON report instead of a table");

    SimulateCmd sim_c;
    auto* sim_app = app.add_subcommand("simulate", "simulate a Poisson GARMA series");
    sim_app->add_option("--scenario", sim_c.scenario, "scenario JSON file");
    sim_app->add_option("--model", sim_c.model, "built-in scenario 1 or 2")->check(CLI::Range(1, 2));
    sim_app->add_option("--n", sim_c.n, "series length");
    sim_app->add_option("--seed", sim_c.seed, "generator seed");
    sim_app->add_option("--out", sim_c.out_file, "output CSV (default stdout)");

    StudyCmd st_c;
    auto* st_app = app.add_subcommand("study", "reproduce a study");
    st_app->add_option("id", st_c.id, "sim1 | sim2 | polio | robustness | two-step")
        ->required()
        ->check(CLI::IsMember({"sim1", "sim2", "polio", "robustness", "two-step"}));
    st_app->add_option("--n", st_c.n, "observed series length");
    st_app->add_flag("--smoke", st_c.smoke, "50 replicates instead of 1000");
    st_app->add_option("--replicates", st_c.replicates, "number of replicates");
    st_app->add_option("--seed", st_c.seed, "master seed");
    st_app->add_option("--horizon", st_c.horizon, "forecast horizon");
    st_app->add_option("--hdr", st_c.levels, "HDR levels");
    st_app->add_option("--out", st_c.out_dir, "output directory (default $GARMA_OUTPUT_DIR or ./garma_out)");
    st_app->add_option("--threads", st_c.threads, "worker threads (0 = all cores)");
    st_app->add_option("--data", st_c.data, "polio CSV");
    st_app->add_option("--fit-length", st_c.fit_length, "polio points used for fitting");
    st_app->add_option("--lag5", st_c.lag5, "MA(5) coefficient of the robustness scenario");
    st_c.trunc.add(*st_app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*fit_app) return cmd_fit(fit_c, out);
        if (*fc_app) return cmd_forecast(fc_c, out);
        if (*sim_app) return cmd_simulate(sim_c, out);
        if (*st_app) return cmd_study(st_c, out);
    } catch (const NotConverged& e) {
        err << "error: " << e.what() << '\n';
        return kNotConverged;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kNumeric;
    } catch (const BudgetExceeded& e) {
        err << "numeric error: " << e.what() << '\n';
        return kNumeric;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace garma::cli
