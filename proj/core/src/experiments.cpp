#include "garma/experiments.hpp"

#include "garma/errors.hpp"
#include "garma/model.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace garma {

namespace {

CovariateSchema trend_harmonic_schema() {
    CovariateSchema schema;
    schema.intercept = true;
    schema.trend = true;
    schema.trend_scale = 1.0;
    schema.periods = {12, 6};
    return schema;
}

Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

}  // namespace

SimScenario model1_scenario(std::size_t n, std::uint64_t seed) {
    SimScenario scn;
    scn.spec = ModelSpec{5, 0, 6, kDefaultClip};
    scn.params = ParamVector(vec({0.2, 0.001, 0.5, -0.5, 0.6, 0.7}),
                             vec({0.5, -0.6, 0.4, -0.6, 0.5}), Vector());
    scn.schema = trend_harmonic_schema();
    scn.n = n;
    scn.seed = seed;
    return scn;
}

SimScenario model2_scenario(std::size_t n, std::uint64_t seed) {
    SimScenario scn;
    scn.spec = ModelSpec{0, 2, 6, kDefaultClip};
    scn.params = ParamVector(vec({0.2, 0.01, 0.4, 0.5, 0.5, 0.5}), Vector(), vec({-0.5, 0.6}));
    scn.schema = trend_harmonic_schema();
    scn.n = n;
    scn.seed = seed;
    return scn;
}

SimScenario robustness_scenario(std::size_t n, std::uint64_t seed, double lag5) {
    SimScenario scn;
    scn.spec = ModelSpec{0, 5, 6, kDefaultClip};
    scn.params = ParamVector(vec({0.2, 0.01, 0.4, 0.5, 0.5, 0.5}), Vector(),
                             vec({-0.5, 0.6, 0.0, 0.0, lag5}));
    scn.schema = trend_harmonic_schema();
    scn.n = n;
    scn.seed = seed;
    return scn;
}

CovariateSchema polio_schema() {
    CovariateSchema schema;
    schema.intercept = true;
    schema.trend = false;
    schema.periods = {12, 6};
    return schema;
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                    }
                }
            });
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

double rmse(std::span<const Count> forecast, std::span<const Count> truth) {
    if (forecast.size() != truth.size() || forecast.empty()) {
        throw InvalidSpec("rmse: forecast and truth must be non-empty and equally long");
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        const double e = static_cast<double>(forecast[i] - truth[i]);
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(forecast.size()));
}

Count lower_median(std::vector<Count> values) {
    if (values.empty()) throw InvalidSpec("median of empty set");
    const std::size_t mid = (values.size() - 1) / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    return values[mid];
}

double median(std::vector<double> values) {
    if (values.empty()) throw InvalidSpec("median of empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

StudyResult aggregate(std::string scenario, const StudyConfig& cfg,
                      std::vector<ReplicateOutcome> outcomes) {
    StudyResult res;
    res.scenario = std::move(scenario);
    res.n = cfg.n;
    res.horizon = cfg.horizon;
    res.levels = cfg.levels;
    res.replicates = outcomes.size();
    res.seed = cfg.seed;

    std::vector<const ReplicateOutcome*> ok;
    for (const auto& o : outcomes) {
        if (o.failed) {
            ++res.failures;
            res.warnings.push_back("replicate " + std::to_string(o.index) + " failed: " + o.error);
        } else {
            ok.push_back(&o);
        }
    }
    if (ok.empty()) throw ForecastFailure("every replicate of study " + res.scenario + " failed");
    if (res.failures * 10 > res.replicates) {
        res.warnings.push_back("more than 10% of replicates failed (" +
                               std::to_string(res.failures) + "/" +
                               std::to_string(res.replicates) + ")");
    }

    const auto H = static_cast<std::size_t>(cfg.horizon);
    const std::size_t L = cfg.levels.size();
    res.median_point.resize(H);
    res.median_lower.assign(L, std::vector<Count>(H));
    res.median_upper.assign(L, std::vector<Count>(H));
    for (std::size_t h = 0; h < H; ++h) {
        std::vector<Count> pts;
        for (const auto* o : ok) pts.push_back(o->points[h]);
        res.median_point[h] = lower_median(std::move(pts));
        for (std::size_t l = 0; l < L; ++l) {
            std::vector<Count> lo, hi;
            for (const auto* o : ok) {
                lo.push_back(o->lower[l][h]);
                hi.push_back(o->upper[l][h]);
            }
            res.median_lower[l][h] = lower_median(std::move(lo));
            res.median_upper[l][h] = lower_median(std::move(hi));
        }
    }

    res.truth_first = ok.front()->truths;
    res.rmse_first_replicate = rmse(res.median_point, res.truth_first);
    double sum = 0.0;
    std::vector<double> own;
    for (const auto* o : ok) {
        sum += rmse(res.median_point, o->truths);
        own.push_back(o->rmse);
    }
    res.rmse = sum / static_cast<double>(ok.size());
    res.median_replicate_rmse = median(std::move(own));

    res.coverage.assign(L, 0);
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t h = 0; h < H; ++h) {
            const Count y = res.truth_first[h];
            if (y >= res.median_lower[l][h] && y <= res.median_upper[l][h]) ++res.coverage[l];
        }
    }
    res.outcomes = std::move(outcomes);
    return res;
}

namespace {

ReplicateOutcome run_replicate(const SimScenario& scn, const ModelSpec& fitted_spec,
                               const StudyConfig& cfg, std::size_t index) {
    ReplicateOutcome out;
    out.index = index;
    out.seed = scn.seed ^ (0x9E3779B97F4A7C15ULL * (index + 1));
    try {
        SimScenario full = scn;
        full.n = cfg.n + static_cast<std::size_t>(cfg.horizon);
        Rng rng = Rng::substream(scn.seed, index);
        const SimulatedSeries sim = simulate_with_path(full, rng);
        const SeriesFrame observed = sim.frame.head(cfg.n);
        out.truths.assign(sim.frame.counts.begin() + static_cast<std::ptrdiff_t>(cfg.n),
                          sim.frame.counts.end());
        const Matrix future_x = sim.frame.covariates.bottomRows(cfg.horizon);
        for (int h = 0; h < cfg.horizon; ++h) {
            out.true_next_lambda.push_back(sim.lambda[static_cast<Eigen::Index>(cfg.n) + h]);
        }

        const auto steps = rolling_forecast(fitted_spec, observed, cfg.horizon, out.truths,
                                            future_x, cfg.levels, cfg.fit, cfg.trunc);
        const std::size_t L = cfg.levels.size();
        out.lower.assign(L, {});
        out.upper.assign(L, {});
        for (const auto& step : steps) {
            out.points.push_back(step.point);
            for (std::size_t l = 0; l < L; ++l) {
                out.lower[l].push_back(step.regions[l].lower());
                out.upper[l].push_back(step.regions[l].upper());
            }
        }
        out.rmse = rmse(out.points, out.truths);
    } catch (const Error& e) {
        out.failed = true;
        out.error = e.what();
    }
    return out;
}

}  // namespace

StudyResult scenario_study(const std::string& name, const SimScenario& scn, const StudyConfig& cfg,
                           const std::optional<ModelSpec>& fitted_spec) {
    if (cfg.replicates < 1) throw InvalidSpec("study needs at least one replicate");
    if (cfg.horizon < 1) throw InvalidSpec("study horizon must be >= 1");
    for (double level : cfg.levels) {
        if (!(level > 0.0 && level < 1.0)) throw InvalidSpec("HDR levels must lie in (0,1)");
    }
    const ModelSpec spec = fitted_spec.value_or(scn.spec);
    std::vector<ReplicateOutcome> outcomes(cfg.replicates);
    parallel_for(cfg.replicates, cfg.threads, [&](std::size_t i) {
        outcomes[i] = run_replicate(scn, spec, cfg, i);
    });
    return aggregate(name, cfg, std::move(outcomes));
}

StudyResult simulation_study(int model_id, const StudyConfig& cfg) {
    switch (model_id) {
        case 1:
            return scenario_study("sim1", model1_scenario(cfg.n, cfg.seed), cfg);
        case 2:
            return scenario_study("sim2", model2_scenario(cfg.n, cfg.seed), cfg);
        default:
            throw InvalidSpec("simulation model id must be 1 or 2");
    }
}

PolioReport polio_study(const SeriesFrame& polio, std::size_t fit_length, int horizon,
                        const std::vector<double>& levels, const FitOptions& fit_opts,
                        const TruncationRule& trunc) {
    if (horizon < 1) throw InvalidSpec("polio horizon must be >= 1");
    if (polio.size() < fit_length + static_cast<std::size_t>(horizon)) {
        throw IngestionError("polio series has " + std::to_string(polio.size()) +
                             " counts; need fit_length + horizon = " +
                             std::to_string(fit_length + static_cast<std::size_t>(horizon)));
    }
    const CovariateSchema schema = polio_schema();
    SeriesFrame full = polio;
    full.covariates = schema.build(polio.size(), polio.time_origin);

    const ModelSpec spec{0, 2, schema.dim(), kDefaultClip};
    const SeriesFrame observed = full.head(fit_length);

    PolioReport report;
    report.coefficient_names = schema.column_names();
    report.coefficient_names.emplace_back("MA(1)");
    report.coefficient_names.emplace_back("MA(2)");
    report.fit = fit(spec, observed, fit_opts);

    StudyConfig cfg;
    cfg.n = fit_length;
    cfg.horizon = horizon;
    cfg.levels = levels;
    cfg.replicates = 1;
    cfg.seed = 0;

    ReplicateOutcome out;
    out.truths.assign(full.counts.begin() + static_cast<std::ptrdiff_t>(fit_length),
                      full.counts.begin() + static_cast<std::ptrdiff_t>(fit_length) + horizon);
    const Matrix future_x =
        full.covariates.middleRows(static_cast<Eigen::Index>(fit_length), horizon);
    PlOptions pl;
    if (report.fit.converged) pl.base_init = report.fit.params;
    const auto steps =
        rolling_forecast(spec, observed, horizon, out.truths, future_x, levels, fit_opts, trunc, pl);
    out.lower.assign(levels.size(), {});
    out.upper.assign(levels.size(), {});
    for (const auto& step : steps) {
        out.points.push_back(step.point);
        for (std::size_t l = 0; l < levels.size(); ++l) {
            out.lower[l].push_back(step.regions[l].lower());
            out.upper[l].push_back(step.regions[l].upper());
        }
    }
    out.rmse = rmse(out.points, out.truths);
    std::vector<ReplicateOutcome> outcomes;
    outcomes.push_back(std::move(out));
    report.forecasts = aggregate("polio", cfg, std::move(outcomes));
    return report;
}

RobustnessResult robustness_study(const StudyConfig& cfg, double lag5) {
    const SimScenario scn = robustness_scenario(cfg.n, cfg.seed, lag5);
    ModelSpec misspec = scn.spec;
    misspec.q = 2;

    RobustnessResult res;
    res.lag5 = lag5;
    res.true_model = scenario_study("robustness-true", scn, cfg);
    res.misspecified = scenario_study("robustness-misspecified", scn, cfg, misspec);

    auto captures = [&](const StudyResult& study) {
        std::vector<std::size_t> hits(cfg.levels.size(), 0);
        for (const auto& o : study.outcomes) {
            if (o.failed) continue;
            for (std::size_t l = 0; l < cfg.levels.size(); ++l) {
                for (std::size_t h = 0; h < o.truths.size(); ++h) {
                    if (o.truths[h] >= o.lower[l][h] && o.truths[h] <= o.upper[l][h]) ++hits[l];
                }
            }
        }
        return hits;
    };
    res.true_captures = captures(res.true_model);
    res.misspecified_captures = captures(res.misspecified);
    return res;
}

TwoStepReport two_step_study(std::size_t n, std::uint64_t seed, const std::vector<double>& levels,
                             const FitOptions& fit_opts, const TruncationRule& trunc,
                             const PlOptions& pl) {
    SimScenario scn = model1_scenario(n + 2, seed);
    const SeriesFrame full = simulate(scn);
    const SeriesFrame observed = full.head(n);

    const auto start = std::chrono::steady_clock::now();
    TwoStepReport report;
    report.n = n;
    report.seed = seed;
    report.truth = full.counts[n + 1];
    report.dist = m_step_pl(scn.spec, observed, full.covariates.bottomRows(2), 2, fit_opts, trunc, pl);
    report.point = point_forecast(report.dist);
    for (double level : levels) report.regions.push_back(hdr(report.dist, level));
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace garma
