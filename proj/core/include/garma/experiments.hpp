#pragma once

#include "garma/estimator.hpp"
#include "garma/forecaster.hpp"
#include "garma/simulator.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace garma {

/// GARMA(5,0) with intercept, trend and harmonics of period 12 and 6.
[[nodiscard]] SimScenario model1_scenario(std::size_t n, std::uint64_t seed);
/// GARMA(0,2) with intercept, trend and harmonics of period 12 and 6.
[[nodiscard]] SimScenario model2_scenario(std::size_t n, std::uint64_t seed);
/// GARMA(0,5) of the misspecification study; theta = (-0.5, 0.6, 0, 0, lag5).
[[nodiscard]] SimScenario robustness_scenario(std::size_t n, std::uint64_t seed, double lag5 = 0.01);

/// Intercept plus harmonic pairs of period 12 and 6, no trend.
[[nodiscard]] CovariateSchema polio_schema();

struct StudyConfig {
    std::size_t n = 100;
    std::size_t replicates = 1000;
    int horizon = 10;
    std::uint64_t seed = 20240601;
    std::vector<double> levels{0.5, 0.75};
    FitOptions fit;
    TruncationRule trunc;
    unsigned threads = 0;  // 0 = hardware concurrency
};

struct ReplicateOutcome {
    std::size_t index = 0;
    std::uint64_t seed = 0;  // first word fed to the replicate's generator
    bool failed = false;
    std::string error;
    std::vector<Count> truths;
    std::vector<Count> points;
    std::vector<std::vector<Count>> lower;  // [level][step]
    std::vector<std::vector<Count>> upper;  // [level][step]
    std::vector<double> true_next_lambda;   // lambda_{n+h} at the true parameters, per step
    double rmse = 0.0;                      // own point forecasts vs own truths
};

/**
 * Aggregated rolling-forecast study.
 *
 * Per step h the median point forecast and the medians of the HDR lower and
 * upper bounds are taken over successful replicates (lower median when the
 * count is even). Three RMSE summaries are kept:
 *   rmse                   mean over replicates of RMSE(median forecasts, replicate truth)
 *   rmse_first_replicate   RMSE(median forecasts, truth of replicate 0)
 *   median_replicate_rmse  median over replicates of each replicate's own RMSE
 */
struct StudyResult {
    std::string scenario;
    std::size_t n = 0;
    int horizon = 0;
    std::vector<double> levels;
    std::size_t replicates = 0;
    std::size_t failures = 0;
    std::uint64_t seed = 0;

    std::vector<Count> truth_first;
    std::vector<Count> median_point;
    std::vector<std::vector<Count>> median_lower;  // [level][step]
    std::vector<std::vector<Count>> median_upper;  // [level][step]

    double rmse = 0.0;
    double rmse_first_replicate = 0.0;
    double median_replicate_rmse = 0.0;
    std::vector<std::size_t> coverage;  // per level: truths of replicate 0 inside the median HDR

    std::vector<ReplicateOutcome> outcomes;
    std::vector<std::string> warnings;
};

/// RMSE of integer forecasts against integer truths.
[[nodiscard]] double rmse(std::span<const Count> forecast, std::span<const Count> truth);

/// Lower median (element (N-1)/2 of the sorted values).
[[nodiscard]] Count lower_median(std::vector<Count> values);
[[nodiscard]] double median(std::vector<double> values);

/// Aggregates replicate outcomes into medians and RMSE summaries.
[[nodiscard]] StudyResult aggregate(std::string scenario, const StudyConfig& cfg,
                                    std::vector<ReplicateOutcome> outcomes);

/**
 * Rolling one-step study on series simulated from `scn` (its n is ignored:
 * each replicate has cfg.n observed points and cfg.horizon future truths).
 * `fitted_spec` is the model used for forecasting (scn.spec when omitted).
 */
[[nodiscard]] StudyResult scenario_study(const std::string& name, const SimScenario& scn,
                                         const StudyConfig& cfg,
                                         const std::optional<ModelSpec>& fitted_spec = {});

/// Model 1 or 2 rolling study with the printed coefficients.
[[nodiscard]] StudyResult simulation_study(int model_id, const StudyConfig& cfg);

struct PolioReport {
    FittedModel fit;
    StudyResult forecasts;
    std::vector<std::string> coefficient_names;
};

/// Fits the first `fit_length` counts and forecasts the next `horizon`.
[[nodiscard]] PolioReport polio_study(const SeriesFrame& polio, std::size_t fit_length = 158,
                                      int horizon = 10, const std::vector<double>& levels = {0.5, 0.75},
                                      const FitOptions& fit_opts = {},
                                      const TruncationRule& trunc = {});

struct RobustnessResult {
    StudyResult true_model;        // GARMA(0,5)
    StudyResult misspecified;      // GARMA(0,2)
    std::vector<std::size_t> true_captures;   // per level, truths inside each replicate's own HDR
    std::vector<std::size_t> misspecified_captures;
    double lag5 = 0.01;
};

[[nodiscard]] RobustnessResult robustness_study(const StudyConfig& cfg, double lag5 = 0.01);

struct TwoStepReport {
    ForecastDistribution dist;
    Count truth = 0;
    Count point = 0;
    std::vector<HdrRegion> regions;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double seconds = 0.0;
};

/// Two-step forecast of y_{n+2} for a Model 1 series of length n.
[[nodiscard]] TwoStepReport two_step_study(std::size_t n, std::uint64_t seed,
                                           const std::vector<double>& levels = {0.5, 0.75},
                                           const FitOptions& fit_opts = {},
                                           const TruncationRule& trunc = {},
                                           const PlOptions& pl = {});

/// Runs fn(i) for i in [0, count) on up to `threads` workers; results must be stored by index.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace garma
