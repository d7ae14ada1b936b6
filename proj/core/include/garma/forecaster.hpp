#pragma once

#include "garma/estimator.hpp"
#include "garma/types.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace garma {

/**
 * Stopping rule for candidate enumeration.
 *
 * A candidate is "sub-floor" when its unnormalized predictive likelihood is
 * below relative_floor times the running maximum. Enumeration stops after
 * `patience` consecutive sub-floor candidates past the running mode, or after
 * `hard_cap` candidate values (0..hard_cap-1) per coordinate. Sub-floor
 * candidates are dropped before normalizing.
 */
struct TruncationRule {
    double relative_floor = 1e-6;
    int patience = 3;
    int hard_cap = 500;

    void validate() const;
};

/// Knobs that are not part of the model or the truncation rule.
struct PlOptions {
    bool warm_start = true;          // start each refit at the previous candidate's estimate
    bool keep_candidate_fits = false;
    std::size_t lattice_budget = 1'000'000;  // maximum refits for m-step enumeration
    std::optional<ParamVector> base_init;    // starting point for the first refit
};

struct CandidateFit {
    Count value = 0;
    double loglik = 0.0;  // log LL_p(value): joint log likelihood at the refit estimate
    bool failed = false;
    int iterations = 0;
    ParamVector params;
};

/// A point of the m-step lattice (y_{n+1}, ..., y_{n+m}) with its profile log likelihood.
struct LatticePoint {
    std::vector<Count> path;
    double loglik = 0.0;
    ParamVector params;
};

/**
 * Normalized forecast pmf on the contiguous support 0..K.
 */
struct ForecastDistribution {
    std::vector<double> probs;
    Count truncation_bound = 0;          // K
    double log_unnormalized_total = 0.0; // log sum of retained LL_p values
    std::string truncation_reason;       // "relative-floor" or "hard-cap"
    int steps_ahead = 1;
    std::size_t refits = 0;
    std::vector<CandidateFit> candidates;  // one-step only, when requested
    std::vector<LatticePoint> lattice;     // m-step only, when requested
    std::vector<std::string> warnings;

    [[nodiscard]] std::size_t size() const noexcept { return probs.size(); }
    [[nodiscard]] double prob(Count y) const noexcept;

    /// Throws Error when probabilities are negative, non-finite, or do not sum to 1 within 1e-9.
    void check_invariants() const;

    /// Builds from unnormalized log masses (index = count); -inf entries are dropped.
    [[nodiscard]] static ForecastDistribution from_log_masses(std::span<const double> log_mass);
};

struct HdrRegion {
    double level = 0.0;
    std::vector<Count> members;  // ascending
    double attained_mass = 0.0;

    [[nodiscard]] Count lower() const { return members.front(); }
    [[nodiscard]] Count upper() const { return members.back(); }
    [[nodiscard]] bool contiguous() const noexcept;
    [[nodiscard]] bool contains(Count y) const noexcept;
};

/**
 * One-step profile predictive likelihood forecast of y_{n+1}.
 *
 * For y = 0, 1, 2, ... the model is refitted on frame + y and the joint log
 * likelihood of all n+1 points is recorded; enumeration stops per `trunc`.
 * Candidates whose refit fails are excluded with a warning; if all fail,
 * ForecastFailure is thrown.
 */
[[nodiscard]] ForecastDistribution one_step_pl(const ModelSpec& spec, const SeriesFrame& frame,
                                               const Eigen::Ref<const Vector>& next_covariates,
                                               const FitOptions& opts = {},
                                               const TruncationRule& trunc = {},
                                               const PlOptions& pl = {});

/**
 * m-step forecast of y_{n+m}: every tuple (y_{n+1}, ..., y_{n+m}) of the
 * truncated lattice is refitted, then intermediate coordinates are summed out.
 * `future_covariates` holds m rows x_{n+1}..x_{n+m}. m == 1 delegates to
 * one_step_pl. Throws BudgetExceeded when the refit count passes
 * pl.lattice_budget.
 */
[[nodiscard]] ForecastDistribution m_step_pl(const ModelSpec& spec, const SeriesFrame& frame,
                                             const Matrix& future_covariates, int m,
                                             const FitOptions& opts = {},
                                             const TruncationRule& trunc = {},
                                             const PlOptions& pl = {});

/// Mode of the distribution; ties go to the smaller count.
[[nodiscard]] Count point_forecast(const ForecastDistribution& dist);

/**
 * Exact highest density region: support points in descending probability
 * until the accumulated mass reaches `level`; points tied with the last one
 * admitted join as well. Throws InvalidSpec unless 0 < level < 1.
 */
[[nodiscard]] HdrRegion hdr(const ForecastDistribution& dist, double level);

struct ForecastStep {
    ForecastDistribution dist;
    Count point = 0;
    std::vector<HdrRegion> regions;  // one per requested level
    std::optional<Count> truth;
};

/**
 * Rolling one-step forecasts: forecast, record, append the realized count,
 * advance. `future_counts` supplies the realized values used to advance
 * (at least horizon-1 entries; an entry for the last step is kept as truth).
 * `future_covariates` has at least `horizon` rows.
 */
[[nodiscard]] std::vector<ForecastStep> rolling_forecast(
    const ModelSpec& spec, const SeriesFrame& frame, int horizon,
    std::span<const Count> future_counts, const Matrix& future_covariates,
    const std::vector<double>& levels, const FitOptions& opts = {},
    const TruncationRule& trunc = {}, const PlOptions& pl = {});

/**
 * Delta-method variance of the one-step forecast pmf at each support point:
 *   var(y) = grad p(y)' G^-1 grad p(y)
 * where p(y; nu) is the Poisson pmf at lambda_{n+1}(nu), the gradient is
 * taken by central differences around the fitted estimate, and G is the
 * conditional information of `frame` at the estimate.
 */
[[nodiscard]] Vector forecast_density_variance(const ForecastDistribution& dist,
                                               const FittedModel& fitted,
                                               const SeriesFrame& frame,
                                               const Eigen::Ref<const Vector>& next_covariates);

}  // namespace garma
