#pragma once

#include "garma/types.hpp"

#include <span>
#include <vector>

namespace garma {

/**
 * Poisson GARMA(p,q) model math with log link.
 *
 *   eta_t = x_t'beta
 *         + sum_{j<=p} phi_j   * (log y*_{t-j} - x_{t-j}'beta)
 *         + sum_{j<=q} theta_j * (log y*_{t-j} - eta_{t-j})
 *   lambda_t = exp(eta_t),   y* = max(y, c)
 *
 * Lagged terms whose index falls before the start of the frame contribute
 * zero, so the first max(p,q) observations see covariate-only predictors.
 * All functions are pure.
 */

/// y* = max(y, c) elementwise. Throws InvalidSpec unless 0 < c < 1.
[[nodiscard]] std::vector<double> clip_series(std::span<const Count> counts, double c);

[[nodiscard]] PredictorPath predictor_path(const ModelSpec& spec, const ParamVector& params,
                                           const SeriesFrame& frame);

/// sum_t [-lambda_t + y_t log lambda_t - log y_t!]
[[nodiscard]] double log_partial_likelihood(const ModelSpec& spec, const ParamVector& params,
                                            const SeriesFrame& frame);

/// Gradient of the log partial likelihood with respect to the flattened parameters.
[[nodiscard]] Vector score(const ModelSpec& spec, const ParamVector& params,
                           const SeriesFrame& frame);

/**
 * G = sum_t lambda_t (d eta_t / d nu)(d eta_t / d nu)'.
 *
 * This is the un-inverted conditional Fisher information; G^-1 is the
 * asymptotic covariance of the estimator. Throws SingularInformation when
 * G is not positive definite.
 */
[[nodiscard]] Matrix conditional_information(const ModelSpec& spec, const ParamVector& params,
                                             const SeriesFrame& frame);

/// How much of the derivative machinery `evaluate` should run.
enum class Order { Value, Score, Information };

struct Evaluation {
    PredictorPath path;
    double loglik = 0.0;
    Vector score;       // empty for Order::Value
    Matrix information; // empty unless Order::Information
};

/**
 * One pass over the frame computing the path, log likelihood and, on request,
 * the score and information via the forward derivative recursion
 *
 *   d_t = explicit_t - sum_{i<=q} theta_i d_{t-i}.
 *
 * Throws NumericOverflow identifying the first t whose eta exceeds the guard.
 */
[[nodiscard]] Evaluation evaluate(const ModelSpec& spec, const ParamVector& params,
                                  const SeriesFrame& frame, Order order);

/// Conditional mean for the time point right after the frame, given x_{n+1}.
[[nodiscard]] double next_lambda(const ModelSpec& spec, const ParamVector& params,
                                 const SeriesFrame& frame,
                                 const Eigen::Ref<const Vector>& next_covariates);

/// log f(y | lambda) for the Poisson pmf.
[[nodiscard]] double poisson_log_pmf(Count y, double lambda);

}  // namespace garma
