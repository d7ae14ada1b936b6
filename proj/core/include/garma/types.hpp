#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace garma {

using Count = std::int64_t;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Zero-count clipping constant used throughout the examples of the method.
inline constexpr double kDefaultClip = 0.1;

/// Linear predictors above this value are treated as divergent.
inline constexpr double kEtaOverflowGuard = 50.0;

/**
 * Observed counts plus the covariate row for each time point.
 *
 * Row i corresponds to calendar time `time_origin + i + 1`, so a frame that
 * starts at the beginning of a series has time_origin == 0 and t = 1..n.
 */
struct SeriesFrame {
    std::vector<Count> counts;
    Matrix covariates;  // n x k, row t is x_t
    int time_origin = 0;

    [[nodiscard]] std::size_t size() const noexcept { return counts.size(); }
    [[nodiscard]] Eigen::Index dim() const noexcept { return covariates.cols(); }

    /// Throws ValidationError / IngestionError when invariants fail.
    void validate() const;

    /// Copy extended by one observation.
    [[nodiscard]] SeriesFrame appended(Count y, const Eigen::Ref<const Vector>& x) const;

    /// First `n` observations.
    [[nodiscard]] SeriesFrame head(std::size_t n) const;
};

/// Model orders and constants. The link is always log.
struct ModelSpec {
    int p = 0;
    int q = 0;
    int k = 1;
    double c = kDefaultClip;

    [[nodiscard]] int dim() const noexcept { return k + p + q; }
    [[nodiscard]] int max_lag() const noexcept { return p > q ? p : q; }

    /// Throws InvalidSpec.
    void validate() const;
};

/// Parameters nu = (beta, phi, theta). Flattening order is always (beta, phi, theta).
struct ParamVector {
    Vector beta;
    Vector phi;
    Vector theta;

    ParamVector() = default;
    explicit ParamVector(const ModelSpec& spec)
        : beta(Vector::Zero(spec.k)), phi(Vector::Zero(spec.p)), theta(Vector::Zero(spec.q)) {}
    ParamVector(Vector b, Vector ph, Vector th)
        : beta(std::move(b)), phi(std::move(ph)), theta(std::move(th)) {}

    [[nodiscard]] Eigen::Index size() const noexcept {
        return beta.size() + phi.size() + theta.size();
    }
    [[nodiscard]] Vector flatten() const;
    [[nodiscard]] static ParamVector unflatten(const ModelSpec& spec,
                                               const Eigen::Ref<const Vector>& flat);

    /// True when the component lengths agree with `spec`.
    [[nodiscard]] bool matches(const ModelSpec& spec) const noexcept;
};

/// Linear predictors eta_t and conditional means lambda_t = exp(eta_t).
struct PredictorPath {
    Vector eta;
    Vector lambda;
};

struct FittedModel {
    ModelSpec spec;
    ParamVector params;
    Vector std_errors;         // sqrt(diag(G^-1)) at the estimate, NaN when G is singular
    double deviance = 0.0;     // 2 * sum[y log(y/lambda) - (y - lambda)]
    double loglik = 0.0;       // log partial likelihood at the estimate
    PredictorPath path;
    bool converged = false;
    int iterations = 0;
    double score_norm = 0.0;   // infinity norm of the score at the estimate
    std::vector<double> loglik_trace;  // accepted log-likelihoods, one per iteration
    std::vector<std::string> warnings;

    /// -2 * log partial likelihood.
    [[nodiscard]] double neg2_loglik() const noexcept { return -2.0 * loglik; }
};

}  // namespace garma
