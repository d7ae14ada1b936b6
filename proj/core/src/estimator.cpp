#include "garma/estimator.hpp"

#include "garma/errors.hpp"
#include "garma/model.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace garma {

void FitOptions::validate() const {
    if (max_iterations < 1) throw InvalidSpec("max_iterations must be >= 1");
    if (!(gradient_tolerance > 0.0)) throw InvalidSpec("gradient_tolerance must be > 0");
    if (step_halving_max < 0) throw InvalidSpec("step_halving_max must be >= 0");
}

namespace {

constexpr int kMaxSingularStreak = 5;

// Numerical rank check on G; the LDLT rcond estimate misses exact collinearity.
bool well_conditioned(const Matrix& G) {
    if (G.size() == 0) return true;
    Eigen::SelfAdjointEigenSolver<Matrix> es(G, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) return false;
    const Vector& ev = es.eigenvalues();
    return ev.allFinite() && ev.minCoeff() > 1e-12 * std::max(ev.maxCoeff(), 1e-300);
}

// Slack for comparing log likelihoods that agree to rounding.
double ll_slack(double ll) { return 1e-12 * (1.0 + std::abs(ll)); }

struct Iterate {
    Vector nu;
    Evaluation ev;
};

std::optional<Evaluation> try_evaluate(const ModelSpec& spec, const Vector& nu,
                                       const SeriesFrame& frame, Order order) {
    try {
        return evaluate(spec, ParamVector::unflatten(spec, nu), frame, order);
    } catch (const NumericOverflow&) {
        return std::nullopt;
    }
}

ParamVector glm_start(const ModelSpec& spec, const SeriesFrame& frame) {
    ParamVector start(spec);
    double mean = 0.0;
    for (Count y : frame.counts) mean += static_cast<double>(y);
    mean /= static_cast<double>(frame.size());
    for (Eigen::Index j = 0; j < frame.covariates.cols(); ++j) {
        if ((frame.covariates.col(j).array() == 1.0).all()) {
            start.beta[j] = std::log(std::max(mean, spec.c));
            break;
        }
    }
    return start;
}

FittedModel scoring(const ModelSpec& spec, const SeriesFrame& frame, const ParamVector& start,
                    const FitOptions& opts) {
    const Eigen::Index d = spec.dim();
    FittedModel out;
    out.spec = spec;

    Vector nu = start.flatten();
    auto first = try_evaluate(spec, nu, frame, Order::Information);
    if (!first) {
        // Shrink the dynamic part of an explosive start towards zero.
        Vector shrunk = nu;
        for (int attempt = 0; attempt < 30 && !first; ++attempt) {
            shrunk.tail(spec.p + spec.q) *= 0.5;
            if (attempt > 10) shrunk.head(spec.k) *= 0.5;
            first = try_evaluate(spec, shrunk, frame, Order::Information);
        }
        if (!first) {
            (void)evaluate(spec, start, frame, Order::Value);  // rethrows the overflow
        }
        nu = shrunk;
    }
    Evaluation ev = std::move(*first);
    out.loglik_trace.push_back(ev.loglik);

    int singular_streak = 0;
    int iter = 0;
    bool converged = false;
    for (; iter < opts.max_iterations; ++iter) {
        const double gnorm = ev.score.size() ? ev.score.lpNorm<Eigen::Infinity>() : 0.0;
        if (gnorm <= opts.gradient_tolerance) {
            converged = true;
            break;
        }

        Vector delta;
        Eigen::LDLT<Matrix> ldlt(ev.information);
        bool singular = ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
                        !well_conditioned(ev.information);
        if (!singular) {
            delta = ldlt.solve(ev.score);
            singular = !delta.allFinite();
        }
        if (singular) {
            if (++singular_streak >= kMaxSingularStreak) {
                throw NonIdentifiable("conditional information singular at " +
                                      std::to_string(singular_streak) +
                                      " consecutive iterates; model not identifiable on this data");
            }
            const double scale = std::max(ev.information.diagonal().maxCoeff(), 1.0);
            delta = ev.score / scale;
        } else {
            singular_streak = 0;
        }

        bool accepted = false;
        double step = 1.0;
        for (int h = 0; h <= opts.step_halving_max; ++h, step *= 0.5) {
            const Vector cand = nu + step * delta;
            auto trial = try_evaluate(spec, cand, frame, Order::Value);
            if (!trial || !std::isfinite(trial->loglik)) continue;
            if (trial->loglik >= ev.loglik - ll_slack(ev.loglik)) {
                auto full = try_evaluate(spec, cand, frame, Order::Information);
                if (!full) continue;
                nu = cand;
                ev = std::move(*full);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            out.warnings.push_back("line search failed after " +
                                   std::to_string(opts.step_halving_max) + " halvings");
            break;
        }
        out.loglik_trace.push_back(ev.loglik);
    }
    if (!converged && iter >= opts.max_iterations) {
        converged = ev.score.size() == 0 ||
                    ev.score.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance;
    }

    out.params = ParamVector::unflatten(spec, nu);
    out.loglik = ev.loglik;
    out.path = std::move(ev.path);
    out.converged = converged;
    out.iterations = iter;
    out.score_norm = ev.score.size() ? ev.score.lpNorm<Eigen::Infinity>() : 0.0;
    out.deviance = deviance(frame.counts, out.path.lambda);

    Eigen::LDLT<Matrix> ldlt(ev.information);
    if (d > 0 && ldlt.info() == Eigen::Success && ldlt.isPositive() &&
        well_conditioned(ev.information)) {
        const Matrix cov = ldlt.solve(Matrix::Identity(d, d));
        out.std_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    } else {
        out.std_errors = Vector::Constant(d, std::numeric_limits<double>::quiet_NaN());
        out.warnings.emplace_back("information matrix singular at the estimate; no standard errors");
    }

    if (out.params.phi.cwiseAbs().sum() > 1.0) {
        out.warnings.emplace_back("sum |phi_j| exceeds 1; AR part may be non-stationary");
    }
    if (out.params.theta.cwiseAbs().sum() > 1.0) {
        out.warnings.emplace_back("sum |theta_j| exceeds 1; MA part may be non-invertible");
    }
    return out;
}

}  // namespace

FittedModel fit(const ModelSpec& spec, const SeriesFrame& frame, const FitOptions& opts) {
    spec.validate();
    opts.validate();
    frame.validate();
    if (frame.covariates.cols() != spec.k) {
        throw InvalidSpec("frame has " + std::to_string(frame.covariates.cols()) +
                          " covariate columns, spec expects " + std::to_string(spec.k));
    }
    if (frame.size() <= static_cast<std::size_t>(spec.dim())) {
        throw InvalidSpec("need n > k+p+q observations to fit (n=" +
                          std::to_string(frame.size()) + ", k+p+q=" +
                          std::to_string(spec.dim()) + ")");
    }

    ParamVector start;
    if (opts.init) {
        if (!opts.init->matches(spec)) throw InvalidSpec("initial parameters do not match spec");
        start = *opts.init;
    } else {
        ParamVector full(spec);
        if (spec.k > 0) {
            ModelSpec glm = spec;
            glm.p = 0;
            glm.q = 0;
            const FittedModel base = scoring(glm, frame, glm_start(glm, frame), opts);
            full.beta = base.params.beta;
        }
        start = full;
    }
    return scoring(spec, frame, start, opts);
}

Vector standard_errors(const FittedModel& fitted, const SeriesFrame& frame) {
    const Matrix G = conditional_information(fitted.spec, fitted.params, frame);
    Eigen::LDLT<Matrix> ldlt(G);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !well_conditioned(G)) {
        throw SingularInformation("conditional information matrix is singular at the estimate");
    }
    const Matrix cov = ldlt.solve(Matrix::Identity(G.rows(), G.cols()));
    return cov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

double deviance(std::span<const Count> counts, const Vector& lambda) {
    if (static_cast<Eigen::Index>(counts.size()) != lambda.size()) {
        throw InvalidSpec("deviance: counts and lambda lengths differ");
    }
    double dev = 0.0;
    for (std::size_t t = 0; t < counts.size(); ++t) {
        const double y = static_cast<double>(counts[t]);
        const double lam = lambda[static_cast<Eigen::Index>(t)];
        const double term = (y > 0.0 ? y * std::log(y / lam) : 0.0) - (y - lam);
        dev += term;
    }
    return std::max(0.0, 2.0 * dev);
}

double deviance(const FittedModel& fitted, const SeriesFrame& frame) {
    return deviance(frame.counts, fitted.path.lambda);
}

}  // namespace garma
