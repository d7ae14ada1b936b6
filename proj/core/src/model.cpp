#include "garma/model.hpp"

#include "garma/errors.hpp"

#include <algorithm>
#include <cmath>

namespace garma {

void ModelSpec::validate() const {
    if (!(c > 0.0 && c < 1.0)) {
        throw InvalidSpec("clipping constant c must lie in (0,1), got " + std::to_string(c));
    }
    if (p < 0 || q < 0 || k < 0) {
        throw InvalidSpec("model orders and covariate dimension must be non-negative");
    }
    if (p + q + k < 1) {
        throw InvalidSpec("model has no parameters (p+q+k must be >= 1)");
    }
}

Vector ParamVector::flatten() const {
    Vector out(size());
    out << beta, phi, theta;
    return out;
}

ParamVector ParamVector::unflatten(const ModelSpec& spec, const Eigen::Ref<const Vector>& flat) {
    if (flat.size() != spec.dim()) {
        throw InvalidSpec("flat parameter vector has length " + std::to_string(flat.size()) +
                          ", expected " + std::to_string(spec.dim()));
    }
    return ParamVector(flat.segment(0, spec.k), flat.segment(spec.k, spec.p),
                       flat.segment(spec.k + spec.p, spec.q));
}

bool ParamVector::matches(const ModelSpec& spec) const noexcept {
    return beta.size() == spec.k && phi.size() == spec.p && theta.size() == spec.q;
}

void SeriesFrame::validate() const {
    if (static_cast<std::size_t>(covariates.rows()) != counts.size()) {
        throw IngestionError("covariate rows (" + std::to_string(covariates.rows()) +
                             ") do not match count length (" + std::to_string(counts.size()) +
                             ")");
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < 0) {
            throw ValidationError("negative count at row " + std::to_string(i + 1));
        }
    }
    if (!covariates.allFinite()) {
        throw ValidationError("covariates contain missing or non-finite values");
    }
}

SeriesFrame SeriesFrame::appended(Count y, const Eigen::Ref<const Vector>& x) const {
    if (x.size() != covariates.cols()) {
        throw InvalidSpec("appended covariate row has wrong dimension");
    }
    SeriesFrame out;
    out.counts = counts;
    out.counts.push_back(y);
    out.covariates.resize(covariates.rows() + 1, covariates.cols());
    out.covariates.topRows(covariates.rows()) = covariates;
    out.covariates.row(covariates.rows()) = x.transpose();
    out.time_origin = time_origin;
    return out;
}

SeriesFrame SeriesFrame::head(std::size_t n) const {
    if (n > counts.size()) {
        throw InvalidSpec("head(" + std::to_string(n) + ") exceeds frame length");
    }
    SeriesFrame out;
    out.counts.assign(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(n));
    out.covariates = covariates.topRows(static_cast<Eigen::Index>(n));
    out.time_origin = time_origin;
    return out;
}

std::vector<double> clip_series(std::span<const Count> counts, double c) {
    if (!(c > 0.0 && c < 1.0)) {
        throw InvalidSpec("clipping constant c must lie in (0,1), got " + std::to_string(c));
    }
    std::vector<double> out(counts.size());
    std::transform(counts.begin(), counts.end(), out.begin(),
                   [c](Count y) { return std::max(static_cast<double>(y), c); });
    return out;
}

double poisson_log_pmf(Count y, double lambda) {
    const double yd = static_cast<double>(y);
    if (y == 0) return -lambda;
    return -lambda + yd * std::log(lambda) - std::lgamma(yd + 1.0);
}

namespace {

void check_inputs(const ModelSpec& spec, const ParamVector& params, const SeriesFrame& frame) {
    spec.validate();
    if (!params.matches(spec)) {
        throw InvalidSpec("parameter dimensions do not match model spec");
    }
    if (frame.size() == 0) {
        throw InvalidSpec("series frame is empty");
    }
    if (frame.covariates.cols() != spec.k ||
        static_cast<std::size_t>(frame.covariates.rows()) != frame.size()) {
        throw InvalidSpec("covariate matrix shape does not match spec.k and frame length");
    }
}

}  // namespace

Evaluation evaluate(const ModelSpec& spec, const ParamVector& params, const SeriesFrame& frame,
                    Order order) {
    check_inputs(spec, params, frame);

    const Eigen::Index n = static_cast<Eigen::Index>(frame.size());
    const int k = spec.k, p = spec.p, q = spec.q, d = spec.dim();
    const Matrix& X = frame.covariates;

    const std::vector<double> ystar = clip_series(frame.counts, spec.c);
    Vector log_ystar(n);
    for (Eigen::Index t = 0; t < n; ++t) log_ystar[t] = std::log(ystar[static_cast<std::size_t>(t)]);
    const Vector xb = X * params.beta;

    Evaluation ev;
    ev.path.eta.resize(n);
    ev.path.lambda.resize(n);
    Vector& eta = ev.path.eta;
    Vector& lambda = ev.path.lambda;

    const bool want_score = order != Order::Value;
    const bool want_info = order == Order::Information;
    // Row t holds d eta_t / d nu.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> D;
    if (want_score) D.setZero(n, d);

    double ll = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
        double e = xb[t];
        for (int j = 1; j <= p && j <= t; ++j) {
            e += params.phi[j - 1] * (log_ystar[t - j] - xb[t - j]);
        }
        for (int j = 1; j <= q && j <= t; ++j) {
            e += params.theta[j - 1] * (log_ystar[t - j] - eta[t - j]);
        }
        if (!(e <= kEtaOverflowGuard)) {
            throw NumericOverflow(static_cast<std::size_t>(t), e);
        }
        eta[t] = e;
        lambda[t] = std::exp(e);
        ll += poisson_log_pmf(frame.counts[static_cast<std::size_t>(t)], lambda[t]);

        if (!want_score) continue;
        auto row = D.row(t);
        row.head(k) = X.row(t);
        for (int j = 1; j <= p && j <= t; ++j) {
            row.head(k) -= params.phi[j - 1] * X.row(t - j);
            row[k + j - 1] = log_ystar[t - j] - xb[t - j];
        }
        for (int j = 1; j <= q && j <= t; ++j) {
            row[k + p + j - 1] = log_ystar[t - j] - eta[t - j];
        }
        for (int j = 1; j <= q && j <= t; ++j) {
            row -= params.theta[j - 1] * D.row(t - j);
        }
    }
    ev.loglik = ll;

    if (want_score) {
        Vector resid(n);
        for (Eigen::Index t = 0; t < n; ++t) {
            resid[t] = static_cast<double>(frame.counts[static_cast<std::size_t>(t)]) - lambda[t];
        }
        ev.score = D.transpose() * resid;
    }
    if (want_info) {
        const Matrix weighted = D.array().colwise() * lambda.array().sqrt();
        ev.information = Matrix::Zero(d, d);
        ev.information.selfadjointView<Eigen::Lower>().rankUpdate(weighted.transpose());
        ev.information.triangularView<Eigen::StrictlyUpper>() =
            ev.information.transpose().triangularView<Eigen::StrictlyUpper>();
    }
    return ev;
}

PredictorPath predictor_path(const ModelSpec& spec, const ParamVector& params,
                             const SeriesFrame& frame) {
    return evaluate(spec, params, frame, Order::Value).path;
}

double log_partial_likelihood(const ModelSpec& spec, const ParamVector& params,
                              const SeriesFrame& frame) {
    return evaluate(spec, params, frame, Order::Value).loglik;
}

Vector score(const ModelSpec& spec, const ParamVector& params, const SeriesFrame& frame) {
    return evaluate(spec, params, frame, Order::Score).score;
}

Matrix conditional_information(const ModelSpec& spec, const ParamVector& params,
                               const SeriesFrame& frame) {
    if (frame.size() <= static_cast<std::size_t>(spec.dim())) {
        throw InvalidSpec("information matrix needs n > k+p+q");
    }
    Matrix G = evaluate(spec, params, frame, Order::Information).information;
    Eigen::LLT<Matrix> llt(G);
    if (llt.info() != Eigen::Success) {
        throw SingularInformation("conditional information matrix is singular");
    }
    return G;
}

double next_lambda(const ModelSpec& spec, const ParamVector& params, const SeriesFrame& frame,
                   const Eigen::Ref<const Vector>& next_covariates) {
    // Placeholder count does not enter eta_{n+1}.
    const SeriesFrame ext = frame.appended(0, next_covariates);
    return evaluate(spec, params, ext, Order::Value).path.lambda[static_cast<Eigen::Index>(frame.size())];
}

}  // namespace garma
