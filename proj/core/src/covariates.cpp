#include "garma/covariates.hpp"

#include "garma/errors.hpp"

#include <cmath>
#include <numbers>

namespace garma {

int CovariateSchema::dim() const noexcept {
    return (intercept ? 1 : 0) + (trend ? 1 : 0) + 2 * static_cast<int>(periods.size());
}

std::vector<std::string> CovariateSchema::column_names() const {
    std::vector<std::string> names;
    if (intercept) names.emplace_back("intercept");
    if (trend) names.emplace_back("trend");
    for (int period : periods) {
        const std::string p = std::to_string(period);
        names.push_back("cos(2pi t/" + p + ")");
        names.push_back("sin(2pi t/" + p + ")");
    }
    return names;
}

void CovariateSchema::validate() const {
    for (int period : periods) {
        if (period <= 0) {
            throw InvalidSpec("harmonic period must be positive, got " + std::to_string(period));
        }
    }
    if (dim() == 0) {
        throw InvalidSpec("covariate schema is empty (no intercept, trend or harmonics)");
    }
}

Vector CovariateSchema::row(long t) const {
    Vector x(dim());
    Eigen::Index col = 0;
    const double td = static_cast<double>(t);
    if (intercept) x[col++] = 1.0;
    if (trend) x[col++] = td * trend_scale;
    for (int period : periods) {
        const double angle = 2.0 * std::numbers::pi * td / static_cast<double>(period);
        x[col++] = std::cos(angle);
        x[col++] = std::sin(angle);
    }
    return x;
}

Matrix CovariateSchema::build(std::size_t n, int origin) const {
    validate();
    Matrix X(static_cast<Eigen::Index>(n), dim());
    for (std::size_t i = 0; i < n; ++i) {
        X.row(static_cast<Eigen::Index>(i)) = row(origin + static_cast<long>(i) + 1).transpose();
    }
    return X;
}

Matrix harmonic_covariates(std::size_t n, int origin, const std::vector<int>& periods,
                           bool include_trend, double trend_scale) {
    CovariateSchema schema;
    schema.trend = include_trend;
    schema.trend_scale = trend_scale;
    schema.periods = periods;
    return schema.build(n, origin);
}

}  // namespace garma
