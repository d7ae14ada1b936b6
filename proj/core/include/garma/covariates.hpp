#pragma once

#include "garma/types.hpp"

#include <string>
#include <vector>

namespace garma {

/**
 * Deterministic covariate design of intercept, optional linear trend and
 * harmonic pairs. Column order is fixed:
 *
 *   [1, t * trend_scale, cos(2 pi t/P_1), sin(2 pi t/P_1), cos(2 pi t/P_2), ...]
 *
 * with the intercept and trend columns present only when requested.
 */
struct CovariateSchema {
    bool intercept = true;
    bool trend = false;
    double trend_scale = 1.0;
    std::vector<int> periods;

    [[nodiscard]] int dim() const noexcept;
    [[nodiscard]] std::vector<std::string> column_names() const;
    [[nodiscard]] Vector row(long t) const;

    /// Rows for t = origin+1 .. origin+n.
    [[nodiscard]] Matrix build(std::size_t n, int origin = 0) const;

    void validate() const;
};

/// Convenience wrapper that always includes the intercept column.
[[nodiscard]] Matrix harmonic_covariates(std::size_t n, int origin, const std::vector<int>& periods,
                                         bool include_trend, double trend_scale = 1.0);

}  // namespace garma
