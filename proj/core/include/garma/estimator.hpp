#pragma once

#include "garma/types.hpp"

#include <optional>
#include <span>

namespace garma {

struct FitOptions {
    int max_iterations = 200;
    double gradient_tolerance = 1e-8;
    int step_halving_max = 30;
    std::optional<ParamVector> init;

    void validate() const;
};

/**
 * Maximum partial likelihood fit by Fisher scoring.
 *
 * Each iteration solves G delta = score and halves the step until the log
 * likelihood does not decrease (steps that overflow are halved too). A
 * singular G at an iterate falls back to a scaled gradient step; five
 * consecutive singular iterates raise NonIdentifiable.
 *
 * Without `opts.init`, beta starts from a p=q=0 Poisson regression and
 * phi, theta start at zero.
 *
 * Returns converged=false with the best iterate when the iteration budget or
 * the line search runs out.
 */
[[nodiscard]] FittedModel fit(const ModelSpec& spec, const SeriesFrame& frame,
                              const FitOptions& opts = {});

/// sqrt(diag(G^-1)) at the fitted parameters. Throws SingularInformation.
[[nodiscard]] Vector standard_errors(const FittedModel& fitted, const SeriesFrame& frame);

/// 2 sum [y log(y/lambda) - (y - lambda)], with 0 log 0 = 0.
[[nodiscard]] double deviance(std::span<const Count> counts, const Vector& lambda);
[[nodiscard]] double deviance(const FittedModel& fitted, const SeriesFrame& frame);

}  // namespace garma
