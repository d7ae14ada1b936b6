#pragma once

#include "garma/covariates.hpp"
#include "garma/random.hpp"
#include "garma/types.hpp"

#include <cstdint>
#include <vector>

namespace garma {

struct SimScenario {
    ModelSpec spec;
    ParamVector params;
    CovariateSchema schema;
    std::size_t n = 100;
    std::uint64_t seed = 0;
    int time_origin = 0;

    void validate() const;
};

struct SimulatedSeries {
    SeriesFrame frame;
    Vector lambda;  // conditional means used for the draws
};

/**
 * Draws y_1..y_n forward in time: eta_t from the realized history with the
 * same pre-sample convention as the likelihood, then y_t ~ Poisson(lambda_t).
 * Throws NumericOverflow when eta_t exceeds the guard.
 */
[[nodiscard]] SimulatedSeries simulate_with_path(const SimScenario& scn, Rng& rng);
[[nodiscard]] SeriesFrame simulate(const SimScenario& scn);

/// N0 series; replicate i uses Rng::substream(scn.seed, i).
[[nodiscard]] std::vector<SeriesFrame> replicate(const SimScenario& scn, std::size_t n0);

}  // namespace garma
