#include "garma/simulator.hpp"

#include "garma/errors.hpp"
#include "garma/model.hpp"

#include <algorithm>
#include <cmath>

namespace garma {

void SimScenario::validate() const {
    spec.validate();
    schema.validate();
    if (n < 1) throw InvalidSpec("scenario length n must be >= 1");
    if (!params.matches(spec)) throw InvalidSpec("scenario parameters do not match spec");
    if (schema.dim() != spec.k) {
        throw InvalidSpec("covariate schema has " + std::to_string(schema.dim()) +
                          " columns, spec expects k=" + std::to_string(spec.k));
    }
}

SimulatedSeries simulate_with_path(const SimScenario& scn, Rng& rng) {
    scn.validate();
    const auto n = static_cast<Eigen::Index>(scn.n);
    const ModelSpec& spec = scn.spec;
    const ParamVector& nu = scn.params;

    SimulatedSeries out;
    out.frame.time_origin = scn.time_origin;
    out.frame.covariates = scn.schema.build(scn.n, scn.time_origin);
    out.frame.counts.resize(scn.n);
    out.lambda.resize(n);

    const Vector xb = out.frame.covariates * nu.beta;
    Vector log_ystar(n);
    Vector eta(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        double e = xb[t];
        for (int j = 1; j <= spec.p && j <= t; ++j) {
            e += nu.phi[j - 1] * (log_ystar[t - j] - xb[t - j]);
        }
        for (int j = 1; j <= spec.q && j <= t; ++j) {
            e += nu.theta[j - 1] * (log_ystar[t - j] - eta[t - j]);
        }
        if (!(e <= kEtaOverflowGuard)) throw NumericOverflow(static_cast<std::size_t>(t), e);
        eta[t] = e;
        out.lambda[t] = std::exp(e);
        const Count y = poisson(rng, out.lambda[t]);
        out.frame.counts[static_cast<std::size_t>(t)] = y;
        log_ystar[t] = std::log(std::max(static_cast<double>(y), spec.c));
    }
    return out;
}

SeriesFrame simulate(const SimScenario& scn) {
    Rng rng(scn.seed);
    return simulate_with_path(scn, rng).frame;
}

std::vector<SeriesFrame> replicate(const SimScenario& scn, std::size_t n0) {
    if (n0 < 1) throw InvalidSpec("replicate count N0 must be >= 1");
    std::vector<SeriesFrame> out;
    out.reserve(n0);
    for (std::size_t i = 0; i < n0; ++i) {
        Rng rng = Rng::substream(scn.seed, i);
        out.push_back(simulate_with_path(scn, rng).frame);
    }
    return out;
}

}  // namespace garma
