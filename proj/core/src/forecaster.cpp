#include "garma/forecaster.hpp"

#include "garma/errors.hpp"
#include "garma/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace garma {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

CandidateFit refit_candidate(const ModelSpec& spec, const SeriesFrame& extended, Count value,
                             const FitOptions& opts, const std::optional<ParamVector>& init) {
    CandidateFit rec;
    rec.value = value;
    auto attempt = [&](const std::optional<ParamVector>& start) -> bool {
        FitOptions o = opts;
        o.init = start;
        try {
            FittedModel f = fit(spec, extended, o);
            rec.iterations += f.iterations;
            if (!f.converged) return false;
            rec.loglik = f.loglik;
            rec.params = std::move(f.params);
            return true;
        } catch (const Error&) {
            return false;
        }
    };
    bool ok = attempt(init);
    if (!ok && init) ok = attempt(std::nullopt);
    rec.failed = !ok;
    if (!ok) rec.loglik = kNegInf;
    return rec;
}

std::optional<ParamVector> base_start(const ModelSpec& spec, const SeriesFrame& frame,
                                      const FitOptions& opts, const PlOptions& pl) {
    if (!pl.warm_start) return std::nullopt;
    if (pl.base_init) return pl.base_init;
    try {
        FittedModel base = fit(spec, frame, opts);
        if (base.converged) return base.params;
    } catch (const Error&) {
    }
    return std::nullopt;
}

/// Patience-based stopping state for one enumeration axis.
class AxisStop {
public:
    AxisStop(const TruncationRule& rule) : log_floor_(std::log(rule.relative_floor)), patience_(rule.patience) {}

    /// Feed the best log mass of value v; `global_max` is the running maximum over everything seen.
    /// Returns true when enumeration along this axis should stop.
    bool update(Count v, double value_max, double global_max) {
        if (value_max > axis_max_) {
            axis_max_ = value_max;
            mode_ = v;
        }
        if (mode_ < 0 || v <= mode_) return false;
        const bool sub = !(value_max - global_max >= log_floor_);
        streak_ = sub ? streak_ + 1 : 0;
        return streak_ >= patience_;
    }

private:
    double log_floor_;
    int patience_;
    double axis_max_ = kNegInf;
    Count mode_ = -1;
    int streak_ = 0;
};

}  // namespace

void TruncationRule::validate() const {
    if (!(relative_floor > 0.0 && relative_floor < 1.0)) {
        throw InvalidSpec("relative_floor must lie in (0,1)");
    }
    if (patience < 1) throw InvalidSpec("patience must be >= 1");
    if (hard_cap < 1) throw InvalidSpec("hard_cap must be >= 1");
}

double ForecastDistribution::prob(Count y) const noexcept {
    if (y < 0 || static_cast<std::size_t>(y) >= probs.size()) return 0.0;
    return probs[static_cast<std::size_t>(y)];
}

void ForecastDistribution::check_invariants() const {
    if (probs.empty()) throw Error("forecast distribution has empty support");
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw Error("forecast probability negative or non-finite");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw Error("forecast probabilities sum to " + std::to_string(total));
    }
    if (truncation_bound != static_cast<Count>(probs.size()) - 1) {
        throw Error("truncation bound does not match support size");
    }
}

ForecastDistribution ForecastDistribution::from_log_masses(std::span<const double> log_mass) {
    std::ptrdiff_t last = -1;
    double max_lm = kNegInf;
    for (std::size_t i = 0; i < log_mass.size(); ++i) {
        if (std::isfinite(log_mass[i])) {
            last = static_cast<std::ptrdiff_t>(i);
            max_lm = std::max(max_lm, log_mass[i]);
        }
    }
    if (last < 0) throw ForecastFailure("no forecast candidate carries mass");

    ForecastDistribution dist;
    dist.probs.resize(static_cast<std::size_t>(last) + 1, 0.0);
    double total = 0.0;
    for (std::ptrdiff_t i = 0; i <= last; ++i) {
        const double lm = log_mass[static_cast<std::size_t>(i)];
        const double w = std::isfinite(lm) ? std::exp(lm - max_lm) : 0.0;
        dist.probs[static_cast<std::size_t>(i)] = w;
        total += w;
    }
    for (double& p : dist.probs) p /= total;
    dist.truncation_bound = last;
    dist.log_unnormalized_total = max_lm + std::log(total);
    return dist;
}

ForecastDistribution one_step_pl(const ModelSpec& spec, const SeriesFrame& frame,
                                 const Eigen::Ref<const Vector>& next_covariates,
                                 const FitOptions& opts, const TruncationRule& trunc,
                                 const PlOptions& pl) {
    spec.validate();
    trunc.validate();
    frame.validate();
    if (next_covariates.size() != spec.k) {
        throw InvalidSpec("next covariate row has " + std::to_string(next_covariates.size()) +
                          " entries, spec expects " + std::to_string(spec.k));
    }

    std::optional<ParamVector> warm = base_start(spec, frame, opts, pl);
    const double log_floor = std::log(trunc.relative_floor);

    std::vector<CandidateFit> cands;
    std::vector<std::string> warnings;
    double global_max = kNegInf;
    AxisStop stop(trunc);
    std::string reason = "hard-cap";
    for (Count y = 0; y < trunc.hard_cap; ++y) {
        const SeriesFrame ext = frame.appended(y, next_covariates);
        CandidateFit rec = refit_candidate(spec, ext, y, opts, pl.warm_start ? warm : std::nullopt);
        if (rec.failed) {
            warnings.push_back("candidate y=" + std::to_string(y) + " failed to refit; excluded");
        } else {
            global_max = std::max(global_max, rec.loglik);
            if (pl.warm_start) warm = rec.params;
        }
        const double value = rec.loglik;
        cands.push_back(std::move(rec));
        if (stop.update(y, value, global_max)) {
            reason = "relative-floor";
            break;
        }
    }

    std::vector<double> log_mass(cands.size(), kNegInf);
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (!cands[i].failed && cands[i].loglik - global_max >= log_floor) {
            log_mass[i] = cands[i].loglik;
        }
    }
    if (!std::isfinite(global_max)) {
        throw ForecastFailure("all " + std::to_string(cands.size()) +
                              " forecast candidates failed to refit");
    }

    ForecastDistribution dist = ForecastDistribution::from_log_masses(log_mass);
    dist.truncation_reason = reason;
    dist.steps_ahead = 1;
    dist.refits = cands.size();
    dist.warnings = std::move(warnings);
    if (pl.keep_candidate_fits) dist.candidates = std::move(cands);
    return dist;
}

namespace {

struct LatticeWalker {
    const ModelSpec& spec;
    const Matrix& future_x;
    int m;
    const FitOptions& opts;
    const TruncationRule& trunc;
    const PlOptions& pl;

    std::vector<LatticePoint> leaves;
    std::vector<std::string> warnings;
    double global_max = kNegInf;
    std::size_t refits = 0;
    bool hit_cap = false;

    struct Subtree {
        double max_loglik = kNegInf;
        std::optional<ParamVector> first_params;
    };

    Subtree walk(const SeriesFrame& prefix, int level, std::vector<Count>& path,
                 std::optional<ParamVector> warm) {
        Subtree result;
        AxisStop stop(trunc);
        bool stopped = false;
        for (Count v = 0; v < trunc.hard_cap; ++v) {
            path.push_back(v);
            const SeriesFrame ext = prefix.appended(v, future_x.row(level).transpose());
            Subtree child;
            if (level + 1 == m) {
                if (++refits > pl.lattice_budget) throw BudgetExceeded(pl.lattice_budget);
                CandidateFit rec = refit_candidate(spec, ext, v, opts, warm);
                if (rec.failed) {
                    std::string tuple;
                    for (Count c : path) tuple += (tuple.empty() ? "" : ",") + std::to_string(c);
                    warnings.push_back("tuple (" + tuple + ") failed to refit; excluded");
                } else {
                    child.max_loglik = rec.loglik;
                    child.first_params = rec.params;
                    global_max = std::max(global_max, rec.loglik);
                    leaves.push_back(LatticePoint{path, rec.loglik, rec.params});
                }
            } else {
                child = walk(ext, level + 1, path, warm);
            }
            path.pop_back();

            if (pl.warm_start && child.first_params) warm = child.first_params;
            if (!result.first_params) result.first_params = child.first_params;
            result.max_loglik = std::max(result.max_loglik, child.max_loglik);
            if (stop.update(v, child.max_loglik, global_max)) {
                stopped = true;
                break;
            }
        }
        if (!stopped) hit_cap = true;
        return result;
    }
};

}  // namespace

ForecastDistribution m_step_pl(const ModelSpec& spec, const SeriesFrame& frame,
                               const Matrix& future_covariates, int m, const FitOptions& opts,
                               const TruncationRule& trunc, const PlOptions& pl) {
    if (m < 1) throw InvalidSpec("m-step forecast needs m >= 1");
    if (future_covariates.rows() < m || future_covariates.cols() != spec.k) {
        throw InvalidSpec("future covariates must have m rows and k columns");
    }
    if (m == 1) {
        return one_step_pl(spec, frame, future_covariates.row(0).transpose(), opts, trunc, pl);
    }
    spec.validate();
    trunc.validate();
    frame.validate();

    LatticeWalker walker{spec, future_covariates, m, opts, trunc, pl, {}, {}, kNegInf, 0, false};
    std::vector<Count> path;
    walker.walk(frame, 0, path, base_start(spec, frame, opts, pl));

    if (!std::isfinite(walker.global_max)) {
        throw ForecastFailure("all " + std::to_string(walker.refits) +
                              " lattice tuples failed to refit");
    }

    // Sum exp(loglik) over intermediate coordinates for each final value.
    const double log_floor = std::log(trunc.relative_floor);
    Count top = 0;
    for (const auto& leaf : walker.leaves) top = std::max(top, leaf.path.back());
    std::vector<double> mass(static_cast<std::size_t>(top) + 1, 0.0);
    for (const auto& leaf : walker.leaves) {
        const double rel = leaf.loglik - walker.global_max;
        if (rel >= log_floor) mass[static_cast<std::size_t>(leaf.path.back())] += std::exp(rel);
    }
    std::vector<double> log_mass(mass.size(), kNegInf);
    for (std::size_t i = 0; i < mass.size(); ++i) {
        if (mass[i] > 0.0) log_mass[i] = walker.global_max + std::log(mass[i]);
    }

    ForecastDistribution dist = ForecastDistribution::from_log_masses(log_mass);
    dist.truncation_reason = walker.hit_cap ? "hard-cap" : "relative-floor";
    dist.steps_ahead = m;
    dist.refits = walker.refits;
    dist.warnings = std::move(walker.warnings);
    if (pl.keep_candidate_fits) dist.lattice = std::move(walker.leaves);
    return dist;
}

Count point_forecast(const ForecastDistribution& dist) {
    if (dist.probs.empty()) throw InvalidSpec("point_forecast: empty distribution");
    const auto it = std::max_element(dist.probs.begin(), dist.probs.end());
    return static_cast<Count>(std::distance(dist.probs.begin(), it));
}

bool HdrRegion::contiguous() const noexcept {
    for (std::size_t i = 1; i < members.size(); ++i) {
        if (members[i] != members[i - 1] + 1) return false;
    }
    return true;
}

bool HdrRegion::contains(Count y) const noexcept {
    return std::binary_search(members.begin(), members.end(), y);
}

HdrRegion hdr(const ForecastDistribution& dist, double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw InvalidSpec("HDR level must lie in (0,1), got " + std::to_string(level));
    }
    if (dist.probs.empty()) throw InvalidSpec("hdr: empty distribution");

    std::vector<std::size_t> order(dist.probs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dist.probs[a] > dist.probs[b];
    });

    HdrRegion region;
    region.level = level;
    double mass = 0.0;
    std::size_t taken = 0;
    while (taken < order.size() && mass < level) {
        mass += dist.probs[order[taken]];
        ++taken;
    }
    const double threshold = dist.probs[order[taken - 1]];
    while (taken < order.size() && dist.probs[order[taken]] == threshold) {
        mass += dist.probs[order[taken]];
        ++taken;
    }
    region.members.reserve(taken);
    for (std::size_t i = 0; i < taken; ++i) region.members.push_back(static_cast<Count>(order[i]));
    std::sort(region.members.begin(), region.members.end());
    region.attained_mass = mass;
    return region;
}

std::vector<ForecastStep> rolling_forecast(const ModelSpec& spec, const SeriesFrame& frame,
                                           int horizon, std::span<const Count> future_counts,
                                           const Matrix& future_covariates,
                                           const std::vector<double>& levels,
                                           const FitOptions& opts, const TruncationRule& trunc,
                                           const PlOptions& pl) {
    if (horizon < 1) throw InvalidSpec("horizon must be >= 1");
    if (future_covariates.rows() < horizon || future_covariates.cols() != spec.k) {
        throw InvalidSpec("future covariates must provide `horizon` rows of k columns");
    }
    if (static_cast<int>(future_counts.size()) < horizon - 1) {
        throw InvalidSpec("rolling forecast needs realized counts for the first horizon-1 steps");
    }

    std::vector<ForecastStep> steps;
    steps.reserve(static_cast<std::size_t>(horizon));
    SeriesFrame current = frame;
    PlOptions step_pl = pl;
    step_pl.keep_candidate_fits = true;
    for (int h = 0; h < horizon; ++h) {
        const Vector x_next = future_covariates.row(h).transpose();
        ForecastStep step;
        try {
            step.dist = one_step_pl(spec, current, x_next, opts, trunc, step_pl);
        } catch (const Error& e) {
            throw ForecastFailure("rolling forecast step " + std::to_string(h + 1) + ": " + e.what());
        }
        step.point = point_forecast(step.dist);
        for (double level : levels) step.regions.push_back(hdr(step.dist, level));
        if (static_cast<std::size_t>(h) < future_counts.size()) {
            const Count realized = future_counts[static_cast<std::size_t>(h)];
            step.truth = realized;
            // The candidate refit for the realized value is the next step's base fit.
            step_pl.base_init.reset();
            for (const auto& c : step.dist.candidates) {
                if (c.value == realized && !c.failed) step_pl.base_init = c.params;
            }
            current = current.appended(realized, x_next);
        }
        if (!pl.keep_candidate_fits) step.dist.candidates.clear();
        steps.push_back(std::move(step));
    }
    return steps;
}

Vector forecast_density_variance(const ForecastDistribution& dist, const FittedModel& fitted,
                                 const SeriesFrame& frame,
                                 const Eigen::Ref<const Vector>& next_covariates) {
    const ModelSpec& spec = fitted.spec;
    const Matrix G = conditional_information(spec, fitted.params, frame);
    Eigen::LDLT<Matrix> ldlt(G);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw SingularInformation("information matrix singular; forecast variance undefined");
    }

    const Vector nu = fitted.params.flatten();
    const Eigen::Index d = nu.size();
    const auto support = static_cast<Eigen::Index>(dist.size());

    // Column i holds d p(y) / d nu_i for every support point y.
    Matrix grad(support, d);
    auto pmf_at = [&](const Vector& point) {
        const double lam =
            next_lambda(spec, ParamVector::unflatten(spec, point), frame, next_covariates);
        Vector p(support);
        for (Eigen::Index y = 0; y < support; ++y) p[y] = std::exp(poisson_log_pmf(y, lam));
        return p;
    };
    for (Eigen::Index i = 0; i < d; ++i) {
        const double h = 1e-5 * std::max(1.0, std::abs(nu[i]));
        Vector up = nu, down = nu;
        up[i] += h;
        down[i] -= h;
        grad.col(i) = (pmf_at(up) - pmf_at(down)) / (2.0 * h);
    }
    const Matrix solved = ldlt.solve(grad.transpose());  // d x support
    Vector var(support);
    for (Eigen::Index y = 0; y < support; ++y) {
        var[y] = std::max(0.0, grad.row(y).dot(solved.col(y)));
    }
    return var;
}

}  // namespace garma
