#pragma once

#include "garma/experiments.hpp"
#include "garma/forecaster.hpp"
#include "garma/simulator.hpp"
#include "garma/types.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace garma::io {

using Json = nlohmann::json;

/**
 * A parsed series CSV.
 *
 * Dialect: comma separated, header row required, '#' lines ignored. The
 * first two columns are `time` and `count`; further columns are covariates.
 */
struct SeriesTable {
    std::vector<long> times;
    std::vector<Count> counts;
    Matrix covariates;  // n x (columns - 2), possibly zero columns
    std::vector<std::string> covariate_names;

    /// Frame using the CSV covariate columns; time_origin taken from the first time stamp.
    [[nodiscard]] SeriesFrame frame() const;
    /// Frame with covariates replaced by `x` (n rows).
    [[nodiscard]] SeriesFrame frame_with(const Matrix& x) const;
};

/// Throws IngestionError (with line number) or ValidationError naming the row.
[[nodiscard]] SeriesTable read_series_csv(std::istream& in);
[[nodiscard]] SeriesTable read_series_csv(const std::filesystem::path& path);

/// Plain numeric matrix CSV with a header row (used for future covariates).
[[nodiscard]] Matrix read_matrix_csv(const std::filesystem::path& path);

/// time,count[,covariates] with leading '#' comment lines.
void write_series_csv(std::ostream& out, const SeriesFrame& frame,
                      const std::vector<std::string>& covariate_names,
                      const std::vector<std::string>& comments = {});

[[nodiscard]] Json to_json(const ParamVector& params);
[[nodiscard]] Json to_json(const FittedModel& fitted, const std::vector<std::string>& names = {});
[[nodiscard]] Json to_json(const HdrRegion& region);
[[nodiscard]] Json to_json(const ForecastDistribution& dist, const std::vector<double>& levels);
[[nodiscard]] Json to_json(const ForecastStep& step);
[[nodiscard]] Json to_json(const StudyResult& study);
[[nodiscard]] Json to_json(const TwoStepReport& report);
[[nodiscard]] Json to_json(const CovariateSchema& schema);

/// "{0,1,2}": HDR members in set notation.
[[nodiscard]] std::string format_set(const HdrRegion& region);

/// Table with columns Y, Yhat and one set-valued HDR column per level (truth may be absent).
void write_two_step_table(std::ostream& out, const ForecastDistribution& dist,
                          const std::vector<double>& levels, std::size_t target_index,
                          std::optional<Count> truth);

/// y,prob,in_hdr_<level>... one row per support point.
void write_distribution_csv(std::ostream& out, const ForecastDistribution& dist,
                            const std::vector<double>& levels);

/// step,truth,median_point,lower_<level>,upper_<level>... one row per horizon step.
void write_study_csv(std::ostream& out, const StudyResult& study);

/**
 * Scenario JSON:
 * {"p":0,"q":2,"c":0.1,"beta":[...],"phi":[],"theta":[...],
 *  "covariates":{"intercept":true,"trend":true,"trend_scale":1,"periods":[12,6]},
 *  "n":100,"seed":42,"time_origin":0}
 */
[[nodiscard]] SimScenario scenario_from_json(const Json& j);
[[nodiscard]] Json to_json(const SimScenario& scn);
[[nodiscard]] CovariateSchema schema_from_json(const Json& j);

/// Reads a JSON document, throwing IngestionError on parse failure.
[[nodiscard]] Json read_json(const std::filesystem::path& path);

}  // namespace garma::io
