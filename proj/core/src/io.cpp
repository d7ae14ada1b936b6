#include "garma/io.hpp"

#include "garma/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace garma::io {

namespace {

std::string trim(std::string_view s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) return {};
    auto end = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool is_missing(const std::string& s) {
    const std::string l = lower(s);
    return l.empty() || l == "na" || l == "nan" || l == "null";
}

std::string level_tag(double level) {
    std::ostringstream ss;
    ss << level;
    return ss.str();
}

}  // namespace

SeriesFrame SeriesTable::frame() const {
    SeriesFrame f;
    f.counts = counts;
    f.covariates = covariates;
    f.time_origin = times.empty() ? 0 : static_cast<int>(times.front() - 1);
    return f;
}

SeriesFrame SeriesTable::frame_with(const Matrix& x) const {
    if (static_cast<std::size_t>(x.rows()) != counts.size()) {
        throw IngestionError("covariate rows do not match the number of counts");
    }
    SeriesFrame f = frame();
    f.covariates = x;
    return f;
}

SeriesTable read_series_csv(std::istream& in) {
    SeriesTable table;
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    std::vector<std::vector<double>> cov_rows;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto fields = split_fields(t);
        if (header.empty()) {
            header = fields;
            if (header.size() < 2 || lower(header[0]) != "time" || lower(header[1]) != "count") {
                throw IngestionError("header must start with columns time,count", line_no);
            }
            table.covariate_names.assign(header.begin() + 2, header.end());
            continue;
        }
        if (fields.size() != header.size()) {
            throw IngestionError("expected " + std::to_string(header.size()) + " fields, found " +
                                     std::to_string(fields.size()),
                                 line_no);
        }
        for (const auto& f : fields) {
            if (is_missing(f)) throw IngestionError("missing value", line_no);
        }
        double time = 0.0, count = 0.0;
        if (!parse_double(fields[0], time) || time != std::floor(time)) {
            throw IngestionError("unparseable time '" + fields[0] + "'", line_no);
        }
        if (!parse_double(fields[1], count)) {
            throw IngestionError("unparseable count '" + fields[1] + "'", line_no);
        }
        const std::size_t row = table.counts.size() + 1;
        if (count < 0.0 || count != std::floor(count)) {
            throw ValidationError("row " + std::to_string(row) + " (line " + std::to_string(line_no) +
                                  "): count " + fields[1] + " is not a non-negative integer");
        }
        std::vector<double> cov(fields.size() - 2);
        for (std::size_t j = 2; j < fields.size(); ++j) {
            if (!parse_double(fields[j], cov[j - 2])) {
                throw IngestionError("unparseable covariate '" + fields[j] + "'", line_no);
            }
        }
        const long t_now = static_cast<long>(time);
        if (!table.times.empty() && t_now != table.times.back() + 1) {
            throw IngestionError("time stamps must be consecutive (gap before t=" +
                                     std::to_string(t_now) + ")",
                                 line_no);
        }
        table.times.push_back(t_now);
        table.counts.push_back(static_cast<Count>(count));
        cov_rows.push_back(std::move(cov));
    }
    if (header.empty()) throw IngestionError("empty input: no header row");
    if (table.counts.empty()) throw IngestionError("no data rows after header");

    const auto n = static_cast<Eigen::Index>(cov_rows.size());
    const auto k = static_cast<Eigen::Index>(table.covariate_names.size());
    table.covariates.resize(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            table.covariates(i, j) = cov_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    return table;
}

SeriesTable read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open " + path.string());
    return read_series_csv(in);
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto fields = split_fields(t);
        if (!header_seen) {
            header_seen = true;
            width = fields.size();
            continue;
        }
        if (fields.size() != width) throw IngestionError("ragged row", line_no);
        std::vector<double> row(width);
        for (std::size_t j = 0; j < width; ++j) {
            if (!parse_double(fields[j], row[j])) {
                throw IngestionError("unparseable value '" + fields[j] + "'", line_no);
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IngestionError("matrix CSV " + path.string() + " has no data rows");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

void write_series_csv(std::ostream& out, const SeriesFrame& frame,
                      const std::vector<std::string>& covariate_names,
                      const std::vector<std::string>& comments) {
    for (const auto& c : comments) out << "# " << c << '\n';
    out << "time,count";
    for (const auto& name : covariate_names) out << ',' << name;
    out << '\n';
    out << std::setprecision(17);
    for (std::size_t i = 0; i < frame.size(); ++i) {
        out << frame.time_origin + static_cast<long>(i) + 1 << ',' << frame.counts[i];
        for (std::size_t j = 0; j < covariate_names.size(); ++j) {
            out << ',' << frame.covariates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        out << '\n';
    }
}

namespace {
std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector to_eigen(const Json& j, const char* key) {
    if (!j.contains(key)) return Vector();
    const auto values = j.at(key).get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}
}  // namespace

Json to_json(const ParamVector& params) {
    return Json{{"beta", to_std(params.beta)}, {"phi", to_std(params.phi)},
                {"theta", to_std(params.theta)}};
}

Json to_json(const FittedModel& fitted, const std::vector<std::string>& names) {
    Json j;
    j["model"] = {{"p", fitted.spec.p}, {"q", fitted.spec.q}, {"k", fitted.spec.k},
                  {"c", fitted.spec.c}, {"link", "log"}};
    j["params"] = to_json(fitted.params);
    std::vector<Json> se;
    for (Eigen::Index i = 0; i < fitted.std_errors.size(); ++i) {
        const double s = fitted.std_errors[i];
        se.push_back(std::isfinite(s) ? Json(s) : Json(nullptr));
    }
    j["std_errors"] = se;
    if (!names.empty()) {
        const Vector flat = fitted.params.flatten();
        Json table = Json::array();
        for (std::size_t i = 0; i < names.size() && static_cast<Eigen::Index>(i) < flat.size(); ++i) {
            table.push_back({{"name", names[i]},
                             {"estimate", flat[static_cast<Eigen::Index>(i)]},
                             {"std_error", se[i]}});
        }
        j["coefficients"] = table;
    }
    j["deviance"] = fitted.deviance;
    j["loglik"] = fitted.loglik;
    j["neg2_loglik"] = fitted.neg2_loglik();
    j["converged"] = fitted.converged;
    j["iterations"] = fitted.iterations;
    j["score_norm"] = fitted.score_norm;
    j["warnings"] = fitted.warnings;
    return j;
}

Json to_json(const HdrRegion& region) {
    return Json{{"level", region.level},
                {"members", region.members},
                {"lower", region.lower()},
                {"upper", region.upper()},
                {"attained_mass", region.attained_mass},
                {"contiguous", region.contiguous()}};
}

Json to_json(const ForecastDistribution& dist, const std::vector<double>& levels) {
    Json j;
    std::vector<Count> support(dist.size());
    for (std::size_t i = 0; i < support.size(); ++i) support[i] = static_cast<Count>(i);
    j["support"] = support;
    j["probs"] = dist.probs;
    j["mode"] = point_forecast(dist);
    Json regions = Json::array();
    for (double level : levels) regions.push_back(to_json(hdr(dist, level)));
    j["hdr"] = regions;
    j["diagnostics"] = {{"truncation_bound", dist.truncation_bound},
                        {"truncation_reason", dist.truncation_reason},
                        {"log_unnormalized_total", dist.log_unnormalized_total},
                        {"steps_ahead", dist.steps_ahead},
                        {"refits", dist.refits},
                        {"warnings", dist.warnings}};
    return j;
}

Json to_json(const ForecastStep& step) {
    std::vector<double> levels;
    for (const auto& r : step.regions) levels.push_back(r.level);
    Json j = to_json(step.dist, levels);
    j["point"] = step.point;
    j["truth"] = step.truth ? Json(*step.truth) : Json(nullptr);
    return j;
}

Json to_json(const StudyResult& study) {
    Json j;
    j["scenario"] = study.scenario;
    j["n"] = study.n;
    j["horizon"] = study.horizon;
    j["levels"] = study.levels;
    j["replicates"] = study.replicates;
    j["failures"] = study.failures;
    j["seed"] = study.seed;
    j["truth"] = study.truth_first;
    j["median_point"] = study.median_point;
    Json hdrs = Json::array();
    for (std::size_t l = 0; l < study.levels.size(); ++l) {
        hdrs.push_back({{"level", study.levels[l]},
                        {"lower", study.median_lower[l]},
                        {"upper", study.median_upper[l]},
                        {"coverage", study.coverage[l]}});
    }
    j["hdr"] = hdrs;
    j["rmse"] = study.rmse;
    j["rmse_first_replicate"] = study.rmse_first_replicate;
    j["median_replicate_rmse"] = study.median_replicate_rmse;
    j["warnings"] = study.warnings;
    return j;
}

Json to_json(const TwoStepReport& report) {
    std::vector<double> levels;
    for (const auto& r : report.regions) levels.push_back(r.level);
    Json j;
    j["n"] = report.n;
    j["seed"] = report.seed;
    j["truth"] = report.truth;
    j["point"] = report.point;
    Json regions = Json::array();
    for (const auto& r : report.regions) regions.push_back(to_json(r));
    j["hdr"] = regions;
    j["distribution"] = to_json(report.dist, levels);
    j["seconds"] = report.seconds;
    return j;
}

Json to_json(const CovariateSchema& schema) {
    return Json{{"intercept", schema.intercept},
                {"trend", schema.trend},
                {"trend_scale", schema.trend_scale},
                {"periods", schema.periods}};
}

std::string format_set(const HdrRegion& region) {
    std::string s = "{";
    for (std::size_t i = 0; i < region.members.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(region.members[i]);
    }
    return s + "}";
}

void write_two_step_table(std::ostream& out, const ForecastDistribution& dist,
                          const std::vector<double>& levels, std::size_t target_index,
                          std::optional<Count> truth) {
    const std::string y = "Y_" + std::to_string(target_index);
    std::vector<std::string> cells{y, "Yhat_" + std::to_string(target_index) + "(PL)"};
    std::vector<std::string> row{truth ? std::to_string(*truth) : "-",
                                 std::to_string(point_forecast(dist))};
    for (double level : levels) {
        std::ostringstream h;
        h << level * 100.0 << "% HDR";
        cells.push_back(h.str());
        row.push_back(format_set(hdr(dist, level)));
    }
    std::vector<std::size_t> width(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) width[i] = std::max(cells[i].size(), row[i].size()) + 2;
    for (std::size_t i = 0; i < cells.size(); ++i) out << std::left << std::setw(static_cast<int>(width[i])) << cells[i];
    out << '\n';
    for (std::size_t i = 0; i < row.size(); ++i) out << std::left << std::setw(static_cast<int>(width[i])) << row[i];
    out << '\n' << std::right;
}

void write_distribution_csv(std::ostream& out, const ForecastDistribution& dist,
                            const std::vector<double>& levels) {
    std::vector<HdrRegion> regions;
    for (double level : levels) regions.push_back(hdr(dist, level));
    out << "y,prob";
    for (double level : levels) out << ",in_hdr_" << level_tag(level);
    out << '\n' << std::setprecision(17);
    for (std::size_t y = 0; y < dist.size(); ++y) {
        out << y << ',' << dist.probs[y];
        for (const auto& r : regions) out << ',' << (r.contains(static_cast<Count>(y)) ? 1 : 0);
        out << '\n';
    }
}

void write_study_csv(std::ostream& out, const StudyResult& study) {
    out << "step,truth,median_point";
    for (double level : study.levels) {
        out << ",lower_" << level_tag(level) << ",upper_" << level_tag(level);
    }
    out << '\n';
    for (int h = 0; h < study.horizon; ++h) {
        const auto hs = static_cast<std::size_t>(h);
        out << study.n + hs + 1 << ',' << study.truth_first[hs] << ',' << study.median_point[hs];
        for (std::size_t l = 0; l < study.levels.size(); ++l) {
            out << ',' << study.median_lower[l][hs] << ',' << study.median_upper[l][hs];
        }
        out << '\n';
    }
}

CovariateSchema schema_from_json(const Json& j) {
    CovariateSchema schema;
    schema.intercept = j.value("intercept", true);
    schema.trend = j.value("trend", false);
    schema.trend_scale = j.value("trend_scale", 1.0);
    schema.periods = j.value("periods", std::vector<int>{});
    schema.validate();
    return schema;
}

SimScenario scenario_from_json(const Json& j) {
    try {
        SimScenario scn;
        scn.schema = schema_from_json(j.value("covariates", Json::object()));
        scn.params.beta = to_eigen(j, "beta");
        scn.params.phi = to_eigen(j, "phi");
        scn.params.theta = to_eigen(j, "theta");
        scn.spec.p = j.value("p", static_cast<int>(scn.params.phi.size()));
        scn.spec.q = j.value("q", static_cast<int>(scn.params.theta.size()));
        scn.spec.k = scn.schema.dim();
        scn.spec.c = j.value("c", kDefaultClip);
        scn.n = j.value("n", std::size_t{100});
        scn.seed = j.value("seed", std::uint64_t{0});
        scn.time_origin = j.value("time_origin", 0);
        scn.validate();
        return scn;
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("invalid scenario JSON: ") + e.what());
    }
}

Json to_json(const SimScenario& scn) {
    return Json{{"p", scn.spec.p},
                {"q", scn.spec.q},
                {"c", scn.spec.c},
                {"beta", to_std(scn.params.beta)},
                {"phi", to_std(scn.params.phi)},
                {"theta", to_std(scn.params.theta)},
                {"covariates", to_json(scn.schema)},
                {"n", scn.n},
                {"seed", scn.seed},
                {"time_origin", scn.time_origin}};
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw IngestionError(path.string() + ": " + e.what());
    }
}

}  // namespace garma::io
