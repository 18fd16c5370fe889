#ifndef FAULTCAST_PIPELINE_WEATHER_HPP
#define FAULTCAST_PIPELINE_WEATHER_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "faultcast/design/schema.hpp"
#include "faultcast/pipeline/table.hpp"

namespace faultcast::pipeline {

// Exact, ordered input schema of the weather CSV.
inline const std::vector<std::string> kWeatherColumns = {
    "region",       "date",          "horizon",       "risk",
    "temp_min",     "temp_max",      "wind_dir_q1",   "wind_dir_q2",
    "wind_dir_q3",  "wind_dir_q4",   "wind_gust_q1",  "wind_gust_q2",
    "wind_gust_q3", "wind_gust_q4",  "wind_mean_q1",  "wind_mean_q2",
    "wind_mean_q3", "wind_mean_q4",  "rain_min_h1",   "rain_max_h1",
    "rain_min_h2",  "rain_max_h2",   "snow_depth_h1", "snow_height_h1",
    "icing_h1",     "snow_depth_h2", "snow_height_h2", "icing_h2",
    "lightning_h1", "lightning_h2",  "faults"};

inline const std::vector<std::string> kWindOctants = {"N",  "NE", "E",  "SE",
                                                      "S",  "SW", "W",  "NW"};

// Eight-sector compass binning; the north sector spans [337.5, 22.5).
std::string wind_octant(double degrees);

// Parsed + validated weather data: raw covariate columns (including derived
// wind octants and day-level gust/rain summaries), the response, and the
// date key used for blocked splitting.
struct WeatherFrame {
    design::RawTable covariates;
    Eigen::VectorXd faults;
    std::vector<std::string> region;
    std::vector<std::string> date;
};

WeatherFrame parse_weather(const Csv& csv);

// Renders a frame back to the canonical column order (derived columns are
// recomputed on parse, not serialized).
Csv weather_csv(const WeatherFrame& frame);

struct OverlapWeights {
    // (forecast_region, admin_region) -> weight in [0, 1]
    std::vector<std::tuple<std::string, std::string, double>> rows;
};

// Overlap CSV columns: forecast_region, admin_region, weight; weights must
// sum to 1 per admin region within 1e-9.
OverlapWeights parse_overlap(const Csv& csv);

// response(f) = sum_a weight(f, a) * count(a). Every admin region appearing
// in counts must be covered; weight rows naming unknown regions throw.
std::map<std::string, double> allocate_faults(const std::map<std::string, double>& admin_counts,
                                              const OverlapWeights& weights);

struct SplitIndices {
    std::vector<Eigen::Index> train, holdout, test;
};

// Reproducible date-blocked split: whole days stay together. A partition
// with a positive fraction must end up nonempty.
SplitIndices split_by_date(const std::vector<std::string>& dates,
                           const std::array<double, 3>& fractions, std::uint64_t seed);

// Modelling schema for the parsed covariates (kinds, ordinal level orders).
std::vector<design::ColumnSchema> weather_schema_decl();

}  // namespace faultcast::pipeline

#endif
