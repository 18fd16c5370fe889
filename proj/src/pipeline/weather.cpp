#include "faultcast/pipeline/weather.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace faultcast::pipeline {

std::string wind_octant(double degrees) {
    double d = std::fmod(degrees, 360.0);
    if (d < 0.0) d += 360.0;
    const int idx = static_cast<int>(std::floor(std::fmod(d + 22.5, 360.0) / 45.0));
    return kWindOctants[static_cast<std::size_t>(idx)];
}

namespace {

const std::vector<std::string> kRiskLevels = {"green", "yellow", "red"};
const std::vector<std::string> kLightningLevels = {"1", "2", "3", "4", "5"};

[[noreturn]] void row_error(std::size_t row, const std::string& message) {
    throw std::invalid_argument("weather row " + std::to_string(row + 1) + ": " + message);
}

}  // namespace

WeatherFrame parse_weather(const Csv& csv) {
    if (csv.header != kWeatherColumns) {
        std::string got;
        for (const auto& h : csv.header) got += (got.empty() ? "" : ",") + h;
        throw std::invalid_argument("weather csv: header mismatch; expected the canonical " +
                                    std::to_string(kWeatherColumns.size()) +
                                    "-column order, got: " + got);
    }
    const std::size_t n = csv.rows.size();
    if (n == 0) throw std::invalid_argument("weather csv: no data rows");

    WeatherFrame f;
    f.faults.resize(static_cast<Eigen::Index>(n));
    f.region.reserve(n);
    f.date.reserve(n);

    auto numeric_col = [&](const std::string& name) {
        design::RawColumn c;
        c.name = name;
        c.is_numeric = true;
        c.values.reserve(n);
        return c;
    };
    auto label_col = [&](const std::string& name) {
        design::RawColumn c;
        c.name = name;
        c.is_numeric = false;
        c.labels.reserve(n);
        return c;
    };

    std::vector<design::RawColumn> cols;
    cols.push_back(label_col("region"));
    cols.push_back(numeric_col("horizon_day2"));
    cols.push_back(label_col("risk"));
    for (const std::string name :
         {"temp_min", "temp_max", "wind_dir_q1", "wind_dir_q2", "wind_dir_q3", "wind_dir_q4",
          "wind_gust_q1", "wind_gust_q2", "wind_gust_q3", "wind_gust_q4", "wind_mean_q1",
          "wind_mean_q2", "wind_mean_q3", "wind_mean_q4", "rain_min_h1", "rain_max_h1",
          "rain_min_h2", "rain_max_h2", "snow_depth_h1", "snow_height_h1", "snow_depth_h2",
          "snow_height_h2"})
        cols.push_back(numeric_col(name));
    cols.push_back(numeric_col("icing_h1"));
    cols.push_back(numeric_col("icing_h2"));
    cols.push_back(label_col("lightning_h1"));
    cols.push_back(label_col("lightning_h2"));
    for (const std::string name : {"wind_oct_q1", "wind_oct_q2", "wind_oct_q3", "wind_oct_q4"})
        cols.push_back(label_col(name));
    for (const std::string name : {"wind_gust_max", "wind_mean_max", "rain_max"})
        cols.push_back(numeric_col(name));
    design::RawTable& table = f.covariates;
    table.columns = std::move(cols);

    auto col = [&](const std::string& name) -> design::RawColumn& {
        for (auto& c : table.columns)
            if (c.name == name) return c;
        throw std::logic_error("missing column " + name);
    };
    auto cell = [&](std::size_t i, const std::string& name) -> const std::string& {
        return csv.rows[i][csv.column(name)];
    };
    auto num = [&](std::size_t i, const std::string& name) {
        return to_number(cell(i, name), name, i);
    };

    for (std::size_t i = 0; i < n; ++i) {
        f.region.push_back(cell(i, "region"));
        f.date.push_back(cell(i, "date"));
        col("region").labels.push_back(cell(i, "region"));

        const double horizon = num(i, "horizon");
        if (horizon != 1.0 && horizon != 2.0) row_error(i, "horizon must be 1 or 2");
        col("horizon_day2").values.push_back(horizon - 1.0);

        const std::string& risk = cell(i, "risk");
        if (std::find(kRiskLevels.begin(), kRiskLevels.end(), risk) == kRiskLevels.end())
            row_error(i, "risk '" + risk + "' not in {green, yellow, red}");
        col("risk").labels.push_back(risk);

        const double tmin = num(i, "temp_min"), tmax = num(i, "temp_max");
        if (tmin > tmax) row_error(i, "temp_min exceeds temp_max");
        col("temp_min").values.push_back(tmin);
        col("temp_max").values.push_back(tmax);

        double gust_max = -std::numeric_limits<double>::infinity();
        double mean_max = -std::numeric_limits<double>::infinity();
        for (int q = 1; q <= 4; ++q) {
            const std::string qs = "_q" + std::to_string(q);
            const double dir = num(i, "wind_dir" + qs);
            const double gust = num(i, "wind_gust" + qs);
            const double mean = num(i, "wind_mean" + qs);
            col("wind_dir" + qs).values.push_back(dir);
            col("wind_oct" + qs).labels.push_back(wind_octant(dir));
            col("wind_gust" + qs).values.push_back(gust);
            col("wind_mean" + qs).values.push_back(mean);
            gust_max = std::max(gust_max, gust);
            mean_max = std::max(mean_max, mean);
        }
        col("wind_gust_max").values.push_back(gust_max);
        col("wind_mean_max").values.push_back(mean_max);

        double rain_max = -std::numeric_limits<double>::infinity();
        for (int h = 1; h <= 2; ++h) {
            const std::string hs = "_h" + std::to_string(h);
            const double rmin = num(i, "rain_min" + hs);
            const double rmax = num(i, "rain_max" + hs);
            if (rmin > rmax) row_error(i, "rain_min" + hs + " exceeds rain_max" + hs);
            col("rain_min" + hs).values.push_back(rmin);
            col("rain_max" + hs).values.push_back(rmax);
            rain_max = std::max(rain_max, rmax);

            col("snow_depth" + hs).values.push_back(num(i, "snow_depth" + hs));
            col("snow_height" + hs).values.push_back(num(i, "snow_height" + hs));

            const double icing = num(i, "icing" + hs);
            if (icing != 0.0 && icing != 1.0) row_error(i, "icing" + hs + " must be 0 or 1");
            col("icing" + hs).values.push_back(icing);

            const std::string& light = cell(i, "lightning" + hs);
            if (std::find(kLightningLevels.begin(), kLightningLevels.end(), light) ==
                kLightningLevels.end())
                row_error(i, "lightning" + hs + " '" + light + "' not in [1..5]");
            col("lightning" + hs).labels.push_back(light);
        }
        col("rain_max").values.push_back(rain_max);

        const double faults = num(i, "faults");
        if (faults < 0.0) row_error(i, "negative fault count");
        f.faults[static_cast<Eigen::Index>(i)] = faults;
    }
    return f;
}

Csv weather_csv(const WeatherFrame& frame) {
    Csv out;
    out.header = kWeatherColumns;
    const std::size_t n = frame.region.size();
    auto col = [&](const std::string& name) -> const design::RawColumn& {
        return frame.covariates.column(name);
    };
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> row;
        row.reserve(kWeatherColumns.size());
        for (const auto& name : kWeatherColumns) {
            if (name == "region")
                row.push_back(frame.region[i]);
            else if (name == "date")
                row.push_back(frame.date[i]);
            else if (name == "horizon")
                row.push_back(format_number(col("horizon_day2").values[i] + 1.0));
            else if (name == "risk" || name == "lightning_h1" || name == "lightning_h2")
                row.push_back(col(name == "risk" ? "risk" : name).labels[i]);
            else if (name == "faults")
                row.push_back(format_number(frame.faults[static_cast<Eigen::Index>(i)]));
            else
                row.push_back(format_number(col(name).values[i]));
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

OverlapWeights parse_overlap(const Csv& csv) {
    const std::vector<std::string> expected = {"forecast_region", "admin_region", "weight"};
    if (csv.header != expected)
        throw std::invalid_argument(
            "overlap csv: expected columns forecast_region,admin_region,weight");
    OverlapWeights w;
    std::map<std::string, double> admin_sum;
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
        const double weight = to_number(csv.rows[i][2], "weight", i);
        if (weight < 0.0 || weight > 1.0)
            throw std::invalid_argument("overlap row " + std::to_string(i + 1) +
                                        ": weight outside [0, 1]");
        w.rows.emplace_back(csv.rows[i][0], csv.rows[i][1], weight);
        admin_sum[csv.rows[i][1]] += weight;
    }
    for (const auto& [admin, sum] : admin_sum)
        if (std::fabs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("overlap: weights for admin region '" + admin +
                                        "' sum to " + std::to_string(sum) + ", expected 1");
    return w;
}

std::map<std::string, double> allocate_faults(const std::map<std::string, double>& admin_counts,
                                              const OverlapWeights& weights) {
    std::map<std::string, double> out;
    std::map<std::string, bool> covered;
    for (const auto& [forecast, admin, weight] : weights.rows) {
        const auto it = admin_counts.find(admin);
        if (it == admin_counts.end())
            throw std::invalid_argument("overlap references unknown admin region '" + admin +
                                        "'");
        out[forecast] += weight * it->second;
        covered[admin] = true;
    }
    for (const auto& [admin, count] : admin_counts)
        if (!covered.count(admin))
            throw std::invalid_argument("admin region '" + admin + "' has no overlap weights");
    return out;
}

SplitIndices split_by_date(const std::vector<std::string>& dates,
                           const std::array<double, 3>& fractions, std::uint64_t seed) {
    double sum = 0.0;
    for (double v : fractions) {
        if (v < 0.0) throw std::invalid_argument("split: negative fraction");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("split: fractions must sum to 1");

    std::vector<std::string> unique;
    for (const auto& d : dates)
        if (std::find(unique.begin(), unique.end(), d) == unique.end()) unique.push_back(d);
    std::sort(unique.begin(), unique.end());  // canonical order before shuffling
    std::mt19937_64 rng(seed);
    std::shuffle(unique.begin(), unique.end(), rng);

    const auto D = static_cast<double>(unique.size());
    const auto n1 = static_cast<std::size_t>(std::llround(fractions[0] * D));
    const auto n2 = static_cast<std::size_t>(std::llround((fractions[0] + fractions[1]) * D));
    std::map<std::string, int> bucket;
    for (std::size_t i = 0; i < unique.size(); ++i)
        bucket[unique[i]] = i < n1 ? 0 : (i < n2 ? 1 : 2);

    SplitIndices out;
    for (std::size_t i = 0; i < dates.size(); ++i) {
        const int b = bucket.at(dates[i]);
        (b == 0 ? out.train : b == 1 ? out.holdout : out.test)
            .push_back(static_cast<Eigen::Index>(i));
    }
    if ((fractions[0] > 0.0 && out.train.empty()) ||
        (fractions[1] > 0.0 && out.holdout.empty()) ||
        (fractions[2] > 0.0 && out.test.empty()))
        throw std::invalid_argument("split: a requested partition came out empty");
    return out;
}

std::vector<design::ColumnSchema> weather_schema_decl() {
    std::vector<design::ColumnSchema> decl;
    auto add = [&](const std::string& name, design::ColumnKind kind,
                   std::vector<std::string> levels = {}) {
        decl.push_back({name, kind, std::move(levels), 0.0, 1.0, false});
    };
    add("region", design::ColumnKind::categorical);
    add("horizon_day2", design::ColumnKind::binary);
    add("risk", design::ColumnKind::ordinal, kRiskLevels);
    for (const std::string name :
         {"temp_min", "temp_max", "wind_dir_q1", "wind_dir_q2", "wind_dir_q3", "wind_dir_q4",
          "wind_gust_q1", "wind_gust_q2", "wind_gust_q3", "wind_gust_q4", "wind_mean_q1",
          "wind_mean_q2", "wind_mean_q3", "wind_mean_q4", "rain_min_h1", "rain_max_h1",
          "rain_min_h2", "rain_max_h2", "snow_depth_h1", "snow_height_h1", "snow_depth_h2",
          "snow_height_h2", "wind_gust_max", "wind_mean_max", "rain_max"})
        add(name, design::ColumnKind::numeric);
    add("icing_h1", design::ColumnKind::binary);
    add("icing_h2", design::ColumnKind::binary);
    add("lightning_h1", design::ColumnKind::ordinal, kLightningLevels);
    add("lightning_h2", design::ColumnKind::ordinal, kLightningLevels);
    for (const std::string name : {"wind_oct_q1", "wind_oct_q2", "wind_oct_q3", "wind_oct_q4"})
        add(name, design::ColumnKind::categorical, kWindOctants);
    return decl;
}

}  // namespace faultcast::pipeline
