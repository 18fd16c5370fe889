#include "faultcast/pipeline/synthetic.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "faultcast/dist/family.hpp"

namespace faultcast::pipeline {

namespace {

std::string iso_date(std::size_t day_index) {
    using namespace std::chrono;
    const year_month_day ymd{sys_days{year{2024} / January / 1} + days{
        static_cast<long>(day_index)}};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

double linear_predictor(const design::RawTable& covariates, std::size_t row,
                        const std::map<std::string, double>& coef) {
    double eta = 0.0;
    for (const auto& [name, value] : coef) {
        if (name == "(intercept)") {
            eta += value;
            continue;
        }
        if (!covariates.has_column(name))
            throw std::invalid_argument("synthetic coefficient names unknown column '" + name +
                                        "'");
        const auto& col = covariates.column(name);
        if (!col.is_numeric)
            throw std::invalid_argument("synthetic coefficient on non-numeric column '" + name +
                                        "'");
        eta += value * col.values[row];
    }
    return eta;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticConfig& config) {
    if (config.n_days == 0 || config.regions.empty())
        throw std::invalid_argument("synthetic: need at least one day and one region");
    if (config.fixed_xi0 && (*config.fixed_xi0 < 0.0 || *config.fixed_xi0 > 1.0))
        throw std::invalid_argument("synthetic: fixed_xi0 outside [0, 1]");
    const auto family = dist::make_family(config.family);
    if (!family->positive_support())
        throw std::invalid_argument("synthetic: positive-support family required");
    if (config.theta_coef.size() != static_cast<std::size_t>(family->param_count()))
        throw std::invalid_argument("synthetic: " + config.family + " needs " +
                                    std::to_string(family->param_count()) +
                                    " coefficient maps, got " +
                                    std::to_string(config.theta_coef.size()));

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);

    // Covariate panel, written as canonical CSV cells so the validated
    // parser supplies the derived columns.
    Csv csv;
    csv.header = kWeatherColumns;
    const std::vector<std::string> risk_levels = {"green", "yellow", "red"};
    for (std::size_t d = 0; d < config.n_days; ++d) {
        const std::string date = iso_date(d);
        for (const auto& region : config.regions) {
            for (int horizon = 1; horizon <= 2; ++horizon) {
                std::vector<std::string> row(kWeatherColumns.size());
                auto put = [&](const std::string& name, const std::string& v) {
                    row[csv.column(name)] = v;
                };
                auto putn = [&](const std::string& name, double v) {
                    put(name, format_number(v));
                };
                put("region", region);
                put("date", date);
                putn("horizon", horizon);
                put("risk", risk_levels[static_cast<std::size_t>(
                    std::min(2.0, std::floor(3.0 * unif(rng))))]);
                const double tmin = 2.0 + 6.0 * gauss(rng);
                putn("temp_min", tmin);
                putn("temp_max", tmin + std::fabs(4.0 + 2.0 * gauss(rng)));
                for (int q = 1; q <= 4; ++q) {
                    const std::string qs = "_q" + std::to_string(q);
                    putn("wind_dir" + qs, 360.0 * unif(rng));
                    const double mean = std::fabs(5.0 + 3.0 * gauss(rng));
                    putn("wind_mean" + qs, mean);
                    putn("wind_gust" + qs, mean + std::fabs(4.0 + 2.0 * gauss(rng)));
                }
                for (int h = 1; h <= 2; ++h) {
                    const std::string hs = "_h" + std::to_string(h);
                    const double rmin = expo(rng);
                    putn("rain_min" + hs, rmin);
                    putn("rain_max" + hs, rmin + 2.0 * expo(rng));
                    putn("snow_depth" + hs, 0.3 * expo(rng));
                    putn("snow_height" + hs, 0.1 * expo(rng));
                    putn("icing" + hs, unif(rng) < 0.05 ? 1.0 : 0.0);
                    put("lightning" + hs,
                        std::to_string(1 + static_cast<int>(std::min(4.0,
                            std::floor(5.0 * std::pow(unif(rng), 3.0))))));
                }
                put("faults", "0");
                csv.rows.push_back(std::move(row));
            }
        }
    }

    SyntheticData out;
    out.frame = parse_weather(csv);
    const auto n = static_cast<Eigen::Index>(csv.rows.size());
    const int K = family->param_count();
    out.xi0.resize(n);
    out.theta.resize(n, K);

    for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = static_cast<std::size_t>(i);
        double xi0;
        if (config.fixed_xi0) {
            xi0 = *config.fixed_xi0;
        } else {
            const double eta = linear_predictor(out.frame.covariates, row, config.zero_coef);
            xi0 = dist::Link{dist::LinkKind::logit}.inverse(eta);
        }
        out.xi0[i] = xi0;

        dist::ParameterVector theta(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) {
            const double eta =
                linear_predictor(out.frame.covariates, row, config.theta_coef[static_cast<std::size_t>(k)]);
            theta[static_cast<std::size_t>(k)] = family->link(k).inverse(eta);
            out.theta(i, k) = theta[static_cast<std::size_t>(k)];
        }
        family->check_theta(theta);

        // Both uniforms are always drawn so the stream stays aligned across
        // zero and positive branches.
        const double u0 = unif(rng);
        const double u1 = unif(rng);
        out.frame.faults[i] = u0 < xi0 ? 0.0 : family->quantile(u1, theta);
    }
    return out;
}

}  // namespace faultcast::pipeline
