#ifndef FAULTCAST_PIPELINE_SYNTHETIC_HPP
#define FAULTCAST_PIPELINE_SYNTHETIC_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "faultcast/pipeline/weather.hpp"

namespace faultcast::pipeline {

// Simulated weather panel with a known zero-adjusted generating model.
// Linear predictors are built on the *raw* covariate values; coefficient
// maps use raw column names plus the "(intercept)" key. The zero stage is
// logit P(y = 0) unless fixed_xi0 pins the zero probability directly.
struct SyntheticConfig {
    std::size_t n_days = 200;
    std::vector<std::string> regions = {"R1", "R2", "R3"};
    std::string family = "gamma";  // positive stage
    std::uint64_t seed = 1;
    std::map<std::string, double> zero_coef = {{"(intercept)", 0.0}};
    // One map per positive-stage parameter, on the link scale.
    std::vector<std::map<std::string, double>> theta_coef = {
        {{"(intercept)", 1.0}}, {{"(intercept)", -0.5}}};
    std::optional<double> fixed_xi0;
};

struct SyntheticData {
    WeatherFrame frame;
    Eigen::VectorXd xi0;    // true zero probability per row
    Eigen::MatrixXd theta;  // true positive-stage parameters, natural scale
};

// Deterministic for a fixed config (bit-identical replays). Throws on
// inadmissible generated parameters or unknown coefficient columns.
SyntheticData generate_synthetic(const SyntheticConfig& config);

}  // namespace faultcast::pipeline

#endif
