#ifndef FAULTCAST_MODEL_SERIALIZE_HPP
#define FAULTCAST_MODEL_SERIALIZE_HPP

#include <string>

#include "faultcast/model/zadj_model.hpp"

namespace faultcast::model {

inline constexpr int kFormatVersion = 1;

// Single-document JSON holding both stage ensembles, the shared schema,
// standardization statistics, and the extrapolation ranges. Loading a file
// with an unknown format_version throws.
std::string to_json(const ZeroAdjustedModel& model);
ZeroAdjustedModel from_json(const std::string& text);

void save_model(const ZeroAdjustedModel& model, const std::string& path);
ZeroAdjustedModel load_model(const std::string& path);

}  // namespace faultcast::model

#endif
