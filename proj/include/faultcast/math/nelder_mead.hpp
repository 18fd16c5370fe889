#ifndef FAULTCAST_MATH_NELDER_MEAD_HPP
#define FAULTCAST_MATH_NELDER_MEAD_HPP

#include <functional>
#include <vector>

namespace faultcast::math {

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
};

// Minimizes f starting from x0 with the standard simplex moves
// (reflection 1, expansion 2, contraction 0.5, shrink 0.5).
// Objectives may return +inf outside their domain.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0,
                             double initial_step = 0.5,
                             int max_evals = 2000,
                             double ftol = 1e-12);

}  // namespace faultcast::math

#endif
