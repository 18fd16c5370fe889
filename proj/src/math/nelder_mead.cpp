#include "faultcast/math/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace faultcast::math {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0,
                             double initial_step,
                             int max_evals,
                             double ftol) {
    const std::size_t n = x0.size();
    NelderMeadResult res;

    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += initial_step;
    for (std::size_t i = 0; i <= n; ++i) {
        fv[i] = f(simplex[i]);
        ++res.evaluations;
    }

    auto order = [&] {
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> s2(n + 1);
        std::vector<double> f2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) { s2[i] = simplex[idx[i]]; f2[i] = fv[idx[i]]; }
        simplex.swap(s2);
        fv.swap(f2);
    };

    while (res.evaluations < max_evals) {
        order();
        if (std::fabs(fv[n] - fv[0]) <= ftol * (std::fabs(fv[0]) + ftol)) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);

        auto point = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + coef * (simplex[n][j] - centroid[j]);
            return p;
        };

        auto xr = point(-1.0);
        double fr = f(xr);
        ++res.evaluations;
        if (fr < fv[0]) {
            auto xe = point(-2.0);
            double fe = f(xe);
            ++res.evaluations;
            if (fe < fr) { simplex[n] = xe; fv[n] = fe; }
            else { simplex[n] = xr; fv[n] = fr; }
        } else if (fr < fv[n - 1]) {
            simplex[n] = xr; fv[n] = fr;
        } else {
            auto xc = point(fr < fv[n] ? -0.5 : 0.5);
            double fc = f(xc);
            ++res.evaluations;
            if (fc < std::min(fr, fv[n])) {
                simplex[n] = xc; fv[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    fv[i] = f(simplex[i]);
                    ++res.evaluations;
                }
            }
        }
    }
    order();
    res.x = simplex[0];
    res.value = fv[0];
    return res;
}

}  // namespace faultcast::math
