#include <cmath>
#include <stdexcept>

#include "faultcast/design/block.hpp"

namespace faultcast::design {

Eigen::MatrixXd difference_matrix(int p, int order) {
    if (order < 1 || order >= p)
        throw std::invalid_argument("difference_matrix: need 1 <= order < p");
    Eigen::MatrixXd D = Eigen::MatrixXd::Identity(p, p);
    for (int d = 0; d < order; ++d) {
        const auto rows = D.rows() - 1;
        Eigen::MatrixXd next(rows, p);
        for (Eigen::Index i = 0; i < rows; ++i) next.row(i) = D.row(i + 1) - D.row(i);
        D = std::move(next);
    }
    return D;
}

Eigen::VectorXd bspline_row(double x, double x_min, double x_max, const SplineConfig& config) {
    const int nseg = config.knots - 1;
    const int degree = config.degree;
    if (nseg < 1 || degree < 1) throw std::invalid_argument("bspline_row: bad spline config");
    const double h = (x_max - x_min) / nseg;
    if (!(h > 0.0)) throw std::invalid_argument("bspline_row: empty range");
    // Constant extrapolation outside the training range; the extrapolation
    // guard reports it separately.
    x = std::clamp(x, x_min, x_max);

    const int p = nseg + degree;          // basis functions
    const int nknots = nseg + 2 * degree + 1;
    auto knot = [&](int j) { return x_min + (j - degree) * h; };

    // Degree-0 seed.
    std::vector<double> N(static_cast<std::size_t>(nknots - 1), 0.0);
    int seg = static_cast<int>(std::floor((x - x_min) / h));
    seg = std::clamp(seg, 0, nseg - 1);
    N[static_cast<std::size_t>(degree + seg)] = 1.0;

    // Cox-de Boor recursion (uniform knots, denominators never vanish).
    for (int d = 1; d <= degree; ++d) {
        for (int j = 0; j + d < nknots - 1; ++j) {
            const double left = (x - knot(j)) / (knot(j + d) - knot(j)) * N[static_cast<std::size_t>(j)];
            const double right = (knot(j + d + 1) - x) / (knot(j + d + 1) - knot(j + 1)) *
                                 N[static_cast<std::size_t>(j + 1)];
            N[static_cast<std::size_t>(j)] = left + right;
        }
    }
    Eigen::VectorXd row(p);
    for (int j = 0; j < p; ++j) row[j] = N[static_cast<std::size_t>(j)];
    return row;
}

DesignBlock pspline_block(const EncodedTable& table, const std::string& column,
                          SplineConfig config) {
    const auto& col = table.at(column);
    if (col.schema.kind != ColumnKind::numeric)
        throw std::invalid_argument("pspline block needs a numeric column");
    if (config.knots < config.penalty_order + config.degree + 1)
        throw std::invalid_argument("pspline: need knots >= penalty_order + degree + 1");
    const double lo = col.values.minCoeff();
    const double hi = col.values.maxCoeff();
    if (!(hi > lo)) throw std::invalid_argument("no spread for spline on '" + column + "'");

    DesignBlock b;
    b.term_id = "pspline(" + column + ")";
    b.kind = BlockKind::pspline;
    b.columns = {column};
    b.spline = config;
    b.x_min = lo;
    b.x_max = hi;
    const int p = config.knots - 1 + config.degree;
    const Eigen::MatrixXd D = difference_matrix(p, config.penalty_order);
    b.penalty = D.transpose() * D;
    b.B = build_rows(b, table);
    return b;
}

std::pair<DesignBlock, DesignBlock> decompose_linear_smooth(const EncodedTable& table,
                                                            const std::string& column,
                                                            SplineConfig config,
                                                            double df_target) {
    DesignBlock lin = linear_block(table, column);

    DesignBlock sm = pspline_block(table, column, config);
    sm.kind = BlockKind::smooth;
    sm.term_id = "smooth(" + column + ")";

    // Reparameterize onto the difference penalty's range space; the
    // polynomial null space (constant + linear) is carried by the intercept
    // and linear learners instead.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sm.penalty);
    const double tol = 1e-10 * eig.eigenvalues().maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < eig.eigenvalues().size(); ++j)
        if (eig.eigenvalues()[j] > tol) keep.push_back(j);
    Eigen::MatrixXd U(sm.penalty.rows(), static_cast<Eigen::Index>(keep.size()));
    Eigen::VectorXd d(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        U.col(static_cast<Eigen::Index>(j)) = eig.eigenvectors().col(keep[j]);
        d[static_cast<Eigen::Index>(j)] = eig.eigenvalues()[keep[j]];
    }
    sm.reparam = U;
    sm.penalty = d.asDiagonal();

    // Orthogonalize the columns against the constant and the covariate on
    // the training rows; the same affine map is replayed at predict time.
    Eigen::MatrixXd Z = sm.B * U;
    const Eigen::VectorXd mean = Z.colwise().mean();
    Z.rowwise() -= mean.transpose();
    const auto& x = table.at(column).values;  // standardized, training mean ~0
    const Eigen::VectorXd xc = x.array() - x.mean();
    const double xtx = xc.squaredNorm();
    const Eigen::VectorXd slope = Z.transpose() * xc / xtx;
    // b(x*) = raw_row*U - (mean - x_mean * slope) - x* * slope
    sm.center = mean - x.mean() * slope;
    sm.slope_center = slope;
    sm.B = build_rows(sm, table);
    sm.df_target = df_target;
    sm.lambda = calibrate_lambda(sm.B, sm.penalty, df_target, sm.term_id);
    return {std::move(lin), std::move(sm)};
}

DesignBlock aggregate_linear_block(const EncodedTable& table,
                                   const std::vector<std::string>& columns, bool standardize) {
    if (columns.empty()) throw std::invalid_argument("aggregate: need >= 1 interval column");
    DesignBlock b;
    b.term_id = "agg_linear(" + columns.front() + "..)";
    b.kind = BlockKind::aggregate_linear;
    b.columns = columns;
    b.penalty = Eigen::MatrixXd::Zero(1, 1);
    if (standardize) {
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(table.n);
        for (const auto& c : columns) sum += table.at(c).raw;
        b.agg_mean = sum.mean();
        b.agg_sd = std::sqrt((sum.array() - b.agg_mean).square().sum() /
                             static_cast<double>(table.n));
        if (!(b.agg_sd > 0.0))
            throw std::invalid_argument("aggregate: no spread in interval sum");
    }
    b.B = build_rows(b, table);
    return b;
}

DesignBlock aggregate_smooth_block(const EncodedTable& table,
                                   const std::vector<std::string>& columns,
                                   SplineConfig config) {
    if (columns.empty()) throw std::invalid_argument("aggregate: need >= 1 interval column");
    DesignBlock b;
    b.term_id = "agg_smooth(" + columns.front() + "..)";
    b.kind = BlockKind::aggregate_smooth;
    b.columns = columns;
    b.spline = config;
    // Shared knot vector over the pooled raw range of all intervals.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& c : columns) {
        const auto& col = table.at(c);
        if (col.schema.kind != ColumnKind::numeric)
            throw std::invalid_argument("aggregate: interval columns must be numeric");
        lo = std::min(lo, col.raw.minCoeff());
        hi = std::max(hi, col.raw.maxCoeff());
    }
    if (!(hi > lo)) throw std::invalid_argument("aggregate: no spread across intervals");
    b.x_min = lo;
    b.x_max = hi;
    const int p = config.knots - 1 + config.degree;
    const Eigen::MatrixXd D = difference_matrix(p, config.penalty_order);
    b.penalty = D.transpose() * D;
    b.B = build_rows(b, table);
    return b;
}

}  // namespace faultcast::design
