#include "faultcast/design/block.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace faultcast::design {

namespace {

Eigen::MatrixXd dummy_matrix(const EncodedColumn& col, Eigen::Index n) {
    const auto p = static_cast<Eigen::Index>(col.schema.levels.size());
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, p);
    for (Eigen::Index i = 0; i < n; ++i) B(i, col.codes[static_cast<std::size_t>(i)]) = 1.0;
    return B;
}

// Indicator matrix against an externally supplied level order (MRF uses the
// graph's region order, which may be a superset of the data levels).
Eigen::MatrixXd indicator_against(const EncodedColumn& col,
                                  const std::vector<std::string>& levels, Eigen::Index n) {
    std::vector<int> remap(col.schema.levels.size(), -1);
    for (std::size_t j = 0; j < col.schema.levels.size(); ++j) {
        for (std::size_t g = 0; g < levels.size(); ++g) {
            if (levels[g] == col.schema.levels[j]) {
                remap[j] = static_cast<int>(g);
                break;
            }
        }
        if (remap[j] < 0)
            throw std::invalid_argument("region '" + col.schema.levels[j] +
                                        "' is not in the adjacency graph");
    }
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(levels.size()));
    for (Eigen::Index i = 0; i < n; ++i)
        B(i, remap[static_cast<std::size_t>(col.codes[static_cast<std::size_t>(i)])]) = 1.0;
    return B;
}

// Natural (pre-reparameterization) basis for a block kind.
Eigen::MatrixXd natural_basis(const DesignBlock& block, const EncodedTable& table);

Eigen::MatrixXd interaction_products(const DesignBlock& block, const EncodedTable& table);

Eigen::MatrixXd natural_basis(const DesignBlock& block, const EncodedTable& table) {
    const Eigen::Index n = table.n;
    switch (block.kind) {
        case BlockKind::intercept:
            return Eigen::MatrixXd::Ones(n, 1);
        case BlockKind::linear:
            return table.at(block.columns.at(0)).values;
        case BlockKind::ridge_categorical:
        case BlockKind::ordinal_smooth:
            return dummy_matrix(table.at(block.columns.at(0)), n);
        case BlockKind::pspline:
        case BlockKind::smooth: {
            const auto& x = table.at(block.columns.at(0)).values;
            Eigen::MatrixXd B(n, block.spline.knots - 1 + block.spline.degree);
            for (Eigen::Index i = 0; i < n; ++i)
                B.row(i) = bspline_row(x[i], block.x_min, block.x_max, block.spline).transpose();
            return B;
        }
        case BlockKind::mrf: {
            // Level order was frozen into kept-from-graph region names held
            // in block.columns[1..]; columns[0] is the data column.
            std::vector<std::string> regions(block.columns.begin() + 1, block.columns.end());
            return indicator_against(table.at(block.columns.at(0)), regions, n);
        }
        case BlockKind::interaction:
            return interaction_products(block, table);
        case BlockKind::aggregate_linear: {
            Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
            for (const auto& c : block.columns) sum += table.at(c).raw;
            return ((sum.array() - block.agg_mean) / block.agg_sd).matrix();
        }
        case BlockKind::aggregate_smooth: {
            const Eigen::Index p = block.spline.knots - 1 + block.spline.degree;
            Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, p);
            for (const auto& c : block.columns) {
                const auto& x = table.at(c).raw;
                for (Eigen::Index i = 0; i < n; ++i)
                    B.row(i) +=
                        bspline_row(x[i], block.x_min, block.x_max, block.spline).transpose();
            }
            return B;
        }
    }
    throw std::logic_error("unreachable");
}

// Expansion of one interaction constituent into its encoded columns.
Eigen::MatrixXd constituent_matrix(const EncodedColumn& col, Eigen::Index n) {
    switch (col.schema.kind) {
        case ColumnKind::numeric:
        case ColumnKind::binary:
            return col.values;
        case ColumnKind::categorical:
        case ColumnKind::ordinal:
            return dummy_matrix(col, n);
    }
    throw std::logic_error("unreachable");
}

Eigen::MatrixXd interaction_products(const DesignBlock& block, const EncodedTable& table) {
    const Eigen::Index n = table.n;
    std::vector<Eigen::MatrixXd> parts;
    int numeric_unstandardized = 0;
    for (const auto& name : block.columns) {
        const auto& col = table.at(name);
        if (col.schema.kind == ColumnKind::numeric && !col.schema.standardized)
            ++numeric_unstandardized;
        parts.push_back(constituent_matrix(col, n));
    }
    if (numeric_unstandardized >= 2)
        throw std::invalid_argument("interaction '" + block.term_id +
                                    "': numeric constituents must be standardized first");
    Eigen::MatrixXd prod = parts.front();
    for (std::size_t k = 1; k < parts.size(); ++k) {
        Eigen::MatrixXd next(n, prod.cols() * parts[k].cols());
        for (Eigen::Index a = 0; a < prod.cols(); ++a)
            for (Eigen::Index b = 0; b < parts[k].cols(); ++b)
                next.col(a * parts[k].cols() + b) =
                    prod.col(a).cwiseProduct(parts[k].col(b));
        prod = std::move(next);
    }
    if (!block.kept_columns.empty()) {
        Eigen::MatrixXd kept(n, static_cast<Eigen::Index>(block.kept_columns.size()));
        for (std::size_t j = 0; j < block.kept_columns.size(); ++j)
            kept.col(static_cast<Eigen::Index>(j)) = prod.col(block.kept_columns[j]);
        return kept;
    }
    return prod;
}

}  // namespace

std::string block_kind_name(BlockKind k) {
    switch (k) {
        case BlockKind::intercept: return "intercept";
        case BlockKind::linear: return "linear";
        case BlockKind::ridge_categorical: return "ridge_categorical";
        case BlockKind::ordinal_smooth: return "ordinal_smooth";
        case BlockKind::pspline: return "pspline";
        case BlockKind::smooth: return "smooth";
        case BlockKind::mrf: return "mrf";
        case BlockKind::interaction: return "interaction";
        case BlockKind::aggregate_linear: return "aggregate_linear";
        case BlockKind::aggregate_smooth: return "aggregate_smooth";
    }
    return "?";
}

BlockKind block_kind_from_name(const std::string& name) {
    for (int k = 0; k <= static_cast<int>(BlockKind::aggregate_smooth); ++k) {
        if (block_kind_name(static_cast<BlockKind>(k)) == name)
            return static_cast<BlockKind>(k);
    }
    throw std::invalid_argument("unknown block kind '" + name + "'");
}

Eigen::MatrixXd build_rows(const DesignBlock& block, const EncodedTable& table) {
    Eigen::MatrixXd B = natural_basis(block, table);
    if (block.reparam.size() > 0) B = B * block.reparam;
    if (block.center.size() > 0) B.rowwise() -= block.center.transpose();
    if (block.slope_center.size() > 0) {
        const auto& x = table.at(block.columns.at(0)).values;
        B.noalias() -= x * block.slope_center.transpose();
    }
    return B;
}

double effective_df(const Eigen::MatrixXd& B, const Eigen::MatrixXd& P, double lambda) {
    const Eigen::MatrixXd G = B.transpose() * B;
    Eigen::MatrixXd A = G + lambda * P;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        const double jitter = 1e-10 * (A.trace() / static_cast<double>(A.rows()) + 1.0);
        A.diagonal().array() += jitter;
        ldlt.compute(A);
        if (ldlt.info() != Eigen::Success)
            throw std::runtime_error("effective_df: singular system");
    }
    const Eigen::MatrixXd M = ldlt.solve(G);
    return 2.0 * M.trace() - (M * M).trace();
}

double calibrate_lambda(const Eigen::MatrixXd& B, const Eigen::MatrixXd& P, double df_target,
                        const std::string& term_id) {
    double lo = -12.0, hi = 12.0;
    const double df_lo = effective_df(B, P, std::pow(10.0, lo));
    const double df_hi = effective_df(B, P, std::pow(10.0, hi));
    if (df_target > df_lo + 1e-9 || df_target < df_hi - 1e-9)
        throw std::runtime_error("term '" + term_id + "': df target " +
                                 std::to_string(df_target) + " unreachable in [" +
                                 std::to_string(df_hi) + ", " + std::to_string(df_lo) + "]");
    double lambda = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        lambda = std::pow(10.0, mid);
        const double df = effective_df(B, P, lambda);
        if (std::fabs(df - df_target) < 1e-9) break;
        // df is monotone nonincreasing in lambda.
        if (df > df_target) lo = mid; else hi = mid;
    }
    if (std::fabs(effective_df(B, P, lambda) - df_target) > 1e-6)
        throw std::runtime_error("term '" + term_id + "': df calibration did not converge");
    return lambda;
}

DesignBlock intercept_block(const EncodedTable& table) {
    DesignBlock b;
    b.term_id = "intercept";
    b.kind = BlockKind::intercept;
    b.penalty = Eigen::MatrixXd::Zero(1, 1);
    b.B = natural_basis(b, table);
    return b;
}

DesignBlock linear_block(const EncodedTable& table, const std::string& column) {
    const auto& col = table.at(column);
    if (col.schema.kind == ColumnKind::categorical || col.schema.kind == ColumnKind::ordinal)
        throw std::invalid_argument("linear block needs a numeric or binary column");
    DesignBlock b;
    b.term_id = "linear(" + column + ")";
    b.kind = BlockKind::linear;
    b.columns = {column};
    b.penalty = Eigen::MatrixXd::Zero(1, 1);
    b.B = natural_basis(b, table);
    return b;
}

DesignBlock ridge_categorical_block(const EncodedTable& table, const std::string& column,
                                    double df_target) {
    DesignBlock b;
    b.term_id = "ridge(" + column + ")";
    b.kind = BlockKind::ridge_categorical;
    b.columns = {column};
    const auto p = static_cast<Eigen::Index>(table.at(column).schema.levels.size());
    b.penalty = Eigen::MatrixXd::Identity(p, p);
    b.df_target = df_target;
    b.B = natural_basis(b, table);
    b.lambda = calibrate_lambda(b.B, b.penalty, df_target, b.term_id);
    return b;
}

DesignBlock ordinal_block(const EncodedTable& table, const std::string& column,
                          double df_target) {
    const auto& col = table.at(column);
    if (col.schema.kind != ColumnKind::ordinal)
        throw std::invalid_argument("ordinal block needs an ordinal column");
    const auto p = static_cast<Eigen::Index>(col.schema.levels.size());
    if (p < 3) throw std::invalid_argument("ordinal block needs >= 3 levels");
    DesignBlock b;
    b.term_id = "ordinal(" + column + ")";
    b.kind = BlockKind::ordinal_smooth;
    b.columns = {column};
    const Eigen::MatrixXd D = difference_matrix(static_cast<int>(p), 2);
    b.penalty = D.transpose() * D;
    // Ridge the difference penalty's polynomial null space (constant and
    // linear level trends) so df targets below 2 remain reachable.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b.penalty);
    const double tol = 1e-10 * eig.eigenvalues().maxCoeff();
    for (Eigen::Index j = 0; j < p; ++j) {
        if (eig.eigenvalues()[j] <= tol) {
            const Eigen::VectorXd v = eig.eigenvectors().col(j);
            b.penalty += v * v.transpose();
        }
    }
    b.df_target = df_target;
    b.B = natural_basis(b, table);
    b.lambda = calibrate_lambda(b.B, b.penalty, df_target, b.term_id);
    return b;
}

}  // namespace faultcast::design
