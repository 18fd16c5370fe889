#ifndef FAULTCAST_DESIGN_BLOCK_HPP
#define FAULTCAST_DESIGN_BLOCK_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "faultcast/design/schema.hpp"

namespace faultcast::design {

enum class BlockKind {
    intercept,
    linear,
    ridge_categorical,
    ordinal_smooth,
    pspline,         // raw B-spline basis with difference penalty
    smooth,          // P-spline reparameterized away from its polynomial null space
    mrf,
    interaction,
    aggregate_linear,
    aggregate_smooth,
};

std::string block_kind_name(BlockKind k);
BlockKind block_kind_from_name(const std::string& name);

// Equidistant-knot B-spline settings shared by the smooth block builders.
struct SplineConfig {
    int knots = 20;        // knots spanning [min, max] inclusive
    int degree = 3;
    int penalty_order = 2;
};

// One base learner's design: a reproducible recipe (columns + transform
// state) plus its penalty, calibrated penalty weight, and the cached
// training-basis matrix. Immutable once calibrated.
struct DesignBlock {
    std::string term_id;
    BlockKind kind = BlockKind::linear;
    std::vector<std::string> columns;

    // Spline state (pspline/smooth/aggregate blocks).
    SplineConfig spline;
    double x_min = 0.0, x_max = 0.0;

    // Post-multiplier mapping the natural basis into final coordinates
    // (penalty-range reparameterization); empty when unused.
    Eigen::MatrixXd reparam;
    // Pointwise centering: final row b(x) <- b(x) - center - x * slope_center,
    // fitted on training data; empty when unused.
    Eigen::VectorXd center;
    Eigen::VectorXd slope_center;
    // Interaction blocks: indices of retained product columns.
    std::vector<int> kept_columns;
    // Aggregate-linear standardization of the interval sum.
    double agg_mean = 0.0;
    double agg_sd = 1.0;

    Eigen::MatrixXd penalty;   // p x p symmetric PSD
    double lambda = 0.0;
    double df_target = 0.0;    // 0 => unpenalized
    Eigen::MatrixXd B;         // training basis (n x p)

    Eigen::Index cols() const { return B.cols(); }
};

// Rebuilds the block's basis rows for arbitrary (schema-encoded) data,
// applying the exact transform state fitted at training time.
Eigen::MatrixXd build_rows(const DesignBlock& block, const EncodedTable& table);

// Effective degrees of freedom tr(2S - S'S) of the smoother
// S = B (B'B + lambda P)^-1 B'.
double effective_df(const Eigen::MatrixXd& B, const Eigen::MatrixXd& P, double lambda);

// Solves df(lambda) = df_target by bisection on log10(lambda) in [-12, 12].
// Throws when the target is unreachable.
double calibrate_lambda(const Eigen::MatrixXd& B, const Eigen::MatrixXd& P, double df_target,
                        const std::string& term_id);

// ---- block builders -------------------------------------------------------

DesignBlock intercept_block(const EncodedTable& table);

// Single standardized column, unpenalized slope, no intercept.
DesignBlock linear_block(const EncodedTable& table, const std::string& column);

// Dummy-coded categorical with ridge penalty, df calibrated.
DesignBlock ridge_categorical_block(const EncodedTable& table, const std::string& column,
                                    double df_target = 1.0);

// Dummy-coded ordinal with a second-order difference penalty across adjacent
// levels; the penalty's polynomial null space is ridge-penalized so that any
// df target below the null-space dimension stays reachable.
DesignBlock ordinal_block(const EncodedTable& table, const std::string& column,
                          double df_target = 1.0);

// Raw P-spline block: B-spline basis on equidistant knots over the column's
// standardized range, difference-matrix penalty, uncalibrated.
DesignBlock pspline_block(const EncodedTable& table, const std::string& column,
                          SplineConfig config = {});

// Decomposition of a numeric covariate into an unpenalized linear block and
// a centered smooth block (penalty-range reparameterized, orthogonal to the
// constant and to the linear covariate, df calibrated).
std::pair<DesignBlock, DesignBlock> decompose_linear_smooth(const EncodedTable& table,
                                                            const std::string& column,
                                                            SplineConfig config = {},
                                                            double df_target = 1.0);

// B-spline basis row for a scalar x (exposed for oracle tests).
Eigen::VectorXd bspline_row(double x, double x_min, double x_max, const SplineConfig& config);
// Order-d difference matrix for p coefficients ((p-d) x p).
Eigen::MatrixXd difference_matrix(int p, int order);

// ---- MRF ------------------------------------------------------------------

struct AdjacencyGraph {
    std::vector<std::string> regions;
    std::vector<std::pair<int, int>> edges;  // undirected, indices into regions

    Eigen::MatrixXd laplacian() const;
    int component_count() const;
    bool has_region(const std::string& name) const;
};

// Parses the one-edge-per-line "regionA,regionB" adjacency format.
AdjacencyGraph parse_adjacency(const std::string& text);

// Region-indicator block penalized by the graph Laplacian; centered by
// reparameterizing onto the Laplacian's positive eigenspace. A graph with no
// edges falls back to a ridge penalty with a warning.
DesignBlock mrf_block(const EncodedTable& table, const std::string& column,
                      const AdjacencyGraph& graph, double df_target = 1.0);

// ---- interactions and interval aggregation --------------------------------

// Column-wise products of the constituent encodings (dummy expansion for
// categorical constituents, standardized values for numeric ones) under a
// ridge penalty. All-zero product columns are dropped with a warning.
DesignBlock interaction_block(const EncodedTable& table, const std::vector<std::string>& columns,
                              double df_target = 1.0);

// Shared-coefficient aggregation of T interval measurements: the linear
// variant sums the raw covariates; when `standardize` is set the sum is
// standardized against the training table.
DesignBlock aggregate_linear_block(const EncodedTable& table,
                                   const std::vector<std::string>& columns,
                                   bool standardize = true);

// Smooth variant: per-interval B-spline bases on one shared knot vector over
// the pooled raw range, summed column-wise; difference penalty unchanged.
DesignBlock aggregate_smooth_block(const EncodedTable& table,
                                   const std::vector<std::string>& columns,
                                   SplineConfig config = {});

}  // namespace faultcast::design

#endif
