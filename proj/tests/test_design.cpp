#include "doctest.h"

#include <cmath>
#include <random>

#include "faultcast/design/block.hpp"
#include "faultcast/design/schema.hpp"

using namespace faultcast::design;

namespace {

// Textbook recursive Cox-de Boor evaluation on an explicit knot vector,
// kept deliberately independent of the production implementation.
double deboor_ref(int j, int d, double x, const std::vector<double>& t) {
    if (d == 0) return (t[static_cast<std::size_t>(j)] <= x &&
                        x < t[static_cast<std::size_t>(j + 1)])
                           ? 1.0
                           : 0.0;
    const double den_l = t[static_cast<std::size_t>(j + d)] - t[static_cast<std::size_t>(j)];
    const double den_r =
        t[static_cast<std::size_t>(j + d + 1)] - t[static_cast<std::size_t>(j + 1)];
    double v = 0.0;
    if (den_l > 0.0) v += (x - t[static_cast<std::size_t>(j)]) / den_l * deboor_ref(j, d - 1, x, t);
    if (den_r > 0.0)
        v += (t[static_cast<std::size_t>(j + d + 1)] - x) / den_r * deboor_ref(j + 1, d - 1, x, t);
    return v;
}

EncodedTable make_numeric_table(const std::vector<double>& x, const std::string& name = "x") {
    RawTable raw;
    raw.columns.push_back({name, true, x, {}});
    auto schema = fit_schema({{name, ColumnKind::numeric, {}, 0.0, 1.0, false}}, raw);
    return encode(schema, raw);
}

std::vector<double> uniform_draws(int n, double lo, double hi, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = u(rng);
    return x;
}

}  // namespace

TEST_CASE("standardization of {1,2,3}") {
    auto table = make_numeric_table({1.0, 2.0, 3.0});
    const auto& col = table.at("x");
    CHECK(col.schema.mean == doctest::Approx(2.0));
    CHECK(col.schema.sd == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-14));
    CHECK(col.values[0] == doctest::Approx(-1.224744871391589).epsilon(1e-12));
    CHECK(col.values[1] == doctest::Approx(0.0));
    CHECK(col.values[2] == doctest::Approx(1.224744871391589).epsilon(1e-12));
}

TEST_CASE("encoding is deterministic and rejects the unexpected") {
    RawTable raw;
    raw.columns.push_back({"r", false, {}, {"b", "a", "c", "a", "b"}});
    auto schema = fit_schema({{"r", ColumnKind::categorical, {}, 0.0, 1.0, false}}, raw);
    // First-appearance level order.
    REQUIRE(schema[0].levels.size() == 3);
    CHECK(schema[0].levels[0] == "b");
    CHECK(schema[0].levels[1] == "a");
    CHECK(schema[0].levels[2] == "c");
    auto enc = encode(schema, raw);
    CHECK(enc.at("r").codes == std::vector<int>{0, 1, 2, 1, 0});

    RawTable unseen;
    unseen.columns.push_back({"r", false, {}, {"a", "zz"}});
    CHECK_THROWS_WITH_AS(encode(schema, unseen), doctest::Contains("zz"), std::invalid_argument);

    RawTable constant;
    constant.columns.push_back({"x", true, {5.0, 5.0, 5.0}, {}});
    CHECK_THROWS_AS(fit_schema({{"x", ColumnKind::numeric, {}, 0.0, 1.0, false}}, constant),
                    std::invalid_argument);

    // Ordinal level order must be declared, not inferred.
    RawTable ord;
    ord.columns.push_back({"sev", false, {}, {"low", "high", "mid"}});
    CHECK_THROWS_AS(fit_schema({{"sev", ColumnKind::ordinal, {}, 0.0, 1.0, false}}, ord),
                    std::invalid_argument);
}

TEST_CASE("b-spline basis: partition of unity and de Boor oracle") {
    SplineConfig cfg;
    cfg.knots = 11;
    cfg.degree = 3;
    const double x_min = -2.0, x_max = 3.0;
    const int nseg = cfg.knots - 1;
    const int p = nseg + cfg.degree;
    const double h = (x_max - x_min) / nseg;

    std::vector<double> t(static_cast<std::size_t>(nseg + 2 * cfg.degree + 1));
    for (std::size_t j = 0; j < t.size(); ++j)
        t[j] = x_min + (static_cast<int>(j) - cfg.degree) * h;

    for (double x : uniform_draws(200, x_min, x_max, 17u)) {
        const Eigen::VectorXd row = bspline_row(x, x_min, x_max, cfg);
        REQUIRE(row.size() == p);
        CHECK(row.sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(row.minCoeff() >= 0.0);
        for (int j = 0; j < p; ++j)
            CHECK(row[j] == doctest::Approx(deboor_ref(j, cfg.degree, x, t)).epsilon(1e-12));
    }
    // Clamped extrapolation: outside points reuse the boundary basis row.
    const Eigen::VectorXd lo_row = bspline_row(x_min - 5.0, x_min, x_max, cfg);
    const Eigen::VectorXd hi_row = bspline_row(x_max + 5.0, x_min, x_max, cfg);
    CHECK((lo_row - bspline_row(x_min, x_min, x_max, cfg)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((hi_row - bspline_row(x_max, x_min, x_max, cfg)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("difference penalty annihilates polynomials up to its order") {
    const int p = 9;
    for (int order : {1, 2, 3}) {
        const Eigen::MatrixXd D = difference_matrix(p, order);
        REQUIRE(D.rows() == p - order);
        for (int deg = 0; deg < order; ++deg) {
            Eigen::VectorXd poly(p);
            for (int j = 0; j < p; ++j) poly[j] = std::pow(static_cast<double>(j), deg);
            CHECK((D * poly).cwiseAbs().maxCoeff() < 1e-10);
        }
        // One degree higher is not annihilated.
        Eigen::VectorXd poly(p);
        for (int j = 0; j < p; ++j) poly[j] = std::pow(static_cast<double>(j), order);
        CHECK((D * poly).cwiseAbs().maxCoeff() > 0.5);
    }
}

TEST_CASE("effective df: endpoints and monotonicity") {
    auto table = make_numeric_table(uniform_draws(400, -1.0, 4.0, 3u));
    SplineConfig cfg;
    cfg.knots = 8;
    cfg.degree = 3;
    DesignBlock blk = pspline_block(table, "x", cfg);
    const int p = cfg.knots - 1 + cfg.degree;

    // lambda -> 0 recovers the unpenalized rank of B.
    CHECK(effective_df(blk.B, blk.penalty, 1e-12) == doctest::Approx(p).epsilon(1e-6));
    // lambda -> inf leaves the penalty null space (dim = penalty order).
    CHECK(effective_df(blk.B, blk.penalty, 1e12) == doctest::Approx(2.0).epsilon(1e-6));

    double prev = std::numeric_limits<double>::infinity();
    for (double lg = -6.0; lg <= 8.0; lg += 0.5) {
        const double df = effective_df(blk.B, blk.penalty, std::pow(10.0, lg));
        CHECK(df <= prev + 1e-9);
        prev = df;
    }
}

TEST_CASE("df calibration hits its target") {
    auto table = make_numeric_table(uniform_draws(600, 0.0, 10.0, 11u));
    for (double target : {1.0, 2.5, 4.0}) {
        auto [lin, sm] = decompose_linear_smooth(table, "x", {}, target);
        CHECK(std::fabs(effective_df(sm.B, sm.penalty, sm.lambda) - target) <= 1e-6);
    }
    // Unreachable target throws and names the term.
    CHECK_THROWS_AS(decompose_linear_smooth(table, "x", {}, 1e6), std::runtime_error);
}

TEST_CASE("smooth block is orthogonal to constant and linear trends") {
    auto table = make_numeric_table(uniform_draws(500, -3.0, 2.0, 29u));
    auto [lin, sm] = decompose_linear_smooth(table, "x", {}, 2.0);
    const auto& x = table.at("x").values;
    const double scale = sm.B.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < sm.B.cols(); ++j) {
        CHECK(std::fabs(sm.B.col(j).sum()) / (scale * 500.0) < 1e-10);
        CHECK(std::fabs(sm.B.col(j).dot(x)) / (scale * 500.0) < 1e-10);
    }
    // Predict-time replay reproduces the training basis exactly.
    CHECK((build_rows(sm, table) - sm.B).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((build_rows(lin, table) - lin.B).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ordinal smooth block") {
    RawTable raw;
    std::vector<std::string> labs;
    std::mt19937_64 rng(5);
    const std::vector<std::string> levels = {"low", "mid", "high", "severe"};
    for (int i = 0; i < 300; ++i) labs.push_back(levels[rng() % 4]);
    raw.columns.push_back({"sev", false, {}, labs});
    auto schema = fit_schema({{"sev", ColumnKind::ordinal, levels, 0.0, 1.0, false}}, raw);
    auto table = encode(schema, raw);

    DesignBlock blk = ordinal_block(table, "sev", 1.5);
    CHECK(std::fabs(effective_df(blk.B, blk.penalty, blk.lambda) - 1.5) <= 1e-6);
    // The augmented penalty must be strictly positive definite.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(blk.penalty);
    CHECK(eig.eigenvalues().minCoeff() > 1e-8);
}

TEST_CASE("adjacency graph: laplacian and components") {
    AdjacencyGraph g = parse_adjacency("a,b\nb,c\n\n# comment\nd,e\n");
    REQUIRE(g.regions.size() == 5);
    CHECK(g.component_count() == 2);
    CHECK(g.has_region("c"));
    CHECK_FALSE(g.has_region("zz"));

    const Eigen::MatrixXd L = g.laplacian();
    CHECK(L.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
    CHECK(L == L.transpose());

    // Path a-b-c: quadratic form sums squared neighbor differences.
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(5);
    beta[0] = 1.0;
    beta[2] = -1.0;
    CHECK(beta.dot(L * beta) == doctest::Approx(2.0));

    CHECK_THROWS_AS(parse_adjacency("justoneregion\n"), std::invalid_argument);
}

TEST_CASE("mrf block") {
    AdjacencyGraph g = parse_adjacency("n1,n2\nn2,n3\nn3,n4\nn1,n4\n");
    RawTable raw;
    std::vector<std::string> labs;
    std::mt19937_64 rng(7);
    for (int i = 0; i < 400; ++i) labs.push_back(g.regions[rng() % 4]);
    raw.columns.push_back({"region", false, {}, labs});
    auto schema = fit_schema({{"region", ColumnKind::categorical, {}, 0.0, 1.0, false}}, raw);
    auto table = encode(schema, raw);

    DesignBlock blk = mrf_block(table, "region", g, 1.2);
    CHECK(std::fabs(effective_df(blk.B, blk.penalty, blk.lambda) - 1.2) <= 1e-6);
    // Centered on the training rows.
    CHECK(blk.B.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
    // Reparameterized penalty matches the Laplacian quadratic form.
    const Eigen::MatrixXd L = g.laplacian();
    std::mt19937_64 grng(13);
    std::normal_distribution<double> nd;
    for (int rep = 0; rep < 10; ++rep) {
        Eigen::VectorXd gamma(blk.penalty.rows());
        for (Eigen::Index j = 0; j < gamma.size(); ++j) gamma[j] = nd(grng);
        const Eigen::VectorXd theta = blk.reparam * gamma;
        CHECK(gamma.dot(blk.penalty * gamma) ==
              doctest::Approx(theta.dot(L * theta)).epsilon(1e-10));
    }
    // Replay equals the cached training basis.
    CHECK((build_rows(blk, table) - blk.B).cwiseAbs().maxCoeff() < 1e-12);

    // Data level missing from the graph is rejected by name.
    AdjacencyGraph small = parse_adjacency("n1,n2\n");
    CHECK_THROWS_WITH_AS(mrf_block(table, "region", small, 1.0),
                         doctest::Contains("missing from adjacency graph"), std::invalid_argument);

    // Edgeless graph: ridge fallback instead of a singular Laplacian.
    AdjacencyGraph iso;
    iso.regions = g.regions;
    DesignBlock ridge = mrf_block(table, "region", iso, 1.0);
    CHECK(ridge.penalty.isIdentity(0.0));
    CHECK(std::fabs(effective_df(ridge.B, ridge.penalty, ridge.lambda) - 1.0) <= 1e-6);
}

TEST_CASE("interaction block") {
    // Full 8 x 9 cross: 72 product columns, none dropped.
    RawTable raw;
    std::vector<std::string> a, b;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 9; ++j) {
            a.push_back("a" + std::to_string(i));
            b.push_back("b" + std::to_string(j));
        }
    raw.columns.push_back({"octant", false, {}, a});
    raw.columns.push_back({"grp", false, {}, b});
    auto schema = fit_schema({{"octant", ColumnKind::categorical, {}, 0.0, 1.0, false},
                              {"grp", ColumnKind::categorical, {}, 0.0, 1.0, false}},
                             raw);
    auto table = encode(schema, raw);
    DesignBlock full = interaction_block(table, {"octant", "grp"}, 2.0);
    CHECK(full.B.cols() == 72);
    CHECK(full.kept_columns.empty());
    CHECK(std::fabs(effective_df(full.B, full.penalty, full.lambda) - 2.0) <= 1e-6);
    // Every row activates exactly one product column.
    for (Eigen::Index i = 0; i < full.B.rows(); ++i)
        CHECK(full.B.row(i).sum() == doctest::Approx(1.0));

    // Sparse cross: only matching indices observed, off-diagonal products drop.
    RawTable sparse;
    std::vector<std::string> sa, sb;
    for (int i = 0; i < 90; ++i) {
        sa.push_back("a" + std::to_string(i % 3));
        sb.push_back("b" + std::to_string(i % 3));
    }
    sparse.columns.push_back({"octant", false, {}, sa});
    sparse.columns.push_back({"grp", false, {}, sb});
    auto sschema = fit_schema({{"octant", ColumnKind::categorical, {}, 0.0, 1.0, false},
                               {"grp", ColumnKind::categorical, {}, 0.0, 1.0, false}},
                              sparse);
    auto stable = encode(sschema, sparse);
    DesignBlock diag = interaction_block(stable, {"octant", "grp"}, 1.0);
    CHECK(diag.B.cols() == 3);
    CHECK(diag.kept_columns.size() == 3);
    CHECK((build_rows(diag, stable) - diag.B).cwiseAbs().maxCoeff() == 0.0);

    // Numeric-by-categorical works when the numeric side is standardized.
    RawTable mixed;
    mixed.columns.push_back({"gust", true, uniform_draws(90, 0.0, 30.0, 41u), {}});
    mixed.columns.push_back({"grp", false, {}, sb});
    auto mschema = fit_schema({{"gust", ColumnKind::numeric, {}, 0.0, 1.0, false},
                               {"grp", ColumnKind::categorical, {}, 0.0, 1.0, false}},
                              mixed);
    auto mtable = encode(mschema, mixed);
    DesignBlock mix = interaction_block(mtable, {"gust", "grp"}, 1.0);
    CHECK(mix.B.cols() == 3);

    // Two raw (unstandardized) numeric constituents are refused.
    std::vector<ColumnSchema> rawsch = {{"gust", ColumnKind::numeric, {}, 0.0, 1.0, false},
                                        {"temp", ColumnKind::numeric, {}, 0.0, 1.0, false}};
    RawTable two;
    two.columns.push_back({"gust", true, uniform_draws(50, 0.0, 30.0, 1u), {}});
    two.columns.push_back({"temp", true, uniform_draws(50, -5.0, 25.0, 2u), {}});
    auto ttable = encode(rawsch, two);
    CHECK_THROWS_AS(interaction_block(ttable, {"gust", "temp"}, 1.0), std::invalid_argument);
}

TEST_CASE("interval aggregation blocks") {
    const int n = 200, T = 4;
    RawTable raw;
    std::vector<std::vector<double>> xs;
    for (int t = 0; t < T; ++t) {
        xs.push_back(uniform_draws(n, 0.0, 12.0, 100u + static_cast<unsigned>(t)));
        raw.columns.push_back({"rain_q" + std::to_string(t + 1), true, xs.back(), {}});
    }
    std::vector<ColumnSchema> decl;
    std::vector<std::string> names;
    for (int t = 0; t < T; ++t) {
        decl.push_back({"rain_q" + std::to_string(t + 1), ColumnKind::numeric, {}, 0.0, 1.0, false});
        names.push_back("rain_q" + std::to_string(t + 1));
    }
    auto table = encode(fit_schema(decl, raw), raw);

    // Linear aggregation: one column carrying the interval sum, so a shared
    // coefficient beta gives beta * sum_t x_t = sum_t beta * x_t.
    DesignBlock lin = aggregate_linear_block(table, names, false);
    REQUIRE(lin.B.cols() == 1);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int t = 0; t < T; ++t) s += xs[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
        CHECK(lin.B(i, 0) == doctest::Approx(s).epsilon(1e-14));
    }

    DesignBlock lin_std = aggregate_linear_block(table, names, true);
    CHECK(lin_std.B.col(0).mean() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(lin_std.B.col(0).squaredNorm() / n == doctest::Approx(1.0).epsilon(1e-12));

    // Smooth aggregation: per-interval partitions of unity stack, so every
    // row of the summed basis adds up to T.
    DesignBlock sm = aggregate_smooth_block(table, names);
    for (Eigen::Index i = 0; i < sm.B.rows(); ++i)
        CHECK(sm.B.row(i).sum() == doctest::Approx(static_cast<double>(T)).epsilon(1e-12));
    // Shared coefficients: the aggregate basis equals the sum of the four
    // single-interval bases evaluated on the shared knot vector.
    Eigen::MatrixXd manual = Eigen::MatrixXd::Zero(n, sm.B.cols());
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < n; ++i)
            manual.row(i) += bspline_row(xs[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)],
                                         sm.x_min, sm.x_max, sm.spline)
                                 .transpose();
    CHECK((manual - sm.B).cwiseAbs().maxCoeff() == 0.0);
    CHECK((build_rows(sm, table) - sm.B).cwiseAbs().maxCoeff() == 0.0);
}
