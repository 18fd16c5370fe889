#include "doctest.h"

#include <cmath>
#include <random>

#include "faultcast/model/serialize.hpp"
#include "faultcast/model/zadj_model.hpp"

using namespace faultcast;
using namespace faultcast::model;

namespace {

struct Synth {
    Eigen::VectorXd y;
    design::EncodedTable table;
    std::vector<design::ColumnSchema> schema;
};

// Zero-adjusted gamma draws: xi0 driven by x1, positive mean driven by x2,
// x3 pure noise.
Synth make_synth(int n, unsigned seed, double a1 = 1.2, double b1 = 0.8) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-2.0, 2.0), u01(1e-12, 1.0 - 1e-12);
    design::RawTable raw;
    std::vector<std::vector<double>> xs(3);
    for (auto& col : xs) {
        col.resize(static_cast<std::size_t>(n));
        for (auto& v : col) v = ux(rng);
    }
    raw.columns.push_back({"x1", true, xs[0], {}});
    raw.columns.push_back({"x2", true, xs[1], {}});
    raw.columns.push_back({"x3", true, xs[2], {}});
    std::vector<design::ColumnSchema> decl = {
        {"x1", design::ColumnKind::numeric, {}, 0.0, 1.0, false},
        {"x2", design::ColumnKind::numeric, {}, 0.0, 1.0, false},
        {"x3", design::ColumnKind::numeric, {}, 0.0, 1.0, false}};

    Synth s;
    s.schema = design::fit_schema(decl, raw);
    s.table = design::encode(s.schema, raw);
    s.y.resize(n);
    const auto ga = dist::make_family("gamma");
    for (int i = 0; i < n; ++i) {
        const double xi0 =
            1.0 / (1.0 + std::exp(-(-0.4 + a1 * xs[0][static_cast<std::size_t>(i)])));
        if (u01(rng) < xi0) {
            s.y[i] = 0.0;
        } else {
            const double mu = std::exp(1.2 + b1 * xs[1][static_cast<std::size_t>(i)]);
            s.y[i] = ga->quantile(u01(rng), {mu, 0.5});
        }
    }
    return s;
}

LearnerFactory linear_factory() {
    return [](const design::EncodedTable& t) {
        std::vector<engine::BaseLearner> list;
        list.push_back(engine::penalized_learner(design::intercept_block(t)));
        for (const std::string name : {"x1", "x2", "x3"})
            list.push_back(engine::penalized_learner(design::linear_block(t, name)));
        return std::vector<std::vector<engine::BaseLearner>>{list, list};
    };
}

LearnerFactory bern_linear_factory() {
    return [](const design::EncodedTable& t) {
        std::vector<engine::BaseLearner> list;
        list.push_back(engine::penalized_learner(design::intercept_block(t)));
        for (const std::string name : {"x1", "x2", "x3"})
            list.push_back(engine::penalized_learner(design::linear_block(t, name)));
        return std::vector<std::vector<engine::BaseLearner>>{list};
    };
}

LearnerFactory intercept_factory(int params) {
    return [params](const design::EncodedTable& t) {
        std::vector<std::vector<engine::BaseLearner>> out(static_cast<std::size_t>(params));
        for (auto& list : out)
            list.push_back(engine::penalized_learner(design::intercept_block(t)));
        return out;
    };
}

ZeroAdjustedModel fit_reference(const Synth& train, const Synth& holdout, int iters = 120) {
    TwoStageConfig cfg;
    cfg.family = "gamma";
    cfg.bern.max_iterations = iters;
    cfg.bern.stopping.patience = 10000;
    cfg.pos.max_iterations = iters;
    cfg.pos.stopping.patience = 10000;
    pipeline::TrainingRange ranges =
        pipeline::fit_ranges(train.table, {"x1", "x2", "x3"});
    return fit_two_stage(train.y, train.table, holdout.y, holdout.table,
                         bern_linear_factory(), linear_factory(), train.schema, ranges, cfg);
}

}  // namespace

TEST_CASE("two-stage factorization identity") {
    const Synth train = make_synth(800, 101u);
    const Synth hold = make_synth(400, 102u);
    const auto model = fit_reference(train, hold);

    for (const Synth* s : {&train, &hold}) {
        const auto [joint, avg] = log_score(model, s->y, s->table);
        CHECK(avg == doctest::Approx(joint / static_cast<double>(s->y.size())));

        // Decomposed: Bernoulli on all rows + positive family on y > 0.
        Eigen::VectorXd z(s->y.size());
        std::vector<Eigen::Index> nz;
        for (Eigen::Index i = 0; i < s->y.size(); ++i) {
            z[i] = s->y[i] == 0.0 ? 1.0 : 0.0;
            if (s->y[i] > 0.0) nz.push_back(i);
        }
        const auto bern = dist::make_family("bernoulli");
        const double l_zero =
            engine::log_likelihood(*bern, z, model.bern.predict_eta(s->table));
        const auto sub = design::subset(s->table, nz);
        Eigen::VectorXd ypos(static_cast<Eigen::Index>(nz.size()));
        for (std::size_t i = 0; i < nz.size(); ++i)
            ypos[static_cast<Eigen::Index>(i)] = s->y[nz[i]];
        const auto fam = model.family();
        const double l_pos = engine::log_likelihood(*fam, ypos, model.pos.predict_eta(sub));
        CHECK(std::fabs(joint - (l_zero + l_pos)) < 1e-10);
    }

    // Pointwise sanity: cdf at zero equals xi0 exactly; exceedance is
    // monotone nonincreasing in the threshold.
    const auto preds = predict_distribution(model, hold.table);
    const auto fam = model.family();
    for (std::size_t i = 0; i < 25; ++i) {
        const dist::ZeroAdjusted d{preds[i].xi0, fam, preds[i].theta};
        CHECK(dist::zadj_cdf(d, 0.0) == preds[i].xi0);
        double prev = 1.0;
        for (double t : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
            const double p = dist::exceedance_probability(d, t);
            CHECK(p <= prev + 1e-15);
            prev = p;
        }
    }
}

TEST_CASE("degenerate stage data is rejected") {
    Synth s = make_synth(200, 103u);
    const Synth hold = make_synth(100, 104u);
    TwoStageConfig cfg;
    pipeline::TrainingRange ranges;
    Eigen::VectorXd all_pos = s.y.array() + 1.0;
    CHECK_THROWS_WITH_AS(fit_two_stage(all_pos, s.table, hold.y, hold.table,
                                       bern_linear_factory(), linear_factory(), s.schema,
                                       ranges, cfg),
                         doctest::Contains("single-stage"), std::invalid_argument);
    Eigen::VectorXd all_zero = Eigen::VectorXd::Zero(s.y.size());
    CHECK_THROWS_AS(fit_two_stage(all_zero, s.table, hold.y, hold.table,
                                  bern_linear_factory(), linear_factory(), s.schema, ranges,
                                  cfg),
                    std::invalid_argument);
}

TEST_CASE("useless covariates collapse to the empirical zero fraction") {
    const Synth train = make_synth(1000, 105u, 0.0, 0.0);  // no covariate effects
    const Synth hold = make_synth(500, 106u, 0.0, 0.0);
    TwoStageConfig cfg;
    cfg.bern.max_iterations = 300;
    cfg.bern.stopping.patience = 10000;
    cfg.pos.max_iterations = 50;
    cfg.pos.stopping.patience = 10000;
    pipeline::TrainingRange ranges;
    const auto model =
        fit_two_stage(train.y, train.table, hold.y, hold.table, intercept_factory(1),
                      intercept_factory(2), train.schema, ranges, cfg);

    double zero_frac = 0.0;
    for (Eigen::Index i = 0; i < train.y.size(); ++i)
        if (train.y[i] == 0.0) zero_frac += 1.0;
    zero_frac /= static_cast<double>(train.y.size());

    const auto preds = predict_distribution(model, hold.table);
    for (const auto& p : preds) {
        CHECK(p.xi0 == doctest::Approx(preds[0].xi0));  // intercept-only: identical rows
        CHECK(std::fabs(p.xi0 - zero_frac) < 1e-3);
        CHECK(p.theta == preds[0].theta);
    }
}

TEST_CASE("roc machinery") {
    // Perfect separation.
    auto perfect = roc_from_scores({0.9, 0.8, 0.7, 0.2, 0.1}, {1, 1, 1, 0, 0});
    CHECK(perfect.auc == doctest::Approx(1.0));
    // Constant scores: one big tie group, chance-level AUC.
    auto constant = roc_from_scores({0.4, 0.4, 0.4, 0.4}, {1, 0, 1, 0});
    CHECK(constant.auc == doctest::Approx(0.5));
    // Six-row toy against brute-force pair counting.
    const std::vector<double> s = {0.1, 0.7, 0.7, 0.3, 0.9, 0.2};
    const std::vector<int> l = {0, 1, 0, 1, 1, 0};
    double concordant = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (l[i] != 1 || l[j] != 0) continue;
            pairs += 1.0;
            if (s[i] > s[j])
                concordant += 1.0;
            else if (s[i] == s[j])
                concordant += 0.5;
        }
    auto toy = roc_from_scores(s, l);
    CHECK(toy.auc == doctest::Approx(concordant / pairs).epsilon(1e-14));
    CHECK(toy.points.front().fpr == 0.0);
    CHECK(toy.points.back().tpr == doctest::Approx(1.0));
    // Single-class input is refused.
    CHECK_THROWS_AS(roc_from_scores({0.1, 0.2}, {1, 1}), std::invalid_argument);

    // Model-level exceedance ROC on signal-bearing data.
    const Synth train = make_synth(1500, 107u, 2.0, 1.2);
    const Synth hold = make_synth(800, 108u, 2.0, 1.2);
    const auto model = fit_reference(train, hold);
    const auto roc = roc_curve(model, hold.y, hold.table, 5.0);
    CHECK(roc.auc > 0.8);
    CHECK_THROWS_AS(roc_curve(model, hold.y, hold.table, 0.0), std::invalid_argument);
}

TEST_CASE("importance attribution") {
    const Synth train = make_synth(1200, 109u);
    const Synth hold = make_synth(600, 110u);
    const auto model = fit_reference(train, hold);
    const auto table = importance(model);
    REQUIRE(!table.empty());

    // Per-stage totals telescope to the trace gain.
    double zero_total = 0.0, pos_total = 0.0;
    for (const auto& row : table)
        (row.stage == "zero" ? zero_total : pos_total) += row.total;
    CHECK(zero_total ==
          doctest::Approx(model.bern.insample_trace[static_cast<std::size_t>(model.bern.m_stop)] -
                          model.bern.insample_trace[0])
              .epsilon(1e-10));
    CHECK(pos_total ==
          doctest::Approx(model.pos.insample_trace[static_cast<std::size_t>(model.pos.m_stop)] -
                          model.pos.insample_trace[0])
              .epsilon(1e-10));

    // The planted drivers dominate their stages: x1 for the zero stage, x2
    // for the positive mean; the noise column stays marginal.
    double zero_x1 = 0.0, pos_x2 = 0.0, noise = 0.0;
    for (const auto& row : table) {
        if (row.stage == "zero" && row.term_id == "linear(x1)") zero_x1 += row.total;
        if (row.stage == "positive" && row.term_id == "linear(x2)") pos_x2 += row.total;
        if (row.term_id == "linear(x3)") noise += row.total;
    }
    CHECK(zero_x1 > 0.9 * zero_total);
    CHECK(pos_x2 > 0.5 * pos_total);
    CHECK(noise < 0.05 * (zero_total + pos_total));
}

TEST_CASE("partial effects") {
    const Synth train = make_synth(1000, 111u);
    const Synth hold = make_synth(500, 112u);
    const auto model = fit_reference(train, hold);

    std::vector<double> grid;
    for (double x = -3.0; x <= 3.0; x += 0.25) grid.push_back(x);
    const auto curve = partial_effect(model, "positive", 0, "linear(x2)", grid);
    REQUIRE(curve.size() == grid.size());
    // A linear term stays exactly linear: vanishing second differences.
    for (std::size_t i = 2; i < curve.size(); ++i) {
        const double second =
            curve[i].effect - 2.0 * curve[i - 1].effect + curve[i - 2].effect;
        CHECK(std::fabs(second) < 1e-10);
    }
    // The planted slope is positive and the grid tails are flagged.
    CHECK(curve.back().effect > curve.front().effect);
    CHECK(curve.front().extrapolated);
    CHECK(!curve[curve.size() / 2].extrapolated);

    // A never-selected or unknown term behaves as specified.
    bool x3_selected = false;
    for (const auto& up : model.pos.updates)
        if (up.param == 1 && model.pos.learners[1][static_cast<std::size_t>(up.learner)].term_id ==
                                 "linear(x3)")
            x3_selected = true;
    if (!x3_selected) {
        const auto flat = partial_effect(model, "positive", 1, "linear(x3)", grid);
        for (const auto& p : flat) CHECK(p.effect == 0.0);
    }
    CHECK_THROWS_AS(partial_effect(model, "positive", 0, "nope", grid),
                    std::invalid_argument);
}

TEST_CASE("serialization round-trip") {
    const Synth train = make_synth(700, 113u);
    const Synth hold = make_synth(300, 114u);
    const auto model = fit_reference(train, hold, 60);

    const std::string text = to_json(model);
    const auto loaded = from_json(text);

    const auto a = predict_distribution(model, hold.table);
    const auto b = predict_distribution(loaded, hold.table);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].xi0 == b[i].xi0);  // bit-exact
        REQUIRE(a[i].theta.size() == b[i].theta.size());
        for (std::size_t k = 0; k < a[i].theta.size(); ++k)
            CHECK(a[i].theta[k] == b[i].theta[k]);
        CHECK(a[i].warnings == b[i].warnings);
    }
    const auto [la, _avg_a] = log_score(model, hold.y, hold.table);
    const auto [lb, _avg_b] = log_score(loaded, hold.y, hold.table);
    CHECK(la == lb);

    // Serialization is stable, and unknown versions are rejected.
    CHECK(to_json(loaded) == text);
    std::string future = text;
    future.replace(future.find("\"format_version\": 1"), 19, "\"format_version\": 9");
    CHECK_THROWS_WITH_AS(from_json(future), doctest::Contains("format_version"),
                         std::runtime_error);
}
