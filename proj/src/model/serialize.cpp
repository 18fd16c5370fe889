#include "faultcast/model/serialize.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace faultcast::model {

namespace {

using nlohmann::json;

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from(const json& j) {
    if (j.empty()) return {};
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.at(0).size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(i, c) = j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(c))
                          .get<double>();
    return m;
}

json vector_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::VectorXd vector_from(const json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
    return v;
}

json block_json(const design::DesignBlock& b) {
    json j;
    j["kind"] = design::block_kind_name(b.kind);
    j["term_id"] = b.term_id;
    j["columns"] = b.columns;
    j["spline"] = {{"knots", b.spline.knots},
                   {"degree", b.spline.degree},
                   {"penalty_order", b.spline.penalty_order}};
    j["x_min"] = b.x_min;
    j["x_max"] = b.x_max;
    j["reparam"] = matrix_json(b.reparam);
    j["center"] = vector_json(b.center);
    j["slope_center"] = vector_json(b.slope_center);
    j["kept_columns"] = b.kept_columns;
    j["agg_mean"] = b.agg_mean;
    j["agg_sd"] = b.agg_sd;
    return j;
}

design::DesignBlock block_from(const json& j) {
    design::DesignBlock b;
    b.kind = design::block_kind_from_name(j.at("kind").get<std::string>());
    b.term_id = j.at("term_id").get<std::string>();
    b.columns = j.at("columns").get<std::vector<std::string>>();
    b.spline.knots = j.at("spline").at("knots").get<int>();
    b.spline.degree = j.at("spline").at("degree").get<int>();
    b.spline.penalty_order = j.at("spline").at("penalty_order").get<int>();
    b.x_min = j.at("x_min").get<double>();
    b.x_max = j.at("x_max").get<double>();
    b.reparam = matrix_from(j.at("reparam"));
    b.center = vector_from(j.at("center"));
    b.slope_center = vector_from(j.at("slope_center"));
    b.kept_columns = j.at("kept_columns").get<std::vector<int>>();
    b.agg_mean = j.at("agg_mean").get<double>();
    b.agg_sd = j.at("agg_sd").get<double>();
    return b;
}

json learner_json(const engine::BaseLearner& l) {
    json j;
    j["term_id"] = l.term_id;
    if (l.kind == engine::BaseLearner::Kind::penalized) {
        j["kind"] = "penalized";
        j["block"] = block_json(l.block);
    } else {
        j["kind"] = "tree";
        j["columns"] = l.tree_columns;
        j["config"] = {{"max_depth", l.tree_config.max_depth},
                       {"min_split", l.tree_config.min_split},
                       {"min_leaf", l.tree_config.min_leaf},
                       {"mtry", l.tree_config.mtry},
                       {"min_gain", l.tree_config.min_gain}};
    }
    return j;
}

engine::BaseLearner learner_from(const json& j) {
    engine::BaseLearner l;
    l.term_id = j.at("term_id").get<std::string>();
    if (j.at("kind") == "penalized") {
        l.kind = engine::BaseLearner::Kind::penalized;
        l.block = block_from(j.at("block"));
    } else {
        l.kind = engine::BaseLearner::Kind::tree;
        l.tree_columns = j.at("columns").get<std::vector<std::string>>();
        const json& c = j.at("config");
        l.tree_config.max_depth = c.at("max_depth").get<int>();
        l.tree_config.min_split = c.at("min_split").get<int>();
        l.tree_config.min_leaf = c.at("min_leaf").get<int>();
        l.tree_config.mtry = c.at("mtry").get<int>();
        l.tree_config.min_gain = c.at("min_gain").get<double>();
    }
    return l;
}

json ensemble_json(const engine::FittedEnsemble& e) {
    json j;
    j["family"] = e.family;
    j["nu"] = e.nu;
    j["m_stop"] = e.m_stop;
    j["offsets"] = e.offsets;
    j["insample_trace"] = e.insample_trace;
    j["holdout_trace"] = e.holdout_trace;
    json params = json::array();
    for (const auto& list : e.learners) {
        json ls = json::array();
        for (const auto& l : list) ls.push_back(learner_json(l));
        params.push_back(std::move(ls));
    }
    j["learners"] = std::move(params);
    json ups = json::array();
    for (const auto& up : e.updates) {
        json u;
        u["iteration"] = up.iteration;
        u["param"] = up.param;
        u["learner"] = up.learner;
        u["delta_insample"] = up.delta_insample;
        u["beta"] = vector_json(up.beta);
        json nodes = json::array();
        for (const auto& nd : up.tree.nodes)
            nodes.push_back({nd.feature, nd.threshold, nd.left, nd.right, nd.value});
        u["tree"] = std::move(nodes);
        ups.push_back(std::move(u));
    }
    j["updates"] = std::move(ups);
    return j;
}

engine::FittedEnsemble ensemble_from(const json& j) {
    engine::FittedEnsemble e;
    e.family = j.at("family").get<std::string>();
    e.nu = j.at("nu").get<double>();
    e.m_stop = j.at("m_stop").get<int>();
    e.offsets = j.at("offsets").get<std::vector<double>>();
    e.insample_trace = j.at("insample_trace").get<std::vector<double>>();
    e.holdout_trace = j.at("holdout_trace").get<std::vector<double>>();
    for (const json& ls : j.at("learners")) {
        std::vector<engine::BaseLearner> list;
        for (const json& l : ls) list.push_back(learner_from(l));
        e.learners.push_back(std::move(list));
    }
    for (const json& u : j.at("updates")) {
        engine::Update up;
        up.iteration = u.at("iteration").get<int>();
        up.param = u.at("param").get<int>();
        up.learner = u.at("learner").get<int>();
        up.delta_insample = u.at("delta_insample").get<double>();
        up.beta = vector_from(u.at("beta"));
        for (const json& nd : u.at("tree")) {
            learn::TreeNode n;
            n.feature = nd.at(0).get<int>();
            n.threshold = nd.at(1).get<double>();
            n.left = nd.at(2).get<int>();
            n.right = nd.at(3).get<int>();
            n.value = nd.at(4).get<double>();
            up.tree.nodes.push_back(n);
        }
        e.updates.push_back(std::move(up));
    }
    return e;
}

json schema_json(const design::ColumnSchema& s) {
    return {{"name", s.name},
            {"kind", design::column_kind_name(s.kind)},
            {"levels", s.levels},
            {"mean", s.mean},
            {"sd", s.sd},
            {"standardized", s.standardized}};
}

design::ColumnSchema schema_from(const json& j) {
    design::ColumnSchema s;
    s.name = j.at("name").get<std::string>();
    s.kind = design::column_kind_from_name(j.at("kind").get<std::string>());
    s.levels = j.at("levels").get<std::vector<std::string>>();
    s.mean = j.at("mean").get<double>();
    s.sd = j.at("sd").get<double>();
    s.standardized = j.at("standardized").get<bool>();
    return s;
}

json ranges_json(const pipeline::TrainingRange& r) {
    json numeric = json::object();
    for (const auto& [name, mm] : r.numeric) numeric[name] = {mm.first, mm.second};
    json inter = json::array();
    for (const auto& g : r.interactions) {
        json cells = json::object();
        for (const auto& [key, mm] : g.per_cell) cells[key] = {mm.first, mm.second};
        inter.push_back(
            {{"categorical", g.categorical}, {"numeric", g.numeric}, {"cells", cells}});
    }
    return {{"numeric", numeric}, {"interactions", inter}};
}

pipeline::TrainingRange ranges_from(const json& j) {
    pipeline::TrainingRange r;
    for (const auto& [name, mm] : j.at("numeric").items())
        r.numeric[name] = {mm.at(0).get<double>(), mm.at(1).get<double>()};
    for (const json& g : j.at("interactions")) {
        pipeline::InteractionGuard guard;
        guard.categorical = g.at("categorical").get<std::vector<std::string>>();
        guard.numeric = g.at("numeric").get<std::string>();
        for (const auto& [key, mm] : g.at("cells").items())
            guard.per_cell[key] = {mm.at(0).get<double>(), mm.at(1).get<double>()};
        r.interactions.push_back(std::move(guard));
    }
    return r;
}

}  // namespace

std::string to_json(const ZeroAdjustedModel& model) {
    json j;
    j["format_version"] = kFormatVersion;
    j["positive_family"] = model.positive_family;
    json schemas = json::array();
    for (const auto& s : model.schema) schemas.push_back(schema_json(s));
    j["schema"] = std::move(schemas);
    j["ranges"] = ranges_json(model.ranges);
    j["stages"] = {{"zero", ensemble_json(model.bern)},
                   {"positive", ensemble_json(model.pos)}};
    return j.dump(2) + "\n";
}

ZeroAdjustedModel from_json(const std::string& text) {
    const json j = json::parse(text);
    const int version = j.at("format_version").get<int>();
    if (version != kFormatVersion)
        throw std::runtime_error("unsupported model format_version " +
                                 std::to_string(version) + " (expected " +
                                 std::to_string(kFormatVersion) + ")");
    ZeroAdjustedModel model;
    model.positive_family = j.at("positive_family").get<std::string>();
    for (const json& s : j.at("schema")) model.schema.push_back(schema_from(s));
    model.ranges = ranges_from(j.at("ranges"));
    model.bern = ensemble_from(j.at("stages").at("zero"));
    model.pos = ensemble_from(j.at("stages").at("positive"));
    return model;
}

void save_model(const ZeroAdjustedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file '" + path + "'");
    out << to_json(model);
}

ZeroAdjustedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read model file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

}  // namespace faultcast::model
