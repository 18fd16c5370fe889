// faultcast: distributional boosting for daily overhead-line fault counts.
//
// Subcommands: simulate, train, predict, evaluate, roc, importance, partial,
// tune. Exit codes: 0 success, 2 bad user input or configuration, 1 internal
// failure.

#include <CLI11.hpp>
#include <Eigen/Core>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "faultcast/design/block.hpp"
#include "faultcast/model/serialize.hpp"
#include "faultcast/model/zadj_model.hpp"
#include "faultcast/pipeline/synthetic.hpp"
#include "faultcast/pipeline/table.hpp"
#include "faultcast/pipeline/terms.hpp"
#include "faultcast/pipeline/weather.hpp"
#include "faultcast/tune/ga.hpp"

using nlohmann::json;
using namespace faultcast;
using pipeline::Csv;
using pipeline::format_number;

namespace {

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config '" + path + "'");
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw std::invalid_argument("config '" + path + "': " + e.what());
    }
    return cfg;
}

// json::exception (wrong type, missing key) is a user-configuration error.
template <typename F>
auto config_scope(const std::string& what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw std::invalid_argument(what + ": " + e.what());
    }
}

pipeline::TermSpec term_from_json(const json& j) {
    pipeline::TermSpec spec;
    spec.type = j.at("type").get<std::string>();
    if (j.contains("columns")) spec.columns = j["columns"].get<std::vector<std::string>>();
    spec.df = j.value("df", 1.0);
    spec.spline.knots = j.value("knots", spec.spline.knots);
    spec.spline.degree = j.value("degree", spec.spline.degree);
    spec.spline.penalty_order = j.value("penalty_order", spec.spline.penalty_order);
    spec.standardize = j.value("standardize", true);
    spec.tree.max_depth = j.value("max_depth", spec.tree.max_depth);
    spec.tree.min_split = j.value("min_split", spec.tree.min_split);
    spec.tree.min_leaf = j.value("min_leaf", spec.tree.min_leaf);
    spec.tree.mtry = j.value("mtry", spec.tree.mtry);
    spec.tree.min_gain = j.value("min_gain", spec.tree.min_gain);
    return spec;
}

std::vector<pipeline::TermSpec> term_list(const json& j) {
    std::vector<pipeline::TermSpec> out;
    for (const auto& t : j) out.push_back(term_from_json(t));
    return out;
}

engine::TrainConfig train_config_from(const json& cfg, double nu_default, std::ostream* log) {
    engine::TrainConfig tc;
    tc.nu = nu_default;
    tc.max_iterations = cfg.value("max_iterations", 1000);
    tc.seed = cfg.value("seed", std::uint64_t{1});
    tc.stopping.batch = cfg.value("batch", 50);
    tc.stopping.patience = cfg.value("patience", 100);
    tc.log = log;
    return tc;
}

design::RawTable raw_subset(const design::RawTable& raw, const std::vector<Eigen::Index>& rows) {
    design::RawTable out;
    for (const auto& c : raw.columns) {
        design::RawColumn sub;
        sub.name = c.name;
        sub.is_numeric = c.is_numeric;
        for (auto i : rows) {
            const auto j = static_cast<std::size_t>(i);
            if (c.is_numeric)
                sub.values.push_back(c.values[j]);
            else
                sub.labels.push_back(c.labels[j]);
        }
        out.columns.push_back(std::move(sub));
    }
    return out;
}

Eigen::VectorXd vector_subset(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& rows) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = v[rows[static_cast<std::size_t>(i)]];
    return out;
}

// Optional reallocation of administratively reported daily counts onto the
// forecast regions. Admin CSV columns: admin_region, date, faults.
void apply_overlap(pipeline::WeatherFrame& frame, const std::string& admin_path,
                   const std::string& overlap_path) {
    const auto weights = pipeline::parse_overlap(pipeline::read_csv(overlap_path));
    const Csv admin = pipeline::read_csv(admin_path);
    const std::vector<std::string> expected = {"admin_region", "date", "faults"};
    if (admin.header != expected)
        throw std::invalid_argument("admin faults csv: expected columns admin_region,date,faults");

    std::map<std::string, std::map<std::string, double>> per_date;  // date -> admin -> count
    for (std::size_t i = 0; i < admin.rows.size(); ++i)
        per_date[admin.rows[i][1]][admin.rows[i][0]] +=
            pipeline::to_number(admin.rows[i][2], "faults", i);

    std::map<std::string, std::map<std::string, double>> allocated;
    for (const auto& [date, counts] : per_date)
        allocated[date] = pipeline::allocate_faults(counts, weights);

    for (std::size_t i = 0; i < frame.date.size(); ++i) {
        const auto dit = allocated.find(frame.date[i]);
        if (dit == allocated.end())
            throw std::invalid_argument("no admin fault counts for date " + frame.date[i]);
        const auto rit = dit->second.find(frame.region[i]);
        if (rit == dit->second.end())
            throw std::invalid_argument("overlap weights do not cover forecast region '" +
                                        frame.region[i] + "'");
        frame.faults[static_cast<Eigen::Index>(i)] = rit->second;
    }
}

struct LoadedData {
    pipeline::WeatherFrame frame;
    pipeline::SplitIndices split;
    std::vector<design::ColumnSchema> schema;
    design::EncodedTable train, holdout, test;
    Eigen::VectorXd y_train, y_holdout, y_test;
};

LoadedData prepare(const json& cfg, const std::string& data_path, const std::string& admin_path,
                   const std::string& overlap_path) {
    LoadedData d;
    d.frame = pipeline::parse_weather(pipeline::read_csv(data_path));
    if (!admin_path.empty() || !overlap_path.empty()) {
        if (admin_path.empty() || overlap_path.empty())
            throw std::invalid_argument("--admin-faults and --overlap must be given together");
        apply_overlap(d.frame, admin_path, overlap_path);
    }

    std::array<double, 3> fractions = {0.6, 0.2, 0.2};
    std::uint64_t split_seed = 1;
    if (cfg.contains("split")) {
        const auto& s = cfg["split"];
        if (s.contains("fractions")) {
            const auto f = s["fractions"].get<std::vector<double>>();
            if (f.size() != 3)
                throw std::invalid_argument("split.fractions needs 3 entries");
            std::copy(f.begin(), f.end(), fractions.begin());
        }
        split_seed = s.value("seed", std::uint64_t{1});
    }
    d.split = pipeline::split_by_date(d.frame.date, fractions, split_seed);

    const auto raw_train = raw_subset(d.frame.covariates, d.split.train);
    d.schema = design::fit_schema(pipeline::weather_schema_decl(), raw_train);
    d.train = design::encode(d.schema, raw_train);
    d.holdout = design::encode(d.schema, raw_subset(d.frame.covariates, d.split.holdout));
    d.test = d.split.test.empty()
                 ? design::EncodedTable{}
                 : design::encode(d.schema, raw_subset(d.frame.covariates, d.split.test));
    d.y_train = vector_subset(d.frame.faults, d.split.train);
    d.y_holdout = vector_subset(d.frame.faults, d.split.holdout);
    d.y_test = vector_subset(d.frame.faults, d.split.test);
    return d;
}

std::vector<std::string> numeric_guard_columns(const std::vector<design::ColumnSchema>& schema) {
    std::vector<std::string> out;
    for (const auto& c : schema)
        if (c.kind == design::ColumnKind::numeric) out.push_back(c.name);
    return out;
}

int cmd_simulate(const json& cfg, const std::string& out_path) {
    pipeline::SyntheticConfig sc;
    config_scope("config synthetic", [&] {
        const auto& j = cfg.at("synthetic");
        sc.n_days = j.value("n_days", sc.n_days);
        if (j.contains("regions")) sc.regions = j["regions"].get<std::vector<std::string>>();
        sc.family = j.value("family", sc.family);
        sc.seed = j.value("seed", sc.seed);
        if (j.contains("zero_coef"))
            sc.zero_coef = j["zero_coef"].get<std::map<std::string, double>>();
        if (j.contains("theta_coef"))
            sc.theta_coef = j["theta_coef"].get<std::vector<std::map<std::string, double>>>();
        if (j.contains("fixed_xi0")) sc.fixed_xi0 = j["fixed_xi0"].get<double>();
        return 0;
    });
    const auto data = pipeline::generate_synthetic(sc);
    pipeline::save_csv(pipeline::weather_csv(data.frame), out_path);
    std::cout << "wrote " << data.frame.faults.size() << " rows to " << out_path << "\n";
    return 0;
}

int cmd_train(const json& cfg, const std::string& data_path, const std::string& model_path,
              const std::string& log_path, const std::string& report_path,
              const std::string& adjacency_path, const std::string& admin_path,
              const std::string& overlap_path) {
    const auto d = prepare(cfg, data_path, admin_path, overlap_path);

    std::optional<design::AdjacencyGraph> graph;
    if (!adjacency_path.empty()) {
        std::ifstream in(adjacency_path);
        if (!in) throw std::invalid_argument("cannot read adjacency '" + adjacency_path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        graph = design::parse_adjacency(buf.str());
    }
    const design::AdjacencyGraph* graph_ptr = graph ? &*graph : nullptr;

    model::TwoStageConfig tsc;
    tsc.family = cfg.value("family", std::string("gamma"));
    const auto fam = dist::make_family(tsc.family);  // validate early
    double nu_zero = 0.3, nu_pos = 0.3;
    if (cfg.contains("nu")) {
        if (cfg["nu"].is_number()) {
            nu_zero = nu_pos = cfg["nu"].get<double>();
        } else {
            nu_zero = cfg["nu"].value("zero", 0.3);
            nu_pos = cfg["nu"].value("positive", 0.3);
        }
    }

    std::ofstream log;
    std::ostream* log_stream = nullptr;
    if (!log_path.empty()) {
        log.open(log_path);
        if (!log) throw std::invalid_argument("cannot write log '" + log_path + "'");
        log_stream = &log;
    }
    tsc.bern = train_config_from(cfg, nu_zero, log_stream);
    tsc.pos = train_config_from(cfg, nu_pos, log_stream);

    const auto zero_specs = config_scope("config terms.zero",
                                         [&] { return term_list(cfg.at("terms").at("zero")); });
    std::vector<std::vector<pipeline::TermSpec>> pos_specs = config_scope(
        "config terms.positive", [&] {
            std::vector<std::vector<pipeline::TermSpec>> out;
            for (const auto& p : cfg.at("terms").at("positive")) out.push_back(term_list(p));
            return out;
        });
    if (pos_specs.size() != static_cast<std::size_t>(fam->param_count()))
        throw std::invalid_argument("terms.positive: family " + tsc.family + " needs " +
                                    std::to_string(fam->param_count()) + " parameter lists, got " +
                                    std::to_string(pos_specs.size()));

    // Extrapolation guards: all numeric columns plus configured interactions.
    std::vector<std::pair<std::vector<std::string>, std::string>> guard_interactions;
    if (cfg.contains("guard_interactions"))
        for (const auto& g : cfg["guard_interactions"])
            guard_interactions.emplace_back(g.at("categorical").get<std::vector<std::string>>(),
                                            g.at("numeric").get<std::string>());
    const auto ranges =
        pipeline::fit_ranges(d.train, numeric_guard_columns(d.schema), guard_interactions);

    const model::LearnerFactory zero_factory = [&](const design::EncodedTable& table) {
        return pipeline::build_parameter_terms(table, {zero_specs}, graph_ptr);
    };
    const model::LearnerFactory pos_factory = [&](const design::EncodedTable& table) {
        return pipeline::build_parameter_terms(table, pos_specs, graph_ptr);
    };

    if (log_stream) *log_stream << "# stage zero\n";
    const auto model = model::fit_two_stage(d.y_train, d.train, d.y_holdout, d.holdout,
                                            zero_factory, pos_factory, d.schema, ranges, tsc);
    model::save_model(model, model_path);

    std::ostringstream report;
    report << "family=" << tsc.family << "\n";
    report << "m_stop zero=" << model.bern.m_stop << " positive=" << model.pos.m_stop << "\n";
    auto line = [&](const std::string& name, const Eigen::VectorXd& y,
                    const design::EncodedTable& table) {
        if (y.size() == 0) return;
        const auto [total, avg] = model::log_score(model, y, table);
        report << name << " n=" << y.size() << " l_total=" << format_number(total)
               << " l_average=" << format_number(avg) << "\n";
    };
    line("train", d.y_train, d.train);
    line("holdout", d.y_holdout, d.holdout);
    line("test", d.y_test, d.test);
    std::cout << report.str();
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw std::invalid_argument("cannot write report '" + report_path + "'");
        out << report.str();
    }
    return 0;
}

design::EncodedTable encode_for_model(const model::ZeroAdjustedModel& model,
                                      const pipeline::WeatherFrame& frame) {
    return design::encode(model.schema, frame.covariates);
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path, double threshold) {
    const auto model = model::load_model(model_path);
    const auto fam = model.family();
    const auto frame = pipeline::parse_weather(pipeline::read_csv(data_path));
    const auto table = encode_for_model(model, frame);
    const auto preds = model::predict_distribution(model, table);

    Csv out;
    out.header = {"row_id", "xi0"};
    for (int k = 0; k < fam->param_count(); ++k) out.header.push_back(fam->param_name(k));
    out.header.insert(out.header.end(), {"q99", "p_exceed", "warnings"});
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const auto& p = preds[i];
        const auto dist = p.distribution(fam);
        std::vector<std::string> row = {std::to_string(i + 1), format_number(p.xi0)};
        for (double t : p.theta) row.push_back(format_number(t));
        row.push_back(format_number(dist::zadj_quantile(dist, 0.99)));
        row.push_back(format_number(dist::exceedance_probability(dist, threshold)));
        std::string warn;
        for (const auto& w : p.warnings) warn += (warn.empty() ? "" : "; ") + w;
        row.push_back(warn);
        out.rows.push_back(std::move(row));
    }
    pipeline::save_csv(out, out_path);
    std::cout << "wrote " << preds.size() << " predictions to " << out_path << "\n";
    return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& data_path) {
    const auto model = model::load_model(model_path);
    const auto frame = pipeline::parse_weather(pipeline::read_csv(data_path));
    const auto [total, avg] =
        model::log_score(model, frame.faults, encode_for_model(model, frame));
    std::cout << "n=" << frame.faults.size() << " l_total=" << format_number(total)
              << " l_average=" << format_number(avg) << "\n";
    return 0;
}

int cmd_roc(const std::string& model_path, const std::string& data_path,
            const std::string& out_path, double threshold) {
    const auto model = model::load_model(model_path);
    const auto frame = pipeline::parse_weather(pipeline::read_csv(data_path));
    const auto roc =
        model::roc_curve(model, frame.faults, encode_for_model(model, frame), threshold);
    if (!out_path.empty()) {
        Csv out;
        out.header = {"score_threshold", "fpr", "tpr"};
        for (const auto& p : roc.points)
            out.rows.push_back(
                {format_number(p.threshold), format_number(p.fpr), format_number(p.tpr)});
        pipeline::save_csv(out, out_path);
    }
    std::cout << "event=y>=" << format_number(threshold) << " auc=" << format_number(roc.auc)
              << "\n";
    return 0;
}

int cmd_importance(const std::string& model_path, const std::string& out_path) {
    const auto model = model::load_model(model_path);
    Csv out;
    out.header = {"stage", "param", "term", "l_gain"};
    for (const auto& r : model::importance(model))
        out.rows.push_back({r.stage, r.param, r.term_id, format_number(r.total)});
    if (out_path.empty())
        std::cout << pipeline::write_csv(out);
    else
        pipeline::save_csv(out, out_path);
    return 0;
}

int cmd_partial(const std::string& model_path, const std::string& stage, int param,
                const std::string& term, int grid_points, const std::string& out_path) {
    const auto model = model::load_model(model_path);
    // Grid over the term's training range.
    const auto& ens = stage == "zero" ? model.bern : model.pos;
    std::string column;
    for (const auto& param_learners : ens.learners)
        for (const auto& l : param_learners)
            if (l.term_id == term && l.block.columns.size() == 1) column = l.block.columns[0];
    if (column.empty())
        throw std::invalid_argument("no single-column term '" + term + "' in stage " + stage);
    const auto rit = model.ranges.numeric.find(column);
    if (rit == model.ranges.numeric.end())
        throw std::invalid_argument("no training range recorded for column '" + column + "'");
    const auto [lo, hi] = rit->second;
    const double pad = 0.1 * (hi - lo);
    std::vector<double> grid;
    for (int i = 0; i < grid_points; ++i)
        grid.push_back(lo - pad + (hi - lo + 2 * pad) * i / (grid_points - 1));

    const auto curve = model::partial_effect(model, stage, param, term, grid);
    Csv out;
    out.header = {column, "effect", "extrapolated"};
    for (const auto& p : curve)
        out.rows.push_back(
            {format_number(p.x), format_number(p.effect), p.extrapolated ? "1" : "0"});
    if (out_path.empty())
        std::cout << pipeline::write_csv(out);
    else
        pipeline::save_csv(out, out_path);
    return 0;
}

int cmd_tune(const json& cfg, const std::string& data_path, const std::string& out_path) {
    const auto d = prepare(cfg, data_path, "", "");
    const auto columns = config_scope("config tune.columns", [&] {
        return cfg.at("tune").at("columns").get<std::vector<std::string>>();
    });
    tune::GAConfig ga;
    if (cfg.contains("tune")) {
        const auto& t = cfg["tune"];
        ga.n_population = t.value("n_population", ga.n_population);
        ga.n_generations = t.value("n_generations", ga.n_generations);
        ga.p_crossover = t.value("p_crossover", ga.p_crossover);
        ga.p_mutation = t.value("p_mutation", ga.p_mutation);
        ga.seed = t.value("seed", ga.seed);
    }
    const auto tc = train_config_from(cfg, cfg.value("nu", 0.1), nullptr);
    const auto res =
        tune::tune_tree_model(d.y_train, d.train, d.y_holdout, d.holdout, columns,
                              cfg.value("family", std::string("gamma")), tc, ga);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw std::invalid_argument("cannot write report '" + out_path + "'");
        out << res.report_csv;
    }
    std::cout << "best genome=" << res.best_genome.to_string()
              << " max_depth=" << res.best.max_depth << " mtry=" << res.best.mtry
              << " min_leaf=" << res.best.min_leaf
              << " holdout_l_total=" << format_number(res.best_fitness) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("BOOSTLSS_THREADS")) {
        const int n = std::atoi(threads);
        if (n > 0) Eigen::setNbThreads(n);
    }

    CLI::App app{"Distributional boosting for daily overhead-line fault counts"};
    app.require_subcommand(1);

    std::string config_path, data_path, model_path, out_path, log_path, report_path;
    std::string adjacency_path, admin_path, overlap_path, stage = "positive", term;
    double threshold = 14.0;
    int param = 0, grid_points = 101;

    auto* sim = app.add_subcommand("simulate", "Generate a synthetic weather panel");
    sim->add_option("--config", config_path, "JSON config with a 'synthetic' section")
        ->required();
    sim->add_option("--out", out_path, "Output weather CSV")->required();

    auto* train = app.add_subcommand("train", "Fit the two-stage model");
    train->add_option("--config", config_path)->required();
    train->add_option("--data", data_path, "Weather CSV")->required();
    train->add_option("--model", model_path, "Output model JSON")->required();
    train->add_option("--log", log_path, "Iteration log file");
    train->add_option("--report", report_path, "Fit report file");
    train->add_option("--adjacency", adjacency_path, "Region adjacency edge list");
    train->add_option("--admin-faults", admin_path, "Daily admin-region fault counts CSV");
    train->add_option("--overlap", overlap_path, "Forecast/admin region overlap weights CSV");

    auto* predict = app.add_subcommand("predict", "Predict distributions for new data");
    predict->add_option("--model", model_path)->required();
    predict->add_option("--data", data_path)->required();
    predict->add_option("--out", out_path)->required();
    predict->add_option("--threshold", threshold, "Exceedance event threshold (default 14)");

    auto* evaluate = app.add_subcommand("evaluate", "Log-score a model on labelled data");
    evaluate->add_option("--model", model_path)->required();
    evaluate->add_option("--data", data_path)->required();

    auto* roc = app.add_subcommand("roc", "ROC of the exceedance event");
    roc->add_option("--model", model_path)->required();
    roc->add_option("--data", data_path)->required();
    roc->add_option("--out", out_path, "ROC points CSV");
    roc->add_option("--threshold", threshold);

    auto* imp = app.add_subcommand("importance", "Per-term log-likelihood gains");
    imp->add_option("--model", model_path)->required();
    imp->add_option("--out", out_path);

    auto* partial = app.add_subcommand("partial", "Partial effect of one term");
    partial->add_option("--model", model_path)->required();
    partial->add_option("--stage", stage, "zero | positive");
    partial->add_option("--param", param, "Parameter index within the stage");
    partial->add_option("--term", term)->required();
    partial->add_option("--points", grid_points);
    partial->add_option("--out", out_path);

    auto* tune = app.add_subcommand("tune", "GA search over tree hyperparameters");
    tune->add_option("--config", config_path)->required();
    tune->add_option("--data", data_path)->required();
    tune->add_option("--out", out_path, "Evaluation report CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(load_config(config_path), out_path);
        if (train->parsed())
            return cmd_train(load_config(config_path), data_path, model_path, log_path,
                             report_path, adjacency_path, admin_path, overlap_path);
        if (predict->parsed()) return cmd_predict(model_path, data_path, out_path, threshold);
        if (evaluate->parsed()) return cmd_evaluate(model_path, data_path);
        if (roc->parsed()) return cmd_roc(model_path, data_path, out_path, threshold);
        if (imp->parsed()) return cmd_importance(model_path, out_path);
        if (partial->parsed())
            return cmd_partial(model_path, stage, param, term, grid_points, out_path);
        if (tune->parsed()) return cmd_tune(load_config(config_path), data_path, out_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
