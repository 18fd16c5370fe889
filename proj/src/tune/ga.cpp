#include "faultcast/tune/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace faultcast::tune {

namespace {

constexpr std::array<int, 4> kMinLeafChoices = {50, 250, 450, 650};

int field_value(const Genome& g, int first, int width) {
    int v = 0;
    for (int i = 0; i < width; ++i)
        v = v * 2 + g.bits[static_cast<std::size_t>(first + i)];
    return v;
}

void set_field(Genome& g, int first, int width, int value) {
    for (int i = width - 1; i >= 0; --i) {
        g.bits[static_cast<std::size_t>(first + i)] = static_cast<std::uint8_t>(value & 1);
        value >>= 1;
    }
}

}  // namespace

std::string Genome::to_string() const {
    std::string s;
    for (auto b : bits) s += b ? '1' : '0';
    return s;
}

learn::TreeConfig decode(const Genome& g) {
    learn::TreeConfig c;
    c.max_depth = 1 + field_value(g, 0, 2);
    c.mtry = 1 + field_value(g, 2, 3);
    c.min_leaf = kMinLeafChoices[static_cast<std::size_t>(field_value(g, 5, 2))];
    c.min_split = 200;
    c.min_gain = 0.0;
    return c;
}

Genome encode(const learn::TreeConfig& config) {
    Genome g;
    if (config.max_depth < 1 || config.max_depth > 4)
        throw std::invalid_argument("encode: depth outside [1, 4]");
    if (config.mtry < 1 || config.mtry > 8)
        throw std::invalid_argument("encode: mtry outside [1, 8]");
    const auto it =
        std::find(kMinLeafChoices.begin(), kMinLeafChoices.end(), config.min_leaf);
    if (it == kMinLeafChoices.end())
        throw std::invalid_argument("encode: min_leaf not one of {50, 250, 450, 650}");
    set_field(g, 0, 2, config.max_depth - 1);
    set_field(g, 2, 3, config.mtry - 1);
    set_field(g, 5, 2, static_cast<int>(it - kMinLeafChoices.begin()));
    return g;
}

GAResult run_ga(const GAConfig& config, const std::function<double(const Genome&)>& fitness) {
    if (config.elitism >= config.n_population)
        throw std::invalid_argument("ga: elitism must be below the population size");
    std::mt19937_64 rng(config.seed);
    std::uniform_int_distribution<int> bit(0, 1);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    const auto score = [&](const Genome& g) {
        const double f = fitness(g);
        return std::isfinite(f) ? f : -std::numeric_limits<double>::infinity();
    };

    std::vector<Genome> pop(static_cast<std::size_t>(config.n_population));
    for (auto& g : pop)
        for (auto& b : g.bits) b = static_cast<std::uint8_t>(bit(rng));

    GAResult out;
    out.best_fitness = -std::numeric_limits<double>::infinity();
    std::vector<double> fit(pop.size());

    for (int gen = 1; gen <= config.n_generations; ++gen) {
        std::size_t gen_best = 0;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            fit[i] = score(pop[i]);
            out.evaluations.push_back({gen, pop[i], fit[i]});
            if (fit[i] > fit[gen_best]) gen_best = i;
        }
        if (fit[gen_best] > out.best_fitness) {
            out.best_fitness = fit[gen_best];
            out.best = pop[gen_best];
        }
        out.generation_best.push_back(out.best_fitness);
        if (gen == config.n_generations) break;

        const auto tournament = [&]() -> const Genome& {
            std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
            const std::size_t a = pick(rng), b = pick(rng);
            if (fit[a] != fit[b]) return pop[fit[a] > fit[b] ? a : b];
            return pop[std::min(a, b)];
        };

        std::vector<Genome> next;
        for (int e = 0; e < config.elitism; ++e) next.push_back(out.best);
        while (static_cast<int>(next.size()) < config.n_population) {
            Genome c1 = tournament();
            Genome c2 = tournament();
            if (u01(rng) < config.p_crossover) {
                std::uniform_int_distribution<int> locus(1, 6);
                const int cut = locus(rng);
                for (int i = cut; i < 7; ++i)
                    std::swap(c1.bits[static_cast<std::size_t>(i)],
                              c2.bits[static_cast<std::size_t>(i)]);
            }
            for (Genome* c : {&c1, &c2})
                for (auto& b : c->bits)
                    if (u01(rng) < config.p_mutation) b = static_cast<std::uint8_t>(1 - b);
            next.push_back(c1);
            if (static_cast<int>(next.size()) < config.n_population) next.push_back(c2);
        }
        pop = std::move(next);
    }
    return out;
}

TuneResult tune_tree_model(const Eigen::VectorXd& y_train, const design::EncodedTable& train,
                           const Eigen::VectorXd& y_holdout,
                           const design::EncodedTable& holdout,
                           const std::vector<std::string>& tree_columns,
                           const std::string& family, const engine::TrainConfig& train_config,
                           const GAConfig& ga) {
    // Positive-stage rows only.
    std::vector<Eigen::Index> tr_idx, ho_idx;
    for (Eigen::Index i = 0; i < y_train.size(); ++i)
        if (y_train[i] > 0.0) tr_idx.push_back(i);
    for (Eigen::Index i = 0; i < y_holdout.size(); ++i)
        if (y_holdout[i] > 0.0) ho_idx.push_back(i);
    if (tr_idx.empty() || ho_idx.empty())
        throw std::invalid_argument("tune: no positive-response rows");
    const design::EncodedTable tr = design::subset(train, tr_idx);
    const design::EncodedTable ho = design::subset(holdout, ho_idx);
    Eigen::VectorXd yt(static_cast<Eigen::Index>(tr_idx.size()));
    Eigen::VectorXd yh(static_cast<Eigen::Index>(ho_idx.size()));
    for (std::size_t i = 0; i < tr_idx.size(); ++i)
        yt[static_cast<Eigen::Index>(i)] = y_train[tr_idx[i]];
    for (std::size_t i = 0; i < ho_idx.size(); ++i)
        yh[static_cast<Eigen::Index>(i)] = y_holdout[ho_idx[i]];

    const auto fam = dist::make_family(family);
    const auto fitness = [&](const Genome& g) -> double {
        const learn::TreeConfig tc = decode(g);
        std::vector<std::vector<engine::BaseLearner>> learners(
            static_cast<std::size_t>(fam->param_count()));
        for (auto& list : learners)
            list.push_back(engine::tree_learner("tree", tc, tree_columns));
        try {
            const auto ens =
                engine::train(*fam, yt, tr, yh, ho, std::move(learners), train_config);
            return ens.holdout_trace[static_cast<std::size_t>(ens.m_stop)];
        } catch (const std::exception&) {
            return -std::numeric_limits<double>::infinity();
        }
    };

    const GAResult res = run_ga(ga, fitness);

    TuneResult out;
    out.best_genome = res.best;
    out.best = decode(res.best);
    out.best_fitness = res.best_fitness;
    out.generation_best = res.generation_best;
    std::ostringstream csv;
    csv << "generation,genome,max_depth,mtry,min_leaf,holdout_l_total\n";
    for (const auto& ev : res.evaluations) {
        const learn::TreeConfig c = decode(ev.genome);
        csv << ev.generation << ',' << ev.genome.to_string() << ',' << c.max_depth << ','
            << c.mtry << ',' << c.min_leaf << ',' << ev.fitness << '\n';
    }
    out.report_csv = csv.str();
    return out;
}

}  // namespace faultcast::tune
