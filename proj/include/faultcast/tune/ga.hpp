#ifndef FAULTCAST_TUNE_GA_HPP
#define FAULTCAST_TUNE_GA_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "faultcast/design/schema.hpp"
#include "faultcast/engine/boost.hpp"
#include "faultcast/learn/tree.hpp"

namespace faultcast::tune {

// 7-bit tree-hyperparameter genome: bits [0,1] depth 1..4, bits [2,4]
// mtry 1..8, bits [5,6] index into {50, 250, 450, 650} for min_leaf.
// Every bit pattern decodes to a valid configuration.
struct Genome {
    std::array<std::uint8_t, 7> bits{};

    std::string to_string() const;
    bool operator==(const Genome&) const = default;
};

learn::TreeConfig decode(const Genome& g);
Genome encode(const learn::TreeConfig& config);

struct GAConfig {
    int n_population = 8;
    int n_generations = 3;
    double p_crossover = 0.8;
    double p_mutation = 0.1;
    int elitism = 1;
    std::uint64_t seed = 1;
};

struct Evaluation {
    int generation = 0;
    Genome genome;
    double fitness = 0.0;
};

struct GAResult {
    Genome best;
    double best_fitness = 0.0;
    std::vector<double> generation_best;  // nondecreasing under elitism
    std::vector<Evaluation> evaluations;
};

// Tournament-2 selection, single-point crossover at a uniform locus,
// per-bit mutation, top-1 elitism. Non-finite fitness counts as -inf.
GAResult run_ga(const GAConfig& config, const std::function<double(const Genome&)>& fitness);

struct TuneResult {
    learn::TreeConfig best;
    Genome best_genome;
    double best_fitness = 0.0;
    std::vector<double> generation_best;
    std::string report_csv;  // generation, bits, decoded config, holdout l_total
};

// Fitness of a genome = holdout total log-likelihood of the positive-stage
// tree-learner model trained with the decoded configuration; a genome whose
// training fails scores -inf and the run continues.
TuneResult tune_tree_model(const Eigen::VectorXd& y_train, const design::EncodedTable& train,
                           const Eigen::VectorXd& y_holdout,
                           const design::EncodedTable& holdout,
                           const std::vector<std::string>& tree_columns,
                           const std::string& family, const engine::TrainConfig& train_config,
                           const GAConfig& ga);

}  // namespace faultcast::tune

#endif
