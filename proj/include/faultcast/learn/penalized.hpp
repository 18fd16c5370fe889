#ifndef FAULTCAST_LEARN_PENALIZED_HPP
#define FAULTCAST_LEARN_PENALIZED_HPP

#include <Eigen/Dense>

#include "faultcast/design/block.hpp"

namespace faultcast::learn {

// Penalized least-squares fit of one design block to a working response.
struct PenalizedFit {
    Eigen::VectorXd beta;
    Eigen::VectorXd fitted;  // B * beta on the training rows
    double rss = 0.0;
};

// Caches the Cholesky factor of (B'B + lambda P) for a calibrated block so
// that refitting across boosting iterations only costs the B'u product and
// a triangular solve.
class PenalizedSolver {
public:
    explicit PenalizedSolver(const design::DesignBlock& block);

    PenalizedFit fit(const Eigen::VectorXd& u) const;
    Eigen::VectorXd coefficients(const Eigen::VectorXd& u) const;

    const design::DesignBlock& block() const { return *block_; }

private:
    const design::DesignBlock* block_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

}  // namespace faultcast::learn

#endif
