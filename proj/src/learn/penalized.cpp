#include "faultcast/learn/penalized.hpp"

#include <stdexcept>

namespace faultcast::learn {

PenalizedSolver::PenalizedSolver(const design::DesignBlock& block) : block_(&block) {
    Eigen::MatrixXd A = block.B.transpose() * block.B;
    if (block.lambda > 0.0 && block.penalty.size() > 0) A += block.lambda * block.penalty;
    llt_.compute(A);
    if (llt_.info() != Eigen::Success) {
        A.diagonal().array() += 1e-10;
        llt_.compute(A);
        if (llt_.info() != Eigen::Success)
            throw std::runtime_error("term '" + block.term_id +
                                     "': normal equations are singular");
    }
}

Eigen::VectorXd PenalizedSolver::coefficients(const Eigen::VectorXd& u) const {
    return llt_.solve(block_->B.transpose() * u);
}

PenalizedFit PenalizedSolver::fit(const Eigen::VectorXd& u) const {
    PenalizedFit out;
    out.beta = coefficients(u);
    out.fitted = block_->B * out.beta;
    out.rss = (u - out.fitted).squaredNorm();
    return out;
}

}  // namespace faultcast::learn
