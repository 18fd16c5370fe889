#include <iostream>
#include <stdexcept>

#include "faultcast/design/block.hpp"

namespace faultcast::design {

DesignBlock interaction_block(const EncodedTable& table, const std::vector<std::string>& columns,
                              double df_target) {
    if (columns.size() < 2)
        throw std::invalid_argument("interaction: need >= 2 constituent columns");
    DesignBlock b;
    b.kind = BlockKind::interaction;
    b.columns = columns;
    b.term_id = "interaction(" + columns.front();
    for (std::size_t j = 1; j < columns.size(); ++j) b.term_id += ":" + columns[j];
    b.term_id += ")";

    // First pass builds the full product expansion; all-zero columns (empty
    // level combinations) are dropped and recorded for predict-time replay.
    Eigen::MatrixXd full = build_rows(b, table);
    for (Eigen::Index j = 0; j < full.cols(); ++j) {
        if (full.col(j).cwiseAbs().maxCoeff() > 0.0)
            b.kept_columns.push_back(static_cast<int>(j));
    }
    if (b.kept_columns.empty())
        throw std::invalid_argument(b.term_id + ": all product columns are zero");
    if (static_cast<Eigen::Index>(b.kept_columns.size()) < full.cols()) {
        std::cerr << "warning: " << b.term_id << ": dropping "
                  << full.cols() - static_cast<Eigen::Index>(b.kept_columns.size())
                  << " of " << full.cols() << " product columns (no observations)\n";
        b.B = build_rows(b, table);
    } else {
        b.kept_columns.clear();
        b.B = std::move(full);
    }

    const Eigen::Index p = b.B.cols();
    b.penalty = Eigen::MatrixXd::Identity(p, p);
    b.df_target = df_target;
    b.lambda = calibrate_lambda(b.B, b.penalty, df_target, b.term_id);
    return b;
}

}  // namespace faultcast::design
