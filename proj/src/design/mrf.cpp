#include <iostream>
#include <sstream>
#include <stdexcept>

#include "faultcast/design/block.hpp"

namespace faultcast::design {

Eigen::MatrixXd AdjacencyGraph::laplacian() const {
    const auto p = static_cast<Eigen::Index>(regions.size());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(p, p);
    for (const auto& [a, b] : edges) {
        L(a, a) += 1.0;
        L(b, b) += 1.0;
        L(a, b) -= 1.0;
        L(b, a) -= 1.0;
    }
    return L;
}

int AdjacencyGraph::component_count() const {
    const int p = static_cast<int>(regions.size());
    std::vector<int> comp(static_cast<std::size_t>(p), -1);
    int count = 0;
    for (int start = 0; start < p; ++start) {
        if (comp[static_cast<std::size_t>(start)] >= 0) continue;
        std::vector<int> stack = {start};
        comp[static_cast<std::size_t>(start)] = count;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (const auto& [a, b] : edges) {
                const int other = a == v ? b : b == v ? a : -1;
                if (other >= 0 && comp[static_cast<std::size_t>(other)] < 0) {
                    comp[static_cast<std::size_t>(other)] = count;
                    stack.push_back(other);
                }
            }
        }
        ++count;
    }
    return count;
}

bool AdjacencyGraph::has_region(const std::string& name) const {
    for (const auto& r : regions)
        if (r == name) return true;
    return false;
}

AdjacencyGraph parse_adjacency(const std::string& text) {
    AdjacencyGraph g;
    auto index_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < g.regions.size(); ++i)
            if (g.regions[i] == name) return static_cast<int>(i);
        g.regions.push_back(name);
        return static_cast<int>(g.regions.size() - 1);
    };
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("adjacency line " + std::to_string(lineno) +
                                        ": expected 'regionA,regionB'");
        std::string a = line.substr(0, comma);
        std::string b = line.substr(comma + 1);
        // Trim trailing carriage returns / spaces.
        auto trim = [](std::string& s) {
            while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
            while (!s.empty() && s.front() == ' ') s.erase(s.begin());
        };
        trim(a);
        trim(b);
        if (a.empty() || b.empty())
            throw std::invalid_argument("adjacency line " + std::to_string(lineno) +
                                        ": empty region name");
        const int ia = index_of(a);  // sequence the lookups: argument order is unspecified
        const int ib = index_of(b);
        g.edges.emplace_back(ia, ib);
    }
    return g;
}

DesignBlock mrf_block(const EncodedTable& table, const std::string& column,
                      const AdjacencyGraph& graph, double df_target) {
    const auto& col = table.at(column);
    for (const auto& lvl : col.schema.levels)
        if (!graph.has_region(lvl))
            throw std::invalid_argument("region '" + lvl + "' missing from adjacency graph");

    DesignBlock b;
    b.term_id = "mrf(" + column + ")";
    b.kind = BlockKind::mrf;
    b.columns = {column};
    b.columns.insert(b.columns.end(), graph.regions.begin(), graph.regions.end());
    b.df_target = df_target;

    const Eigen::MatrixXd L = graph.laplacian();
    const auto p = L.rows();
    b.B = build_rows(b, table);  // raw indicators at this point

    if (L.isZero(0.0)) {
        std::cerr << "warning: mrf(" << column
                  << "): graph has no edges; falling back to a ridge penalty\n";
        b.penalty = Eigen::MatrixXd::Identity(p, p);
        b.lambda = calibrate_lambda(b.B, b.penalty, df_target, b.term_id);
        return b;
    }

    // Center by dropping the Laplacian's null space (per-component constant
    // directions) and keeping its positive eigenspace.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L);
    const double tol = 1e-10 * eig.eigenvalues().maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < p; ++j)
        if (eig.eigenvalues()[j] > tol) keep.push_back(j);
    Eigen::MatrixXd U(p, static_cast<Eigen::Index>(keep.size()));
    Eigen::VectorXd d(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        U.col(static_cast<Eigen::Index>(j)) = eig.eigenvectors().col(keep[j]);
        d[static_cast<Eigen::Index>(j)] = eig.eigenvalues()[keep[j]];
    }
    b.reparam = U;
    b.penalty = d.asDiagonal();
    Eigen::MatrixXd Z = b.B * U;
    b.center = Z.colwise().mean();
    b.B = build_rows(b, table);
    b.lambda = calibrate_lambda(b.B, b.penalty, df_target, b.term_id);
    return b;
}

}  // namespace faultcast::design
