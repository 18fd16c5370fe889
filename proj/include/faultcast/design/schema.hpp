#ifndef FAULTCAST_DESIGN_SCHEMA_HPP
#define FAULTCAST_DESIGN_SCHEMA_HPP

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace faultcast::design {

enum class ColumnKind { numeric, categorical, ordinal, binary };

std::string column_kind_name(ColumnKind k);
ColumnKind column_kind_from_name(const std::string& name);

// Declared type plus fitted standardization / level state for one column.
struct ColumnSchema {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    std::vector<std::string> levels;  // categorical/ordinal (ordinal: declared order)
    double mean = 0.0;                // numeric standardization, population-n denominator
    double sd = 1.0;
    bool standardized = false;        // set by fit_schema for numeric columns
};

// Untyped input column; numeric columns carry values, label columns carry
// strings. Used as the hand-off format from CSV parsing into encoding.
struct RawColumn {
    std::string name;
    bool is_numeric = true;
    std::vector<double> values;
    std::vector<std::string> labels;
};

struct RawTable {
    std::vector<RawColumn> columns;
    std::size_t rows() const;
    const RawColumn& column(const std::string& name) const;
    bool has_column(const std::string& name) const;
};

struct EncodedColumn {
    ColumnSchema schema;
    Eigen::VectorXd values;     // standardized for numeric, 0/1 for binary
    Eigen::VectorXd raw;        // original numeric values (numeric/binary)
    std::vector<int> codes;     // level indices (categorical/ordinal)
};

struct EncodedTable {
    Eigen::Index n = 0;
    std::map<std::string, EncodedColumn> columns;

    const EncodedColumn& at(const std::string& name) const;
    bool has(const std::string& name) const;
};

// Fits standardization stats and level sets on training data. Ordinal
// schemas must declare their level order up front; categorical levels are
// collected from the data in first-appearance order when not declared.
std::vector<ColumnSchema> fit_schema(std::vector<ColumnSchema> declared, const RawTable& raw);

// Applies a fitted schema. Throws on unseen categorical levels (naming the
// level) and on missing values; never refits statistics.
EncodedTable encode(const std::vector<ColumnSchema>& schema, const RawTable& raw);

// Row selection preserving every column's fitted schema (used to restrict
// the positive stage to nonzero-response rows).
EncodedTable subset(const EncodedTable& table, const std::vector<Eigen::Index>& rows);

}  // namespace faultcast::design

#endif
