#include "faultcast/design/schema.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace faultcast::design {

std::string column_kind_name(ColumnKind k) {
    switch (k) {
        case ColumnKind::numeric: return "numeric";
        case ColumnKind::categorical: return "categorical";
        case ColumnKind::ordinal: return "ordinal";
        case ColumnKind::binary: return "binary";
    }
    return "?";
}

ColumnKind column_kind_from_name(const std::string& name) {
    if (name == "numeric") return ColumnKind::numeric;
    if (name == "categorical") return ColumnKind::categorical;
    if (name == "ordinal") return ColumnKind::ordinal;
    if (name == "binary") return ColumnKind::binary;
    throw std::invalid_argument("unknown column kind '" + name + "'");
}

std::size_t RawTable::rows() const {
    if (columns.empty()) return 0;
    const auto& c = columns.front();
    return c.is_numeric ? c.values.size() : c.labels.size();
}

const RawColumn& RawTable::column(const std::string& name) const {
    for (const auto& c : columns)
        if (c.name == name) return c;
    throw std::invalid_argument("no column named '" + name + "'");
}

bool RawTable::has_column(const std::string& name) const {
    return std::any_of(columns.begin(), columns.end(),
                       [&](const RawColumn& c) { return c.name == name; });
}

const EncodedColumn& EncodedTable::at(const std::string& name) const {
    auto it = columns.find(name);
    if (it == columns.end()) throw std::invalid_argument("no encoded column '" + name + "'");
    return it->second;
}

bool EncodedTable::has(const std::string& name) const { return columns.count(name) > 0; }

std::vector<ColumnSchema> fit_schema(std::vector<ColumnSchema> declared, const RawTable& raw) {
    for (auto& sch : declared) {
        const auto& col = raw.column(sch.name);
        switch (sch.kind) {
            case ColumnKind::numeric: {
                if (!col.is_numeric)
                    throw std::invalid_argument("column '" + sch.name + "' is not numeric");
                double m = 0.0;
                for (double v : col.values) {
                    if (std::isnan(v))
                        throw std::invalid_argument("missing value in column '" + sch.name + "'");
                    m += v;
                }
                m /= static_cast<double>(col.values.size());
                double ss = 0.0;
                for (double v : col.values) ss += (v - m) * (v - m);
                const double sd = std::sqrt(ss / static_cast<double>(col.values.size()));
                if (!(sd > 0.0))
                    throw std::invalid_argument("no spread in numeric column '" + sch.name + "'");
                sch.mean = m;
                sch.sd = sd;
                sch.standardized = true;
                break;
            }
            case ColumnKind::categorical:
            case ColumnKind::ordinal: {
                if (sch.levels.empty()) {
                    if (sch.kind == ColumnKind::ordinal)
                        throw std::invalid_argument("ordinal column '" + sch.name +
                                                    "' must declare its level order");
                    for (const auto& lab : col.labels) {
                        if (std::find(sch.levels.begin(), sch.levels.end(), lab) ==
                            sch.levels.end())
                            sch.levels.push_back(lab);
                    }
                }
                if (sch.levels.empty())
                    throw std::invalid_argument("column '" + sch.name + "' has no levels");
                break;
            }
            case ColumnKind::binary:
                break;
        }
    }
    return declared;
}

EncodedTable encode(const std::vector<ColumnSchema>& schema, const RawTable& raw) {
    EncodedTable out;
    out.n = static_cast<Eigen::Index>(raw.rows());
    for (const auto& sch : schema) {
        const auto& col = raw.column(sch.name);
        EncodedColumn enc;
        enc.schema = sch;
        switch (sch.kind) {
            case ColumnKind::numeric: {
                enc.raw = Eigen::Map<const Eigen::VectorXd>(col.values.data(),
                                                            static_cast<Eigen::Index>(col.values.size()));
                for (double v : col.values)
                    if (std::isnan(v))
                        throw std::invalid_argument("missing value in column '" + sch.name + "'");
                enc.values = (enc.raw.array() - sch.mean) / sch.sd;
                break;
            }
            case ColumnKind::binary: {
                enc.raw = Eigen::Map<const Eigen::VectorXd>(col.values.data(),
                                                            static_cast<Eigen::Index>(col.values.size()));
                for (double v : col.values)
                    if (v != 0.0 && v != 1.0)
                        throw std::invalid_argument("binary column '" + sch.name +
                                                    "' contains non-0/1 value");
                enc.values = enc.raw;  // binary dummies are left unstandardized
                break;
            }
            case ColumnKind::categorical:
            case ColumnKind::ordinal: {
                enc.codes.reserve(col.labels.size());
                for (const auto& lab : col.labels) {
                    if (lab.empty())
                        throw std::invalid_argument("missing value in column '" + sch.name + "'");
                    const auto it = std::find(sch.levels.begin(), sch.levels.end(), lab);
                    if (it == sch.levels.end())
                        throw std::invalid_argument("unseen level '" + lab + "' in column '" +
                                                    sch.name + "'");
                    enc.codes.push_back(static_cast<int>(it - sch.levels.begin()));
                }
                break;
            }
        }
        out.columns.emplace(sch.name, std::move(enc));
    }
    return out;
}

EncodedTable subset(const EncodedTable& table, const std::vector<Eigen::Index>& rows) {
    EncodedTable out;
    out.n = static_cast<Eigen::Index>(rows.size());
    for (const auto& [name, col] : table.columns) {
        EncodedColumn sub;
        sub.schema = col.schema;
        if (col.values.size() > 0) {
            sub.values.resize(out.n);
            sub.raw.resize(out.n);
            for (Eigen::Index i = 0; i < out.n; ++i) {
                sub.values[i] = col.values[rows[static_cast<std::size_t>(i)]];
                sub.raw[i] = col.raw[rows[static_cast<std::size_t>(i)]];
            }
        }
        if (!col.codes.empty()) {
            sub.codes.reserve(rows.size());
            for (Eigen::Index r : rows) sub.codes.push_back(col.codes[static_cast<std::size_t>(r)]);
        }
        out.columns.emplace(name, std::move(sub));
    }
    return out;
}

}  // namespace faultcast::design
