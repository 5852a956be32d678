#include "nlpca/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "nlpca/error.hpp"
#include "nlpca/rng.hpp"

namespace nlpca {

namespace {

DataTable numeric_table(const std::vector<std::string>& names,
                        std::vector<Eigen::VectorXd> columns) {
    DataTable t;
    for (const auto& name : names) {
        t.schemas.push_back({name, VarKind::Numerical, {}});
    }
    t.columns = std::move(columns);
    return t;
}

}  // namespace

Eigen::MatrixXd DataTable::as_matrix() const {
    Eigen::MatrixXd m(rows(), cols());
    for (int j = 0; j < cols(); ++j) {
        m.col(j) = columns[j];
    }
    return m;
}

DataTable gen_circles(int n, double factor, double noise, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int outer = n / 2;
    Eigen::VectorXd x(n), y(n);
    for (int i = 0; i < outer; ++i) {
        const double th = 2.0 * std::numbers::pi * i / outer;
        x(i) = std::cos(th);
        y(i) = std::sin(th);
    }
    const int inner = n - outer;
    for (int i = 0; i < inner; ++i) {
        const double th = 2.0 * std::numbers::pi * i / inner;
        x(outer + i) = factor * std::cos(th);
        y(outer + i) = factor * std::sin(th);
    }
    for (int i = 0; i < n; ++i) {
        x(i) += noise * gauss(rng);
        y(i) += noise * gauss(rng);
    }
    return numeric_table({"x1", "x2"}, {std::move(x), std::move(y)});
}

DataTable gen_spheres(int n, double radius_outer, double radius_inner,
                      double noise, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd x(n), y(n), z(n);
    // Golden-angle spiral: near-uniform coverage of each sphere surface.
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    auto fill = [&](int offset, int count, double radius) {
        for (int i = 0; i < count; ++i) {
            const double v = 1.0 - 2.0 * (i + 0.5) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - v * v));
            const double phi = golden * i;
            x(offset + i) = radius * r * std::cos(phi);
            y(offset + i) = radius * v;
            z(offset + i) = radius * r * std::sin(phi);
        }
    };
    const int outer = n / 2;
    fill(0, outer, radius_outer);
    fill(outer, n - outer, radius_inner);
    for (int i = 0; i < n; ++i) {
        x(i) += noise * gauss(rng);
        y(i) += noise * gauss(rng);
        z(i) += noise * gauss(rng);
    }
    return numeric_table({"x1", "x2", "x3"}, {std::move(x), std::move(y), std::move(z)});
}

DataTable gen_stripes(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_int_distribution<int> stripe(-4, 4);
    std::normal_distribution<double> gauss(0.0, 0.1);
    Eigen::VectorXd x1(n), x2(n);
    for (int i = 0; i < n; ++i) {
        const int s = stripe(rng);
        const double e = gauss(rng);
        x1(i) = s * std::numbers::pi + e;
        x2(i) = e;
    }
    return numeric_table({"x1", "x2"}, {std::move(x1), std::move(x2)});
}

namespace {

std::vector<std::string> parse_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace

DataTable load_table(const std::string& data_path, const std::string& schema_path) {
    std::ifstream schema_in(schema_path);
    if (!schema_in) {
        throw IoError("cannot open schema file: " + schema_path);
    }
    nlohmann::json sj;
    try {
        schema_in >> sj;
    } catch (const nlohmann::json::exception& e) {
        throw LoadError("schema file " + schema_path + ": " + e.what());
    }
    if (!sj.is_array() || sj.empty()) {
        throw LoadError("schema file " + schema_path + ": expected a non-empty array");
    }

    struct ColumnSpec {
        VariableSchema schema;
        bool is_label = false;
    };
    std::vector<ColumnSpec> specs;
    for (const auto& e : sj) {
        ColumnSpec spec;
        spec.schema.name = e.at("name").get<std::string>();
        const std::string kind = e.at("kind").get<std::string>();
        if (kind == "numerical") {
            spec.schema.kind = VarKind::Numerical;
        } else if (kind == "categorical") {
            spec.schema.kind = VarKind::Categorical;
        } else if (kind == "ordinal") {
            spec.schema.kind = VarKind::Ordinal;
        } else {
            throw LoadError("schema column '" + spec.schema.name +
                            "': unknown kind '" + kind + "'");
        }
        if (e.contains("levels")) {
            spec.schema.levels = e["levels"].get<std::vector<std::string>>();
        }
        spec.is_label = e.value("is_label", false);
        validate_schema(spec.schema);
        specs.push_back(std::move(spec));
    }

    std::ifstream in(data_path);
    if (!in) {
        throw IoError("cannot open data file: " + data_path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw LoadError(data_path + ": empty file");
    }
    const auto header = parse_csv_line(line);
    if (header.size() != specs.size()) {
        throw LoadError(data_path + ": header has " + std::to_string(header.size()) +
                        " columns but schema lists " + std::to_string(specs.size()));
    }
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (trim(header[j]) != specs[j].schema.name) {
            throw LoadError(data_path + ": column " + std::to_string(j + 1) +
                            " is '" + trim(header[j]) + "' but schema expects '" +
                            specs[j].schema.name + "'");
        }
    }

    // Level lookup per column (closed world: the schema defines the levels).
    std::vector<std::unordered_map<std::string, int>> level_index(specs.size());
    for (std::size_t j = 0; j < specs.size(); ++j) {
        for (std::size_t v = 0; v < specs[j].schema.levels.size(); ++v) {
            level_index[j][specs[j].schema.levels[v]] = static_cast<int>(v);
        }
    }

    std::vector<std::vector<double>> values(specs.size());
    std::vector<std::string> labels;
    int row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        ++row;
        const auto fields = parse_csv_line(line);
        if (fields.size() != specs.size()) {
            throw LoadError(data_path + ": row " + std::to_string(row) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(specs.size()));
        }
        for (std::size_t j = 0; j < specs.size(); ++j) {
            const std::string cell = trim(fields[j]);
            const auto& spec = specs[j];
            if (spec.is_label) {
                labels.push_back(cell);
                continue;
            }
            if (spec.schema.kind == VarKind::Numerical) {
                try {
                    std::size_t pos = 0;
                    const double v = std::stod(cell, &pos);
                    if (pos != cell.size() || !std::isfinite(v)) {
                        throw std::invalid_argument(cell);
                    }
                    values[j].push_back(v);
                } catch (const std::exception&) {
                    throw LoadError(data_path + ": row " + std::to_string(row) +
                                    ", column '" + spec.schema.name +
                                    "': cannot parse '" + cell + "' as a number");
                }
            } else {
                auto it = level_index[j].find(cell);
                if (it == level_index[j].end()) {
                    throw UnknownLevelError(data_path + ": row " + std::to_string(row) +
                                            ", column '" + spec.schema.name +
                                            "': unknown level '" + cell + "'");
                }
                values[j].push_back(static_cast<double>(it->second));
            }
        }
    }
    if (row == 0) {
        throw LoadError(data_path + ": no data rows");
    }

    DataTable t;
    for (std::size_t j = 0; j < specs.size(); ++j) {
        if (specs[j].is_label) {
            t.label_name = specs[j].schema.name;
            continue;
        }
        t.schemas.push_back(specs[j].schema);
        Eigen::VectorXd col(row);
        for (int i = 0; i < row; ++i) {
            col(i) = values[j][i];
        }
        t.columns.push_back(std::move(col));
    }
    t.labels = std::move(labels);
    return t;
}

SplitPair split(const DataTable& table, double ratio, std::uint64_t seed) {
    const Eigen::Index n = table.rows();
    if (n < 4) {
        throw InsufficientRowsError("split: need at least 4 rows, got " +
                                    std::to_string(n));
    }
    if (ratio <= 0.0 || ratio >= 1.0) {
        throw ConfigError("split: ratio must be in (0,1)");
    }
    std::vector<Eigen::Index> perm(n);
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    Rng rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto n_train = static_cast<std::size_t>(
        std::floor(ratio * static_cast<double>(n)));
    SplitPair s;
    s.train.assign(perm.begin(), perm.begin() + n_train);
    s.validation.assign(perm.begin() + n_train, perm.end());
    return s;
}

Eigen::VectorXd gather(const Eigen::VectorXd& column,
                       const std::vector<Eigen::Index>& rows) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = column(rows[i]);
    }
    return out;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m,
                            const std::vector<Eigen::Index>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
    }
    return out;
}

}  // namespace nlpca
