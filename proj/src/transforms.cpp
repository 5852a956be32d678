#include "nlpca/transforms.hpp"

#include <cmath>

#include "nlpca/error.hpp"
#include "nlpca/rng.hpp"

namespace nlpca {

namespace {

using RowMajorMap = Eigen::Map<
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

int width_for(const VariableSchema& s) {
    return s.kind == VarKind::Categorical ? static_cast<int>(s.levels.size()) : 1;
}

}  // namespace

TransformStack build_stack(const std::vector<VariableSchema>& schemas,
                           std::uint64_t seed) {
    if (schemas.size() < 2) {
        throw ConfigError("build_stack: need at least 2 variables, got " +
                          std::to_string(schemas.size()));
    }
    TransformStack stack;
    stack.schemas = schemas;
    stack.offsets.push_back(0);
    for (const auto& s : schemas) {
        validate_schema(s);
        stack.nets.push_back({width_for(s)});
        stack.offsets.push_back(stack.offsets.back() + stack.nets.back().param_count());
    }

    stack.initial_theta = Eigen::VectorXd::Zero(stack.total_params());
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int l = 0; l < stack.vars(); ++l) {
        const int in = stack.nets[l].input_width;
        double* seg = stack.initial_theta.data() + stack.offsets[l];
        const double w1_scale = std::sqrt(1.0 / in);
        for (int i = 0; i < in * kHiddenUnits; ++i) {
            seg[i] = w1_scale * gauss(rng);
        }
        // biases stay zero
        const double w2_scale = std::sqrt(1.0 / kHiddenUnits);
        double* w2 = seg + in * kHiddenUnits + kHiddenUnits;
        for (int i = 0; i < kHiddenUnits; ++i) {
            w2[i] = w2_scale * gauss(rng);
        }
    }
    return stack;
}

int InputEncoder::input_width(int var) const {
    return width_for(schemas[var]);
}

std::vector<Eigen::MatrixXd> InputEncoder::encode(
    const DataTable& table, const std::vector<Eigen::Index>& rows) const {
    if (static_cast<std::size_t>(table.cols()) != schemas.size()) {
        throw ShapeError("encode: table column count does not match encoder");
    }
    std::vector<Eigen::MatrixXd> out;
    out.reserve(schemas.size());
    const auto m = static_cast<Eigen::Index>(rows.size());
    for (std::size_t l = 0; l < schemas.size(); ++l) {
        const auto& s = schemas[l];
        const auto& col = table.columns[l];
        if (s.kind == VarKind::Categorical) {
            Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(
                m, static_cast<Eigen::Index>(s.levels.size()));
            for (Eigen::Index i = 0; i < m; ++i) {
                onehot(i, static_cast<Eigen::Index>(col(rows[i]))) = 1.0;
            }
            out.push_back(std::move(onehot));
        } else {
            Eigen::MatrixXd e(m, 1);
            const double denom = s.kind == VarKind::Ordinal && s.levels.size() > 1
                                     ? static_cast<double>(s.levels.size() - 1)
                                     : 1.0;
            for (Eigen::Index i = 0; i < m; ++i) {
                double v = col(rows[i]);
                if (s.kind == VarKind::Ordinal) {
                    v /= denom;
                }
                e(i, 0) = (v - means(static_cast<Eigen::Index>(l))) /
                          stds(static_cast<Eigen::Index>(l));
            }
            out.push_back(std::move(e));
        }
    }
    return out;
}

std::vector<Eigen::VectorXd> InputEncoder::encode_row(
    const std::vector<std::string>& cells) const {
    if (cells.size() != schemas.size()) {
        throw ShapeError("encode_row: expected " + std::to_string(schemas.size()) +
                         " cells, got " + std::to_string(cells.size()));
    }
    std::vector<Eigen::VectorXd> out;
    out.reserve(cells.size());
    for (std::size_t l = 0; l < schemas.size(); ++l) {
        const auto& s = schemas[l];
        const auto& cell = cells[l];
        if (s.kind == VarKind::Numerical) {
            double v = 0.0;
            try {
                std::size_t pos = 0;
                v = std::stod(cell, &pos);
                if (pos != cell.size()) {
                    throw std::invalid_argument(cell);
                }
            } catch (const std::exception&) {
                throw InvalidDataError("encode_row: column '" + s.name +
                                       "': cannot parse '" + cell + "'");
            }
            Eigen::VectorXd e(1);
            e(0) = (v - means(static_cast<Eigen::Index>(l))) /
                   stds(static_cast<Eigen::Index>(l));
            out.push_back(std::move(e));
            continue;
        }
        int idx = -1;
        for (std::size_t v = 0; v < s.levels.size(); ++v) {
            if (s.levels[v] == cell) {
                idx = static_cast<int>(v);
                break;
            }
        }
        if (idx < 0) {
            throw UnknownLevelError("encode_row: column '" + s.name +
                                    "': unknown level '" + cell + "'");
        }
        if (s.kind == VarKind::Categorical) {
            Eigen::VectorXd onehot =
                Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.levels.size()));
            onehot(idx) = 1.0;
            out.push_back(std::move(onehot));
        } else {
            const double denom =
                s.levels.size() > 1 ? static_cast<double>(s.levels.size() - 1) : 1.0;
            Eigen::VectorXd e(1);
            e(0) = (idx / denom - means(static_cast<Eigen::Index>(l))) /
                   stds(static_cast<Eigen::Index>(l));
            out.push_back(std::move(e));
        }
    }
    return out;
}

InputEncoder fit_encoder(const DataTable& table,
                         const std::vector<Eigen::Index>& train_rows) {
    if (train_rows.size() < 2) {
        throw InsufficientRowsError("fit_encoder: need at least 2 training rows");
    }
    InputEncoder enc;
    enc.schemas = table.schemas;
    const auto p = static_cast<Eigen::Index>(table.schemas.size());
    enc.means = Eigen::VectorXd::Zero(p);
    enc.stds = Eigen::VectorXd::Ones(p);
    const double n = static_cast<double>(train_rows.size());
    for (Eigen::Index l = 0; l < p; ++l) {
        const auto& s = table.schemas[l];
        if (s.kind == VarKind::Categorical) {
            continue;
        }
        const double denom = s.kind == VarKind::Ordinal && s.levels.size() > 1
                                 ? static_cast<double>(s.levels.size() - 1)
                                 : 1.0;
        double sum = 0.0;
        for (auto r : train_rows) {
            double v = table.columns[l](r);
            if (s.kind == VarKind::Ordinal) {
                v /= denom;
            }
            sum += v;
        }
        const double mean = sum / n;
        double ss = 0.0;
        for (auto r : train_rows) {
            double v = table.columns[l](r);
            if (s.kind == VarKind::Ordinal) {
                v /= denom;
            }
            ss += (v - mean) * (v - mean);
        }
        enc.means(l) = mean;
        enc.stds(l) = std::max(std::sqrt(ss / (n - 1.0)), kStdFloor);
    }
    return enc;
}

Eigen::MatrixXd forward(const TransformStack& stack, const Eigen::VectorXd& theta,
                        const std::vector<Eigen::MatrixXd>& encoded) {
    if (theta.size() != stack.total_params()) {
        throw ShapeError("forward: theta has " + std::to_string(theta.size()) +
                         " parameters, stack expects " +
                         std::to_string(stack.total_params()));
    }
    if (encoded.size() != static_cast<std::size_t>(stack.vars())) {
        throw ShapeError("forward: encoded batch count does not match stack");
    }
    const Eigen::Index m = encoded.empty() ? 0 : encoded[0].rows();
    Eigen::MatrixXd out(m, stack.vars());
    for (int l = 0; l < stack.vars(); ++l) {
        const int in = stack.nets[l].input_width;
        if (encoded[l].cols() != in || encoded[l].rows() != m) {
            throw ShapeError("forward: encoded batch shape mismatch for variable " +
                             std::to_string(l));
        }
        const double* seg = theta.data() + stack.offsets[l];
        RowMajorMap w1(seg, kHiddenUnits, in);
        Eigen::Map<const Eigen::VectorXd> b1(seg + in * kHiddenUnits, kHiddenUnits);
        Eigen::Map<const Eigen::VectorXd> w2(
            seg + in * kHiddenUnits + kHiddenUnits, kHiddenUnits);
        const double b2 = seg[stack.nets[l].param_count() - 1];

        Eigen::MatrixXd h =
            ((encoded[l] * w1.transpose()).rowwise() + b1.transpose()).cwiseMax(0.0);
        out.col(l) = (h * w2).array() + b2;
    }
    return out;
}

LevelCoordinates level_coordinates(const TransformStack& stack,
                                   const Eigen::VectorXd& theta,
                                   const PcaModel& model, const DataTable& table,
                                   const InputEncoder& encoder,
                                   const std::vector<Eigen::Index>& rows, int var) {
    if (var < 0 || var >= stack.vars()) {
        throw ConfigError("level_coordinates: variable index out of range");
    }
    if (stack.schemas[var].kind != VarKind::Categorical) {
        throw UnsupportedSchemaError("level_coordinates: variable '" +
                                     stack.schemas[var].name +
                                     "' is not categorical");
    }
    const auto encoded = encoder.encode(table, rows);
    const Eigen::MatrixXd scores = project(model, forward(stack, theta, encoded));

    const auto& levels = stack.schemas[var].levels;
    LevelCoordinates out;
    for (std::size_t v = 0; v < levels.size(); ++v) {
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(scores.cols());
        int count = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (static_cast<std::size_t>(table.columns[var](rows[i])) == v) {
                sum += scores.row(static_cast<Eigen::Index>(i)).transpose();
                ++count;
            }
        }
        if (count == 0) {
            out.omitted.push_back(levels[v]);
        } else {
            out.levels.push_back(levels[v]);
            out.coords.push_back(sum / count);
        }
    }
    return out;
}

}  // namespace nlpca
