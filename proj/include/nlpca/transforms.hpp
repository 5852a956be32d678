#ifndef NLPCA_TRANSFORMS_HPP
#define NLPCA_TRANSFORMS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "nlpca/data.hpp"
#include "nlpca/pca.hpp"
#include "nlpca/schema.hpp"

namespace nlpca {

inline constexpr int kHiddenUnits = 64;

// One scalar-output network per variable: input width 1 for
// numerical/ordinal columns, |levels| for categorical (one-hot input).
// Single hidden layer of 64 rectified-linear units.
struct TransformNet {
    int input_width = 1;

    int param_count() const {
        return input_width * kHiddenUnits + kHiddenUnits + kHiddenUnits + 1;
    }
};

// Layout of all nets over one flat parameter vector. Segment l covers
// [offsets[l], offsets[l+1]); net l reads only variable l's encoding.
struct TransformStack {
    std::vector<VariableSchema> schemas;
    std::vector<TransformNet> nets;
    std::vector<int> offsets;        // size p+1
    Eigen::VectorXd initial_theta;   // seeded N(0, 1/fan_in) weights, zero biases

    int vars() const { return static_cast<int>(nets.size()); }
    int total_params() const { return offsets.back(); }
    Eigen::VectorXd segment(const Eigen::VectorXd& theta, int var) const {
        return theta.segment(offsets[var], nets[var].param_count());
    }
};

TransformStack build_stack(const std::vector<VariableSchema>& schemas,
                           std::uint64_t seed);

// Per-variable input encoding fitted on training rows: numerical values are
// standardized with training statistics, ordinal ranks are mapped uniformly
// onto [0,1] and then standardized, categorical values become one-hot
// vectors.
struct InputEncoder {
    std::vector<VariableSchema> schemas;
    Eigen::VectorXd means;  // per variable; unused for categorical
    Eigen::VectorXd stds;

    int input_width(int var) const;

    // Encoded design matrices, one per variable, rows in the given order.
    std::vector<Eigen::MatrixXd> encode(const DataTable& table,
                                        const std::vector<Eigen::Index>& rows) const;

    // Encode one raw row (string cells, feature columns only). Throws
    // UnknownLevelError naming the column and value on an unseen level.
    std::vector<Eigen::VectorXd> encode_row(const std::vector<std::string>& cells) const;
};

InputEncoder fit_encoder(const DataTable& table,
                         const std::vector<Eigen::Index>& train_rows);

// Applies every net to its encoded batch; returns the m x p transformed
// matrix. Throws ShapeError when theta does not match the stack.
Eigen::MatrixXd forward(const TransformStack& stack, const Eigen::VectorXd& theta,
                        const std::vector<Eigen::MatrixXd>& encoded);

// Mean projected score of the rows carrying each level of a categorical
// variable. Levels absent from `rows` are listed in `omitted`.
struct LevelCoordinates {
    std::vector<std::string> levels;
    std::vector<Eigen::VectorXd> coords;
    std::vector<std::string> omitted;
};

LevelCoordinates level_coordinates(const TransformStack& stack,
                                   const Eigen::VectorXd& theta,
                                   const PcaModel& model, const DataTable& table,
                                   const InputEncoder& encoder,
                                   const std::vector<Eigen::Index>& rows, int var);

}  // namespace nlpca

#endif
