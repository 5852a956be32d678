#ifndef NLPCA_DATA_HPP
#define NLPCA_DATA_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlpca/schema.hpp"

namespace nlpca {

// Column-major table of mixed-typed data. Numerical columns store raw
// values; categorical/ordinal columns store the 0-based level index as a
// double. An optional label column is kept aside and never transformed.
struct DataTable {
    std::vector<VariableSchema> schemas;    // feature columns, file order
    std::vector<Eigen::VectorXd> columns;   // aligned with schemas
    std::optional<std::string> label_name;
    std::vector<std::string> labels;

    Eigen::Index rows() const { return columns.empty() ? 0 : columns[0].size(); }
    int cols() const { return static_cast<int>(columns.size()); }

    // Raw column values as a matrix (level indices for categorical/ordinal).
    Eigen::MatrixXd as_matrix() const;
};

struct SplitPair {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> validation;
};

// Two noisy concentric circles, n/2 points each at radii 1 and `factor`,
// placed at evenly spaced angles before noise.
DataTable gen_circles(int n = 1000, double factor = 0.1, double noise = 0.1,
                      std::uint64_t seed = 0);

// Two noisy concentric spheres sampled with the golden-angle (Fibonacci)
// spiral, n/2 points each.
DataTable gen_spheres(int n = 1000, double radius_outer = 1.0,
                      double radius_inner = 0.1, double noise = 0.1,
                      std::uint64_t seed = 0);

// x1 = s*pi + e with stripe index s uniform on {-4..4} and e ~ N(0, 0.1);
// x2 = e (the same draw), so a periodic transform of x1 correlates
// perfectly with x2.
DataTable gen_stripes(int n = 1000, std::uint64_t seed = 0);

// CSV with header row plus a JSON schema sidecar: a list of
// {"name", "kind", "levels"?, "is_label"?} objects aligned with the header.
DataTable load_table(const std::string& data_path, const std::string& schema_path);

// Uniform shuffle under seed; train takes floor(ratio*n) rows.
SplitPair split(const DataTable& table, double ratio, std::uint64_t seed);

// Rows of `column` selected by `rows`.
Eigen::VectorXd gather(const Eigen::VectorXd& column,
                       const std::vector<Eigen::Index>& rows);
Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m,
                            const std::vector<Eigen::Index>& rows);

}  // namespace nlpca

#endif
