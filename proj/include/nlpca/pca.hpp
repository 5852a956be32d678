#ifndef NLPCA_PCA_HPP
#define NLPCA_PCA_HPP

#include <Eigen/Dense>

#include "nlpca/error.hpp"

namespace nlpca {

// Floor applied to per-column standard deviations so constant columns do not
// divide by zero.
inline constexpr double kStdFloor = 1e-12;

// Per-column centering/scaling fitted on training data. Sample statistics
// (divisor n-1) throughout, so the covariance of standardized training data
// has a unit diagonal exactly.
struct Standardizer {
    Eigen::VectorXd means;
    Eigen::VectorXd stds;

    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
};

Standardizer fit_standardizer(const Eigen::MatrixXd& X);

// Sample covariance (divisor n-1) of an already standardized matrix.
Eigen::MatrixXd covariance(const Eigen::MatrixXd& Xstd);

struct EigenSystem {
    Eigen::VectorXd values;   // descending
    Eigen::MatrixXd vectors;  // rows are eigenvectors, aligned with values
};

// Symmetric eigendecomposition with a deterministic sign convention: the
// largest-magnitude entry of each eigenvector is positive (first such index
// on ties). Input is symmetrized as (S+S^T)/2; asymmetry beyond 1e-10
// throws InvalidDataError.
EigenSystem eig_sym(const Eigen::MatrixXd& S);

struct PcaModel {
    Standardizer standardizer;
    Eigen::VectorXd eigenvalues;  // descending, clamped at 0
    Eigen::MatrixXd loadings;     // rows w_j, orthonormal
    double total_variance = 0.0;  // trace of training covariance
};

// standardize -> covariance -> eig_sym. Eigenvalues in [-1e-10, 0) are
// clamped to 0.
PcaModel fit_pca(const Eigen::MatrixXd& X);

// Scores Z = standardize(X) * W^T. Column variance of training scores equals
// the corresponding eigenvalue.
Eigen::MatrixXd project(const PcaModel& model, const Eigen::MatrixXd& X);

using ContributionMatrix = Eigen::MatrixXd;

// c[j,l] = w_{j,l} * (S w_j)_l: the share of eigenvalue j carried by
// variable l, including its covariance cross-terms. Rows sum to the
// eigenvalues.
ContributionMatrix contributions(const Eigen::MatrixXd& loadings,
                                 const Eigen::MatrixXd& S);

// Sum of the leading k eigenvalues. Requires 1 <= k < p.
double global_objective(const Eigen::VectorXd& eigenvalues, int k);

// Sum of the leading k contributions of variable `var` (0-based).
// Requires 1 <= k < p and 0 <= var < p.
double partial_objective(const ContributionMatrix& contrib, int var, int k);

// Share of validation variance captured by the leading k components:
// standardize with the training statistics, project, and divide the summed
// squared scores of components 1..k by the squared norm of the standardized
// validation matrix. Second moments are taken about the training center, so
// validation == training reproduces the eigenvalue proportions exactly and
// k == p yields 1. Throws on an empty validation set; returns 0 when the
// standardized validation matrix is identically zero.
double explained_variance_validation(const PcaModel& model,
                                     const Eigen::MatrixXd& Xval, int k);

}  // namespace nlpca

#endif
