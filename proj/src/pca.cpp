#include "nlpca/pca.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace nlpca {

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& X) const {
    if (X.cols() != means.size()) {
        throw ShapeError("standardizer: expected " + std::to_string(means.size()) +
                         " columns, got " + std::to_string(X.cols()));
    }
    return (X.rowwise() - means.transpose()).array().rowwise() /
           stds.transpose().array();
}

Standardizer fit_standardizer(const Eigen::MatrixXd& X) {
    if (X.rows() < 2) {
        throw InsufficientRowsError("fit_standardizer: need at least 2 rows, got " +
                                    std::to_string(X.rows()));
    }
    if (!X.allFinite()) {
        throw InvalidDataError("fit_standardizer: input contains non-finite values");
    }
    const double n = static_cast<double>(X.rows());
    Standardizer s;
    s.means = X.colwise().mean();
    Eigen::MatrixXd centered = X.rowwise() - s.means.transpose();
    s.stds = (centered.colwise().squaredNorm() / (n - 1.0)).cwiseSqrt();
    s.stds = s.stds.cwiseMax(kStdFloor);
    return s;
}

Eigen::MatrixXd covariance(const Eigen::MatrixXd& Xstd) {
    if (Xstd.rows() < 2) {
        throw InsufficientRowsError("covariance: need at least 2 rows, got " +
                                    std::to_string(Xstd.rows()));
    }
    const double n = static_cast<double>(Xstd.rows());
    Eigen::MatrixXd centered = Xstd.rowwise() - Xstd.colwise().mean();
    return centered.transpose() * centered / (n - 1.0);
}

EigenSystem eig_sym(const Eigen::MatrixXd& S) {
    if (S.rows() != S.cols()) {
        throw ShapeError("eig_sym: matrix is not square");
    }
    const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
    if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw InvalidDataError("eig_sym: matrix is not symmetric within tolerance");
    }
    Eigen::MatrixXd sym = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw InvalidDataError("eig_sym: eigendecomposition failed");
    }

    const Eigen::Index p = S.rows();
    EigenSystem out;
    out.values.resize(p);
    out.vectors.resize(p, p);
    // Eigen returns ascending order; flip to descending.
    for (Eigen::Index j = 0; j < p; ++j) {
        out.values(j) = solver.eigenvalues()(p - 1 - j);
        out.vectors.row(j) = solver.eigenvectors().col(p - 1 - j).transpose();
    }
    // Sign convention: largest-magnitude entry positive, first index on ties.
    for (Eigen::Index j = 0; j < p; ++j) {
        Eigen::Index arg = 0;
        double best = 0.0;
        for (Eigen::Index l = 0; l < p; ++l) {
            const double a = std::abs(out.vectors(j, l));
            if (a > best) {
                best = a;
                arg = l;
            }
        }
        if (out.vectors(j, arg) < 0.0) {
            out.vectors.row(j) = -out.vectors.row(j);
        }
    }
    return out;
}

PcaModel fit_pca(const Eigen::MatrixXd& X) {
    PcaModel model;
    model.standardizer = fit_standardizer(X);
    Eigen::MatrixXd Xstd = model.standardizer.apply(X);
    Eigen::MatrixXd S = covariance(Xstd);
    model.total_variance = S.trace();
    EigenSystem es = eig_sym(S);
    for (Eigen::Index j = 0; j < es.values.size(); ++j) {
        if (es.values(j) < 0.0 && es.values(j) >= -1e-10) {
            es.values(j) = 0.0;
        }
    }
    model.eigenvalues = std::move(es.values);
    model.loadings = std::move(es.vectors);
    return model;
}

Eigen::MatrixXd project(const PcaModel& model, const Eigen::MatrixXd& X) {
    if (X.cols() != model.loadings.cols()) {
        throw ShapeError("project: expected " + std::to_string(model.loadings.cols()) +
                         " columns, got " + std::to_string(X.cols()));
    }
    return model.standardizer.apply(X) * model.loadings.transpose();
}

ContributionMatrix contributions(const Eigen::MatrixXd& loadings,
                                 const Eigen::MatrixXd& S) {
    if (loadings.cols() != S.rows() || S.rows() != S.cols()) {
        throw ShapeError("contributions: loadings/covariance shape mismatch");
    }
    return loadings.cwiseProduct(loadings * S);
}

double global_objective(const Eigen::VectorXd& eigenvalues, int k) {
    const int p = static_cast<int>(eigenvalues.size());
    if (k < 1 || k >= p) {
        throw ConfigError("global_objective: k must satisfy 1 <= k < p, got k=" +
                          std::to_string(k) + " with p=" + std::to_string(p));
    }
    return eigenvalues.head(k).sum();
}

double partial_objective(const ContributionMatrix& contrib, int var, int k) {
    const int p = static_cast<int>(contrib.cols());
    if (k < 1 || k >= p) {
        throw ConfigError("partial_objective: k must satisfy 1 <= k < p, got k=" +
                          std::to_string(k) + " with p=" + std::to_string(p));
    }
    if (var < 0 || var >= p) {
        throw ConfigError("partial_objective: variable index out of range");
    }
    return contrib.col(var).head(k).sum();
}

double explained_variance_validation(const PcaModel& model,
                                     const Eigen::MatrixXd& Xval, int k) {
    if (Xval.rows() < 1) {
        throw InsufficientRowsError(
            "explained_variance_validation: empty validation set");
    }
    const int p = static_cast<int>(model.loadings.cols());
    if (k < 1 || k > p) {
        throw ConfigError("explained_variance_validation: k out of range");
    }
    Eigen::MatrixXd Xstd = model.standardizer.apply(Xval);
    Eigen::MatrixXd Z = Xstd * model.loadings.transpose();
    const double denom = Xstd.squaredNorm();
    if (denom <= 0.0) {
        return 0.0;
    }
    return Z.leftCols(k).squaredNorm() / denom;
}

}  // namespace nlpca
