#include "nlpca/baselines.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "nlpca/error.hpp"

namespace nlpca {

KernelSpec KernelSpec::rbf(double gamma) {
    return {Kind::Rbf, gamma, 0.0, 0};
}

KernelSpec KernelSpec::polynomial(double gamma, int degree, double coef0) {
    return {Kind::Polynomial, gamma, coef0, degree};
}

KernelSpec KernelSpec::cosine() {
    return {Kind::Cosine, 0.0, 0.0, 0};
}

KernelSpec KernelSpec::sigmoid(double gamma, double coef0) {
    return {Kind::Sigmoid, gamma, coef0, 0};
}

KernelSpec KernelSpec::linear() {
    return {Kind::Linear, 0.0, 0.0, 0};
}

std::string KernelSpec::name() const {
    switch (kind) {
        case Kind::Rbf: return "rbf";
        case Kind::Polynomial: return "poly";
        case Kind::Cosine: return "cosine";
        case Kind::Sigmoid: return "sigmoid";
        case Kind::Linear: return "linear";
    }
    return "?";
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Eigen::MatrixXd& A,
                              const Eigen::MatrixXd& B) {
    if (A.cols() != B.cols()) {
        throw ShapeError("kernel_matrix: column mismatch");
    }
    const bool needs_gamma = spec.kind == KernelSpec::Kind::Rbf ||
                             spec.kind == KernelSpec::Kind::Polynomial ||
                             spec.kind == KernelSpec::Kind::Sigmoid;
    if (needs_gamma && spec.gamma <= 0.0) {
        throw ConfigError("kernel_matrix: gamma must be positive for " + spec.name());
    }
    switch (spec.kind) {
        case KernelSpec::Kind::Linear:
            return A * B.transpose();
        case KernelSpec::Kind::Rbf: {
            Eigen::VectorXd a2 = A.rowwise().squaredNorm();
            Eigen::VectorXd b2 = B.rowwise().squaredNorm();
            Eigen::MatrixXd d2 = (-2.0 * A * B.transpose());
            d2.colwise() += a2;
            d2.rowwise() += b2.transpose();
            return (-spec.gamma * d2.cwiseMax(0.0)).array().exp();
        }
        case KernelSpec::Kind::Polynomial: {
            Eigen::MatrixXd base =
                (spec.gamma * (A * B.transpose())).array() + spec.coef0;
            Eigen::MatrixXd out = Eigen::MatrixXd::Ones(base.rows(), base.cols());
            for (int d = 0; d < spec.degree; ++d) {
                out = out.cwiseProduct(base);
            }
            return out;
        }
        case KernelSpec::Kind::Sigmoid:
            return ((spec.gamma * (A * B.transpose())).array() + spec.coef0).tanh();
        case KernelSpec::Kind::Cosine: {
            Eigen::VectorXd na = A.rowwise().norm();
            Eigen::VectorXd nb = B.rowwise().norm();
            Eigen::MatrixXd out = A * B.transpose();
            for (Eigen::Index i = 0; i < out.rows(); ++i) {
                for (Eigen::Index j = 0; j < out.cols(); ++j) {
                    const double d = na(i) * nb(j);
                    out(i, j) = d > 0.0 ? out(i, j) / d : 0.0;
                }
            }
            return out;
        }
    }
    throw ConfigError("kernel_matrix: unknown kernel");
}

KpcaModel kpca_fit(const Eigen::MatrixXd& train, const KernelSpec& spec) {
    if (train.rows() < 2) {
        throw InsufficientRowsError("kpca_fit: need at least 2 rows");
    }
    KpcaModel model;
    model.spec = spec;
    model.train = train;

    Eigen::MatrixXd K = kernel_matrix(spec, train, train);
    model.row_means = K.rowwise().mean();
    model.overall_mean = K.mean();
    Eigen::MatrixXd centered = K;
    centered.colwise() -= model.row_means;
    centered.rowwise() -= model.row_means.transpose();
    centered.array() += model.overall_mean;

    EigenSystem es = eig_sym(centered);
    model.eigenvalues = es.values.cwiseMax(0.0);
    model.alphas = std::move(es.vectors);
    const double top = model.eigenvalues.size() > 0 ? model.eigenvalues(0) : 0.0;
    model.positive_rank = 0;
    for (Eigen::Index j = 0; j < model.eigenvalues.size(); ++j) {
        if (model.eigenvalues(j) > top * 1e-12 && model.eigenvalues(j) > 0.0) {
            ++model.positive_rank;
        }
    }
    return model;
}

Eigen::MatrixXd kpca_transform(const KpcaModel& fit, const Eigen::MatrixXd& val,
                               int count) {
    if (count < 1 || count > fit.positive_rank) {
        throw ConfigError("kpca_transform: component count out of range");
    }
    Eigen::MatrixXd Kv = kernel_matrix(fit.spec, val, fit.train);
    Eigen::VectorXd val_row_means = Kv.rowwise().mean();
    Kv.colwise() -= val_row_means;
    Kv.rowwise() -= fit.row_means.transpose();
    Kv.array() += fit.overall_mean;

    Eigen::MatrixXd scores(val.rows(), count);
    for (int j = 0; j < count; ++j) {
        scores.col(j) =
            Kv * fit.alphas.row(j).transpose() / std::sqrt(fit.eigenvalues(j));
    }
    return scores;
}

double kpca_validation_proportion(const KpcaModel& fit, const Eigen::MatrixXd& val,
                                  int k, int* components_used) {
    if (val.rows() < 1) {
        throw InsufficientRowsError("kpca_validation_proportion: empty validation");
    }
    if (k < 1) {
        throw ConfigError("kpca_validation_proportion: k must be >= 1");
    }
    const int denom_count = std::min(fit.input_cols(), fit.positive_rank);
    if (denom_count == 0) {
        return 0.0;
    }
    const int k_use = std::min(k, denom_count);
    if (components_used != nullptr) {
        *components_used = k_use;
    }
    const Eigen::MatrixXd scores = kpca_transform(fit, val, denom_count);
    const double denom = scores.squaredNorm();
    if (denom <= 0.0) {
        return 0.0;
    }
    return scores.leftCols(k_use).squaredNorm() / denom;
}

Eigen::MatrixXd baseline_matrix(const DataTable& table) {
    int width = 0;
    for (const auto& s : table.schemas) {
        width += s.kind == VarKind::Categorical ? static_cast<int>(s.levels.size()) : 1;
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(table.rows(), width);
    int col = 0;
    for (int j = 0; j < table.cols(); ++j) {
        const auto& s = table.schemas[j];
        if (s.kind == VarKind::Categorical) {
            for (Eigen::Index i = 0; i < table.rows(); ++i) {
                out(i, col + static_cast<int>(table.columns[j](i))) = 1.0;
            }
            col += static_cast<int>(s.levels.size());
        } else if (s.kind == VarKind::Ordinal) {
            const double denom =
                s.levels.size() > 1 ? static_cast<double>(s.levels.size() - 1) : 1.0;
            out.col(col++) = table.columns[j] / denom;
        } else {
            out.col(col++) = table.columns[j];
        }
    }
    return out;
}

double linear_pca_baseline(const DataTable& table, const SplitPair& split, int k) {
    const Eigen::MatrixXd X = baseline_matrix(table);
    const Eigen::MatrixXd Xtr = gather_rows(X, split.train);
    const Eigen::MatrixXd Xval = gather_rows(X, split.validation);
    const PcaModel model = fit_pca(Xtr);
    return explained_variance_validation(model, Xval, k);
}

std::pair<double, std::string> best_of_kernels(const DataTable& table,
                                               const SplitPair& split, int k,
                                               std::vector<KernelScore>* scores) {
    const Eigen::MatrixXd X = baseline_matrix(table);
    const Eigen::MatrixXd Xtr_raw = gather_rows(X, split.train);
    const Eigen::MatrixXd Xval_raw = gather_rows(X, split.validation);
    const Standardizer std_fit = fit_standardizer(Xtr_raw);
    const Eigen::MatrixXd Xtr = std_fit.apply(Xtr_raw);
    const Eigen::MatrixXd Xval = std_fit.apply(Xval_raw);

    const double gamma = 1.0 / static_cast<double>(X.cols());
    const KernelSpec specs[] = {
        KernelSpec::rbf(gamma),
        KernelSpec::polynomial(gamma, 2, 1.0),
        KernelSpec::cosine(),
        KernelSpec::sigmoid(gamma, 1.0),
    };

    double best = -1.0;
    std::string best_name;
    for (const auto& spec : specs) {
        KernelScore score;
        score.name = spec.name();
        try {
            const KpcaModel fit = kpca_fit(Xtr, spec);
            score.proportion = kpca_validation_proportion(fit, Xval, k);
            score.ok = true;
            if (score.proportion > best) {
                best = score.proportion;
                best_name = score.name;
            }
        } catch (const Error&) {
            score.ok = false;  // skipped, reported via scores
        }
        if (scores != nullptr) {
            scores->push_back(score);
        }
    }
    if (best_name.empty()) {
        throw InvalidDataError("best_of_kernels: every kernel failed");
    }
    return {best, best_name};
}

}  // namespace nlpca
