#ifndef NLPCA_BASELINES_HPP
#define NLPCA_BASELINES_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "nlpca/data.hpp"
#include "nlpca/pca.hpp"

namespace nlpca {

struct KernelSpec {
    enum class Kind { Rbf, Polynomial, Cosine, Sigmoid, Linear };
    Kind kind = Kind::Linear;
    double gamma = 1.0;
    double coef0 = 1.0;
    int degree = 2;

    static KernelSpec rbf(double gamma);
    static KernelSpec polynomial(double gamma, int degree = 2, double coef0 = 1.0);
    static KernelSpec cosine();
    static KernelSpec sigmoid(double gamma, double coef0 = 1.0);
    static KernelSpec linear();

    std::string name() const;
};

// Pairwise kernel values, a x b. Zero-norm rows under the cosine kernel are
// treated as orthogonal to everything.
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Eigen::MatrixXd& A,
                              const Eigen::MatrixXd& B);

struct KpcaModel {
    KernelSpec spec;
    Eigen::MatrixXd train;        // rows used to evaluate validation kernels
    Eigen::VectorXd eigenvalues;  // descending, clamped at 0
    Eigen::MatrixXd alphas;       // rows are unit-norm eigenvectors
    Eigen::VectorXd row_means;    // training-kernel centering statistics
    double overall_mean = 0.0;
    int positive_rank = 0;

    int input_cols() const { return static_cast<int>(train.cols()); }
};

// Double-centers the training kernel and eigendecomposes it.
KpcaModel kpca_fit(const Eigen::MatrixXd& train, const KernelSpec& spec);

// Validation scores on the leading `count` components (unit feature-space
// eigenvector scaling): K~_val * alpha_j / sqrt(mu_j).
Eigen::MatrixXd kpca_transform(const KpcaModel& fit, const Eigen::MatrixXd& val,
                               int count);

// Squared validation scores of the leading k components over those of the
// leading min(p, positive rank) components, second moments about the
// training feature mean. With the linear kernel on standardized data this
// equals the linear-PCA validation proportion exactly. `components_used`
// reports the capped k when it exceeds the positive spectrum.
double kpca_validation_proportion(const KpcaModel& fit, const Eigen::MatrixXd& val,
                                  int k, int* components_used = nullptr);

// Numerical encoding shared by both baselines: numerical columns pass
// through, ordinal ranks map onto [0,1], categorical columns expand to
// one-hot indicators.
Eigen::MatrixXd baseline_matrix(const DataTable& table);

// Linear PCA fitted on the training rows, scored on validation.
double linear_pca_baseline(const DataTable& table, const SplitPair& split, int k);

struct KernelScore {
    std::string name;
    double proportion = 0.0;
    bool ok = false;
};

// Evaluates rbf, polynomial(d=2), cosine and sigmoid with gamma = 1/width
// defaults; returns the best proportion and kernel name (ties resolved in
// that order). A failing kernel is skipped; its slot reports ok=false.
std::pair<double, std::string> best_of_kernels(const DataTable& table,
                                               const SplitPair& split, int k,
                                               std::vector<KernelScore>* scores = nullptr);

}  // namespace nlpca

#endif
