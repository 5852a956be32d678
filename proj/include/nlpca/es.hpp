#ifndef NLPCA_ES_HPP
#define NLPCA_ES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "nlpca/pca.hpp"
#include "nlpca/report.hpp"
#include "nlpca/rng.hpp"
#include "nlpca/transforms.hpp"

namespace nlpca::es {

using nlpca::GenerationReport;

enum class ObjectiveMode { Global, Partial };

struct EsConfig {
    int generations = 100;
    double learning_rate = 1e-2;
    double noise_std = 1e-2;
    int population = 200;
    int k = 1;
    int batch_size = 128;
    ObjectiveMode objective = ObjectiveMode::Global;
    int pca_refresh = 1;  // full eigendecomposition every m-th generation
    std::uint64_t seed = 0;
    bool subtract_mean = false;  // baseline subtraction in the update, off by default
};

// Throws ConfigError on non-positive fields, k >= p, or batch_size > n_train.
void validate(const EsConfig& cfg, int p, Eigen::Index n_train);

// population x dim standard-normal perturbations, drawn serially so parallel
// candidate scheduling cannot change results.
Eigen::MatrixXd sample_noise(int population, int dim, Rng& rng);

struct CandidateEval {
    Eigen::VectorXd eigenvalues;
    ContributionMatrix contributions;  // p x p, rows sum to the eigenvalues
};

// Transforms the minibatch with theta and fits PCA on it. With a cached
// basis the eigendecomposition is skipped: eigenvalue estimates become the
// Rayleigh quotients w_j S w_j^T of the cached loadings and contributions
// are computed against them.
CandidateEval evaluate_candidate(const TransformStack& stack,
                                 const Eigen::VectorXd& theta,
                                 const std::vector<Eigen::MatrixXd>& encoded_batch,
                                 const Eigen::MatrixXd* cached_basis = nullptr);

struct PopulationObjectives {
    Eigen::VectorXd global;   // size P; NaN marks a failed candidate
    Eigen::MatrixXd partial;  // P x p
};

// Objective values for all P perturbed candidates theta + sigma * noise_i.
PopulationObjectives evaluate_population_serial(
    const TransformStack& stack, const Eigen::VectorXd& theta,
    const Eigen::MatrixXd& noise, double sigma,
    const std::vector<Eigen::MatrixXd>& encoded_batch, int k,
    const Eigen::MatrixXd* cached_basis = nullptr);

// OpenMP version; candidates are independent and write to private slots, so
// the result is bitwise identical to the serial reference.
PopulationObjectives evaluate_population(
    const TransformStack& stack, const Eigen::VectorXd& theta,
    const Eigen::MatrixXd& noise, double sigma,
    const std::vector<Eigen::MatrixXd>& encoded_batch, int k,
    const Eigen::MatrixXd* cached_basis = nullptr);

// theta' = theta + alpha/(p*P*sigma) * sum_i F_i eps_i. Non-finite F_i are
// dropped from the sum; *dropped counts them.
Eigen::VectorXd es_step_global(const Eigen::VectorXd& theta,
                               const Eigen::VectorXd& objectives,
                               const Eigen::MatrixXd& noise, const EsConfig& cfg,
                               int p, int* dropped = nullptr);

// Per-variable updates sharing one noise set: segment l moves by
// alpha/(P*sigma) * sum_i F_{l,i} eps_i[segment l]. No 1/p factor — each
// per-variable objective is already roughly 1/p of the global one.
Eigen::VectorXd es_step_partial(const Eigen::VectorXd& theta,
                                const Eigen::MatrixXd& objectives,
                                const Eigen::MatrixXd& noise,
                                const TransformStack& stack, const EsConfig& cfg,
                                int* dropped = nullptr);

struct TrainResult {
    Eigen::VectorXd theta;
    std::vector<GenerationReport> history;
    int dropped_candidates = 0;
};

// Algorithm: per generation, draw one minibatch shared by all candidates,
// pre-draw the noise, evaluate the population, step, then refit PCA on the
// full transformed training data for reporting. Deterministic under
// (seed, data, cfg).
TrainResult train(const TransformStack& stack, const DataTable& table,
                  const SplitPair& split, const EsConfig& cfg,
                  bool parallel = true);

}  // namespace nlpca::es

#endif
