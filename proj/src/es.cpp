#include "nlpca/es.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "nlpca/data.hpp"
#include "nlpca/error.hpp"

namespace nlpca::es {

void validate(const EsConfig& cfg, int p, Eigen::Index n_train) {
    if (cfg.generations < 0) {
        throw ConfigError("es: generations must be >= 0");
    }
    if (cfg.learning_rate <= 0.0 || cfg.noise_std <= 0.0) {
        throw ConfigError("es: learning rate and noise std must be positive");
    }
    if (cfg.population < 2) {
        throw ConfigError("es: population must be at least 2");
    }
    if (cfg.k < 1 || cfg.k >= p) {
        throw ConfigError("es: k must satisfy 1 <= k < p (p=" + std::to_string(p) +
                          ", k=" + std::to_string(cfg.k) + ")");
    }
    if (cfg.batch_size < 2) {
        throw ConfigError("es: batch size must be at least 2");
    }
    if (cfg.batch_size > n_train) {
        throw ConfigError("es: batch size " + std::to_string(cfg.batch_size) +
                          " exceeds training rows " + std::to_string(n_train));
    }
    if (cfg.pca_refresh < 1) {
        throw ConfigError("es: pca refresh interval must be >= 1");
    }
}

Eigen::MatrixXd sample_noise(int population, int dim, Rng& rng) {
    if (population < 2) {
        throw ConfigError("sample_noise: population must be at least 2");
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd noise(population, dim);
    for (int i = 0; i < population; ++i) {
        for (int d = 0; d < dim; ++d) {
            noise(i, d) = gauss(rng);
        }
    }
    return noise;
}

CandidateEval evaluate_candidate(const TransformStack& stack,
                                 const Eigen::VectorXd& theta,
                                 const std::vector<Eigen::MatrixXd>& encoded_batch,
                                 const Eigen::MatrixXd* cached_basis) {
    const Eigen::MatrixXd transformed = forward(stack, theta, encoded_batch);
    const int p = stack.vars();

    CandidateEval out;
    if (!transformed.allFinite()) {
        // Degenerate candidate: zero objective instead of failing.
        out.eigenvalues = Eigen::VectorXd::Zero(p);
        out.contributions = Eigen::MatrixXd::Zero(p, p);
        return out;
    }
    const Standardizer std_fit = fit_standardizer(transformed);
    const Eigen::MatrixXd S = covariance(std_fit.apply(transformed));

    if (cached_basis != nullptr) {
        const Eigen::MatrixXd& W = *cached_basis;
        out.contributions = contributions(W, S);
        out.eigenvalues = out.contributions.rowwise().sum();
    } else {
        EigenSystem es = eig_sym(S);
        out.contributions = contributions(es.vectors, S);
        out.eigenvalues = std::move(es.values);
    }
    return out;
}

namespace {

void eval_one(const TransformStack& stack, const Eigen::VectorXd& theta,
              const Eigen::MatrixXd& noise, double sigma,
              const std::vector<Eigen::MatrixXd>& encoded_batch, int k,
              const Eigen::MatrixXd* cached_basis, int i,
              PopulationObjectives& out) {
    const int p = stack.vars();
    try {
        const Eigen::VectorXd candidate = theta + sigma * noise.row(i).transpose();
        const CandidateEval eval =
            evaluate_candidate(stack, candidate, encoded_batch, cached_basis);
        out.global(i) = eval.eigenvalues.head(k).sum();
        for (int l = 0; l < p; ++l) {
            out.partial(i, l) = eval.contributions.col(l).head(k).sum();
        }
    } catch (const Error&) {
        out.global(i) = std::numeric_limits<double>::quiet_NaN();
        out.partial.row(i).setConstant(std::numeric_limits<double>::quiet_NaN());
    }
}

}  // namespace

PopulationObjectives evaluate_population_serial(
    const TransformStack& stack, const Eigen::VectorXd& theta,
    const Eigen::MatrixXd& noise, double sigma,
    const std::vector<Eigen::MatrixXd>& encoded_batch, int k,
    const Eigen::MatrixXd* cached_basis) {
    const int population = static_cast<int>(noise.rows());
    PopulationObjectives out;
    out.global.resize(population);
    out.partial.resize(population, stack.vars());
    for (int i = 0; i < population; ++i) {
        eval_one(stack, theta, noise, sigma, encoded_batch, k, cached_basis, i, out);
    }
    return out;
}

PopulationObjectives evaluate_population(
    const TransformStack& stack, const Eigen::VectorXd& theta,
    const Eigen::MatrixXd& noise, double sigma,
    const std::vector<Eigen::MatrixXd>& encoded_batch, int k,
    const Eigen::MatrixXd* cached_basis) {
    const int population = static_cast<int>(noise.rows());
    PopulationObjectives out;
    out.global.resize(population);
    out.partial.resize(population, stack.vars());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < population; ++i) {
        eval_one(stack, theta, noise, sigma, encoded_batch, k, cached_basis, i, out);
    }
    return out;
}

Eigen::VectorXd es_step_global(const Eigen::VectorXd& theta,
                               const Eigen::VectorXd& objectives,
                               const Eigen::MatrixXd& noise, const EsConfig& cfg,
                               int p, int* dropped) {
    const int population = static_cast<int>(noise.rows());
    if (objectives.size() != population) {
        throw ShapeError("es_step_global: objective count does not match noise");
    }
    Eigen::VectorXd weights = objectives;
    int bad = 0;
    for (int i = 0; i < population; ++i) {
        if (!std::isfinite(weights(i))) {
            weights(i) = 0.0;
            ++bad;
        }
    }
    if (dropped != nullptr) {
        *dropped += bad;
    }
    if (cfg.subtract_mean && population > bad) {
        const double mean = weights.sum() / (population - bad);
        for (int i = 0; i < population; ++i) {
            if (std::isfinite(objectives(i))) {
                weights(i) -= mean;
            }
        }
    }
    const double scale =
        cfg.learning_rate / (p * cfg.population * cfg.noise_std);
    return theta + scale * (noise.transpose() * weights);
}

Eigen::VectorXd es_step_partial(const Eigen::VectorXd& theta,
                                const Eigen::MatrixXd& objectives,
                                const Eigen::MatrixXd& noise,
                                const TransformStack& stack, const EsConfig& cfg,
                                int* dropped) {
    const int population = static_cast<int>(noise.rows());
    const int p = stack.vars();
    if (objectives.rows() != population || objectives.cols() != p) {
        throw ShapeError("es_step_partial: objective matrix shape mismatch");
    }
    Eigen::VectorXd next = theta;
    const double scale = cfg.learning_rate / (cfg.population * cfg.noise_std);
    for (int l = 0; l < p; ++l) {
        Eigen::VectorXd weights = objectives.col(l);
        int bad = 0;
        for (int i = 0; i < population; ++i) {
            if (!std::isfinite(weights(i))) {
                weights(i) = 0.0;
                ++bad;
            }
        }
        if (dropped != nullptr) {
            *dropped += bad;
        }
        if (cfg.subtract_mean && population > bad) {
            const double mean = weights.sum() / (population - bad);
            for (int i = 0; i < population; ++i) {
                if (std::isfinite(objectives(i, l))) {
                    weights(i) -= mean;
                }
            }
        }
        const int off = stack.offsets[l];
        const int count = stack.nets[l].param_count();
        next.segment(off, count) +=
            scale * (noise.middleCols(off, count).transpose() * weights);
    }
    return next;
}

TrainResult train(const TransformStack& stack, const DataTable& table,
                  const SplitPair& split, const EsConfig& cfg, bool parallel) {
    const int p = stack.vars();
    validate(cfg, p, static_cast<Eigen::Index>(split.train.size()));

    const InputEncoder encoder = fit_encoder(table, split.train);
    const auto enc_train = encoder.encode(table, split.train);
    const auto enc_val = encoder.encode(table, split.validation);

    TrainResult result;
    result.theta = stack.initial_theta;
    if (cfg.generations == 0) {
        return result;
    }

    Rng rng(derive_seed(cfg.seed, 1));
    const int dim = stack.total_params();
    const auto n_train = static_cast<Eigen::Index>(split.train.size());
    std::vector<Eigen::Index> batch_rows(cfg.batch_size);
    std::vector<Eigen::Index> all_rows(n_train);
    std::iota(all_rows.begin(), all_rows.end(), Eigen::Index{0});

    Eigen::MatrixXd cached_basis;
    for (int t = 0; t < cfg.generations; ++t) {
        const auto t0 = std::chrono::steady_clock::now();

        std::sample(all_rows.begin(), all_rows.end(), batch_rows.begin(),
                    cfg.batch_size, rng);
        std::vector<Eigen::MatrixXd> enc_batch;
        enc_batch.reserve(enc_train.size());
        for (const auto& m : enc_train) {
            Eigen::MatrixXd b(cfg.batch_size, m.cols());
            for (int i = 0; i < cfg.batch_size; ++i) {
                b.row(i) = m.row(batch_rows[i]);
            }
            enc_batch.push_back(std::move(b));
        }

        const Eigen::MatrixXd noise = sample_noise(cfg.population, dim, rng);
        const bool use_cache =
            cfg.pca_refresh > 1 && t % cfg.pca_refresh != 0 && cached_basis.size() > 0;
        const PopulationObjectives objs =
            parallel ? evaluate_population(stack, result.theta, noise,
                                           cfg.noise_std, enc_batch, cfg.k,
                                           use_cache ? &cached_basis : nullptr)
                     : evaluate_population_serial(stack, result.theta, noise,
                                                  cfg.noise_std, enc_batch, cfg.k,
                                                  use_cache ? &cached_basis : nullptr);

        if (cfg.objective == ObjectiveMode::Global) {
            result.theta = es_step_global(result.theta, objs.global, noise, cfg, p,
                                          &result.dropped_candidates);
        } else {
            result.theta = es_step_partial(result.theta, objs.partial, noise, stack,
                                           cfg, &result.dropped_candidates);
        }

        // Reporting fit on the full transformed training data.
        const Eigen::MatrixXd transformed_train =
            forward(stack, result.theta, enc_train);
        const PcaModel model = fit_pca(transformed_train);
        const Eigen::MatrixXd transformed_val = forward(stack, result.theta, enc_val);

        GenerationReport report;
        report.generation = t;
        report.train_objective = model.eigenvalues.head(cfg.k).sum();
        report.validation_proportion =
            explained_variance_validation(model, transformed_val, cfg.k);
        report.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        result.history.push_back(report);

        if (cfg.pca_refresh > 1 && t % cfg.pca_refresh == 0) {
            cached_basis = model.loadings;
        }
    }
    return result;
}

}  // namespace nlpca::es
