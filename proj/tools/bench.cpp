// Compares the serial reference population evaluators against the OpenMP
// kernels and checks that both produce bitwise-identical objectives.
#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nlpca/data.hpp"
#include "nlpca/es.hpp"
#include "nlpca/gp.hpp"
#include "nlpca/transforms.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void bench_es(int threads) {
    using namespace nlpca;
    const DataTable table = gen_spheres(1000, 1.0, 0.1, 0.1, 7);
    const SplitPair sp = split(table, 0.75, 7);
    const TransformStack stack = build_stack(table.schemas, 7);
    const InputEncoder enc = fit_encoder(table, sp.train);

    es::EsConfig cfg;
    cfg.seed = 7;
    Rng rng(derive_seed(cfg.seed, 1));
    std::vector<Eigen::Index> batch(sp.train.begin(),
                                    sp.train.begin() + cfg.batch_size);
    std::vector<Eigen::Index> local(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        local[i] = static_cast<Eigen::Index>(i);
    }
    const auto enc_all = enc.encode(table, sp.train);
    std::vector<Eigen::MatrixXd> enc_batch;
    for (const auto& m : enc_all) {
        enc_batch.push_back(m.topRows(cfg.batch_size));
    }
    const Eigen::MatrixXd noise =
        es::sample_noise(cfg.population, stack.total_params(), rng);

    auto t0 = Clock::now();
    const auto serial = es::evaluate_population_serial(
        stack, stack.initial_theta, noise, cfg.noise_std, enc_batch, cfg.k);
    const double t_serial = seconds_since(t0);

#ifdef _OPENMP
    omp_set_num_threads(threads);
#endif
    t0 = Clock::now();
    const auto parallel = es::evaluate_population(
        stack, stack.initial_theta, noise, cfg.noise_std, enc_batch, cfg.k);
    const double t_parallel = seconds_since(t0);

    const bool identical = serial.global == parallel.global &&
                           serial.partial == parallel.partial;
    std::printf("es  population=%d threads=%d serial=%.3fs parallel=%.3fs "
                "speedup=%.2fx identical=%s\n",
                cfg.population, threads, t_serial, t_parallel,
                t_serial / t_parallel, identical ? "yes" : "NO");
}

void bench_gp(int threads) {
    using namespace nlpca;
    const DataTable table = gen_stripes(1000, 7);
    const SplitPair sp = split(table, 0.75, 7);

    gp::GpConfig cfg;
    cfg.population = 500;
    cfg.generations = 3;
    cfg.seed = 7;

    auto t0 = Clock::now();
    const auto serial = gp::evolve(table, sp, cfg, 1, false);
    const double t_serial = seconds_since(t0);

#ifdef _OPENMP
    omp_set_num_threads(threads);
#endif
    t0 = Clock::now();
    const auto parallel = gp::evolve(table, sp, cfg, 1, true);
    const double t_parallel = seconds_since(t0);

    const bool identical =
        serial.best.global_fitness == parallel.best.global_fitness &&
        serial.expressions == parallel.expressions;
    std::printf("gp  population=%d threads=%d serial=%.3fs parallel=%.3fs "
                "speedup=%.2fx identical=%s\n",
                cfg.population, threads, t_serial, t_parallel,
                t_serial / t_parallel, identical ? "yes" : "NO");
}

}  // namespace

int main() {
#ifdef _OPENMP
    const int max_threads = omp_get_max_threads();
#else
    const int max_threads = 1;
    std::printf("built without OpenMP; parallel path == serial path\n");
#endif
    for (int threads = 1; threads <= max_threads; threads *= 2) {
        bench_es(threads);
    }
    for (int threads = 1; threads <= max_threads; threads *= 2) {
        bench_gp(threads);
    }
    return 0;
}
