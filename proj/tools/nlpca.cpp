#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlpca/error.hpp"
#include "nlpca/harness.hpp"

namespace {

int run_command(nlpca::ExperimentConfig cfg, const std::string& objective) {
    // "es" picks its objective from --objective; explicit method names win.
    for (auto& m : cfg.methods) {
        if (m == "es") {
            m = objective == "partial" ? "es-partial" : "es-global";
        }
    }
    nlpca::validate(cfg);

    const auto records = nlpca::run_experiment(cfg);
    const auto summaries = nlpca::aggregate(records, cfg.k);
    if (!cfg.out_dir.empty()) {
        nlpca::emit_outputs(cfg, records, summaries, cfg.out_dir);
    }

    std::printf("%-12s %5s %10s %10s %10s %10s\n", "method", "runs", "mean",
                "median", "p20", "p80");
    for (const auto& s : summaries) {
        std::printf("%-12s %5d %10.4f %10.4f %10.4f %10.4f\n", s.method.c_str(),
                    s.runs, s.mean, s.median, s.p20, s.p80);
    }
    const auto find = [&](const std::string& name) -> const nlpca::MethodSummary* {
        for (const auto& s : summaries) {
            if (s.method == name) {
                return &s;
            }
        }
        return nullptr;
    };
    const auto* partial = find("es-partial");
    const auto* global = find("es-global");
    if (partial != nullptr && global != nullptr) {
        if (auto d = nlpca::relative_difference(partial->mean, global->mean)) {
            std::printf("relative difference D = %.2f%%\n", *d);
        }
    }
    if (!cfg.out_dir.empty()) {
        std::printf("outputs written to %s\n", cfg.out_dir.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-linear PCA benchmark harness"};
    app.set_config("--config", "",
                   "key=value config file with a [run] section; CLI flags override");
    app.require_subcommand(1);

    nlpca::ExperimentConfig cfg;
    std::string objective = "global";
    std::string method_csv = "pca";

    CLI::App* run = app.add_subcommand("run", "run an experiment");
    run->add_option("--dataset", cfg.dataset,
                    "builtin name (circles|spheres|stripes) or CSV path")
        ->required();
    run->add_option("--schema", cfg.schema_path, "JSON schema sidecar for CSV data");
    run->add_option("--method", method_csv,
                    "comma list of pca,kpca,es-global,es-partial,gp (or es)");
    run->add_option("--k", cfg.k, "number of leading components to optimize/report");
    run->add_option("--repeats", cfg.repeats, "seeded repetitions");
    run->add_option("--seed", cfg.base_seed, "base seed; repeat r uses seed+r");
    run->add_option("--generations", cfg.es.generations,
                    "generations for es/gp methods");
    run->add_option("--population", cfg.es.population, "population for es/gp");
    run->add_option("--sigma", cfg.es.noise_std, "es perturbation std");
    run->add_option("--alpha", cfg.es.learning_rate, "es learning rate");
    run->add_option("--batch-size", cfg.es.batch_size, "es minibatch size");
    run->add_option("--pca-refresh", cfg.es.pca_refresh,
                    "full eigendecomposition every m-th generation");
    run->add_option("--objective", objective, "global|partial for the 'es' method")
        ->check(CLI::IsMember({"global", "partial"}));
    run->add_flag("--subtract-mean", cfg.es.subtract_mean,
                  "subtract the population mean objective in the es update");
    run->add_option("--out", cfg.out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        // --generations/--population apply to whichever iterative method runs
        if (run->count("--generations") > 0) {
            cfg.gp.generations = cfg.es.generations;
        }
        if (run->count("--population") > 0) {
            cfg.gp.population = cfg.es.population;
        }
        cfg.methods.clear();
        std::string item;
        for (char c : method_csv + ",") {
            if (c == ',') {
                if (!item.empty()) {
                    cfg.methods.push_back(item);
                }
                item.clear();
            } else {
                item += c;
            }
        }
        return run_command(std::move(cfg), objective);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
