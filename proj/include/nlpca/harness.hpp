#ifndef NLPCA_HARNESS_HPP
#define NLPCA_HARNESS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlpca/data.hpp"
#include "nlpca/es.hpp"
#include "nlpca/gp.hpp"
#include "nlpca/report.hpp"

namespace nlpca {

struct ExperimentConfig {
    std::string dataset;      // builtin name (circles, spheres, stripes) or CSV path
    std::string schema_path;  // required for CSV datasets
    std::vector<std::string> methods;  // pca, kpca, es-global, es-partial, gp
    int k = 1;
    int repeats = 15;
    std::uint64_t base_seed = 42;
    std::string out_dir;
    es::EsConfig es;
    gp::GpConfig gp;
    bool parallel = true;
};

void validate(const ExperimentConfig& cfg);

struct RunRecord {
    std::string method;
    std::uint64_t seed = 0;
    std::vector<GenerationReport> history;  // empty for pca/kpca
    double final_k1 = 0.0;  // validation proportion at k=1
    double final_k2 = 0.0;  // at min(2,p); 1.0 when p == 2
    std::string kernel;     // kpca only
    std::vector<std::string> expressions;  // gp only
};

// Loads or generates the dataset named by the config.
DataTable resolve_dataset(const ExperimentConfig& cfg);

// One record per (repeat, method); repeat r uses seed base_seed + r for the
// split and for the optimizer.
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg);

struct CurvePoint {
    int generation = 0;
    double median = 0.0;
    double p20 = 0.0;
    double p80 = 0.0;
};

struct MethodSummary {
    std::string method;
    int runs = 0;
    double mean = 0.0;    // of final validation proportions at the target k
    double median = 0.0;
    double p20 = 0.0;
    double p80 = 0.0;
    std::vector<CurvePoint> curve;  // per-generation validation proportion
    bool truncated = false;         // mixed-length histories were cut to the shortest
};

// Nearest-rank percentiles per method and per generation.
std::vector<MethodSummary> aggregate(const std::vector<RunRecord>& records, int k);

// D = 100 * (partial - global) / partial; empty when partial == 0.
std::optional<double> relative_difference(double partial, double global);

// results.json, table.csv, curves.csv and (with gp records) expressions.txt.
// Files are written to a temp name and renamed, so a failure cannot leave a
// truncated file behind.
void emit_outputs(const ExperimentConfig& cfg, const std::vector<RunRecord>& records,
                  const std::vector<MethodSummary>& summaries,
                  const std::string& dir);

}  // namespace nlpca

#endif
