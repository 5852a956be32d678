#include "nlpca/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "json.hpp"
#include "nlpca/baselines.hpp"
#include "nlpca/error.hpp"
#include "nlpca/transforms.hpp"

namespace nlpca {

namespace {

const std::set<std::string> kMethods = {"pca", "kpca", "es-global", "es-partial",
                                        "gp"};

std::string joined_methods() {
    std::string out;
    for (const auto& m : kMethods) {
        out += out.empty() ? m : ", " + m;
    }
    return out;
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
    if (cfg.dataset.empty()) {
        throw ConfigError("experiment: dataset is required");
    }
    if (cfg.methods.empty()) {
        throw ConfigError("experiment: method list is empty; valid methods: " +
                          joined_methods());
    }
    for (const auto& m : cfg.methods) {
        if (kMethods.count(m) == 0) {
            throw ConfigError("experiment: unknown method '" + m +
                              "'; valid methods: " + joined_methods());
        }
    }
    if (cfg.repeats < 1) {
        throw ConfigError("experiment: repeats must be >= 1");
    }
    if (cfg.k < 1) {
        throw ConfigError("experiment: k must be >= 1");
    }
}

DataTable resolve_dataset(const ExperimentConfig& cfg) {
    if (cfg.dataset == "circles") {
        return gen_circles(1000, 0.1, 0.1, cfg.base_seed);
    }
    if (cfg.dataset == "spheres") {
        return gen_spheres(1000, 1.0, 0.1, 0.1, cfg.base_seed);
    }
    if (cfg.dataset == "stripes") {
        return gen_stripes(1000, cfg.base_seed);
    }
    if (cfg.schema_path.empty()) {
        throw ConfigError("experiment: file datasets need --schema");
    }
    return load_table(cfg.dataset, cfg.schema_path);
}

namespace {

double final_proportion(const PcaModel& model, const Eigen::MatrixXd& val, int k) {
    return explained_variance_validation(model, val, k);
}

RunRecord run_es(const ExperimentConfig& cfg, const DataTable& table,
                 const SplitPair& sp, std::uint64_t seed, bool partial_mode) {
    RunRecord rec;
    rec.method = partial_mode ? "es-partial" : "es-global";
    rec.seed = seed;

    TransformStack stack = build_stack(table.schemas, seed);
    es::EsConfig ec = cfg.es;
    ec.seed = seed;
    ec.k = cfg.k;
    ec.objective = partial_mode ? es::ObjectiveMode::Partial
                                : es::ObjectiveMode::Global;
    const es::TrainResult result = es::train(stack, table, sp, ec, cfg.parallel);
    rec.history = result.history;

    const InputEncoder encoder = fit_encoder(table, sp.train);
    const Eigen::MatrixXd train_t =
        forward(stack, result.theta, encoder.encode(table, sp.train));
    const Eigen::MatrixXd val_t =
        forward(stack, result.theta, encoder.encode(table, sp.validation));
    const PcaModel model = fit_pca(train_t);
    rec.final_k1 = final_proportion(model, val_t, 1);
    rec.final_k2 = final_proportion(model, val_t, std::min(2, table.cols()));
    return rec;
}

RunRecord run_gp(const ExperimentConfig& cfg, const DataTable& table,
                 const SplitPair& sp, std::uint64_t seed) {
    RunRecord rec;
    rec.method = "gp";
    rec.seed = seed;

    gp::GpConfig gc = cfg.gp;
    gc.seed = seed;
    const gp::EvolveResult result = gp::evolve(table, sp, gc, cfg.k, cfg.parallel);
    rec.history = result.history;
    rec.expressions = result.expressions;

    const int p = table.cols();
    Eigen::MatrixXd train_t(static_cast<Eigen::Index>(sp.train.size()), p);
    Eigen::MatrixXd val_t(static_cast<Eigen::Index>(sp.validation.size()), p);
    for (int l = 0; l < p; ++l) {
        train_t.col(l) =
            gp::eval_tree(*result.best.trees[l], gather(table.columns[l], sp.train));
        val_t.col(l) = gp::eval_tree(*result.best.trees[l],
                                     gather(table.columns[l], sp.validation));
    }
    const PcaModel model = fit_pca(train_t);
    rec.final_k1 = final_proportion(model, val_t, 1);
    rec.final_k2 = final_proportion(model, val_t, std::min(2, p));
    return rec;
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    const DataTable table = resolve_dataset(cfg);

    std::vector<RunRecord> records;
    for (int r = 0; r < cfg.repeats; ++r) {
        const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(r);
        const SplitPair sp = split(table, 0.75, seed);
        for (const auto& method : cfg.methods) {
            if (method == "pca") {
                RunRecord rec;
                rec.method = method;
                rec.seed = seed;
                rec.final_k1 = linear_pca_baseline(table, sp, 1);
                rec.final_k2 =
                    linear_pca_baseline(table, sp, std::min(2, table.cols()));
                records.push_back(std::move(rec));
            } else if (method == "kpca") {
                RunRecord rec;
                rec.method = method;
                rec.seed = seed;
                std::vector<KernelScore> scores;
                auto [best, name] = best_of_kernels(table, sp, cfg.k, &scores);
                rec.kernel = name;
                // Both finals come from the kernel chosen at the target k.
                const Eigen::MatrixXd X = baseline_matrix(table);
                const Eigen::MatrixXd Xtr_raw = gather_rows(X, sp.train);
                const Standardizer sfit = fit_standardizer(Xtr_raw);
                const Eigen::MatrixXd Xtr = sfit.apply(Xtr_raw);
                const Eigen::MatrixXd Xval =
                    sfit.apply(gather_rows(X, sp.validation));
                const double gamma = 1.0 / static_cast<double>(X.cols());
                KernelSpec spec = KernelSpec::rbf(gamma);
                if (name == "poly") {
                    spec = KernelSpec::polynomial(gamma, 2, 1.0);
                } else if (name == "cosine") {
                    spec = KernelSpec::cosine();
                } else if (name == "sigmoid") {
                    spec = KernelSpec::sigmoid(gamma, 1.0);
                }
                const KpcaModel fit = kpca_fit(Xtr, spec);
                rec.final_k1 = kpca_validation_proportion(fit, Xval, 1);
                rec.final_k2 = kpca_validation_proportion(fit, Xval, 2);
                records.push_back(std::move(rec));
            } else if (method == "es-global") {
                records.push_back(run_es(cfg, table, sp, seed, false));
            } else if (method == "es-partial") {
                records.push_back(run_es(cfg, table, sp, seed, true));
            } else {  // gp
                records.push_back(run_gp(cfg, table, sp, seed));
            }
        }
    }
    return records;
}

namespace {

double nearest_rank(std::vector<double> values, double percentile) {
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * n));
    rank = std::max<std::size_t>(rank, 1);
    return values[rank - 1];
}

}  // namespace

std::vector<MethodSummary> aggregate(const std::vector<RunRecord>& records, int k) {
    if (records.empty()) {
        throw ConfigError("aggregate: no records");
    }
    std::vector<std::string> order;
    for (const auto& r : records) {
        if (std::find(order.begin(), order.end(), r.method) == order.end()) {
            order.push_back(r.method);
        }
    }
    std::vector<MethodSummary> out;
    for (const auto& method : order) {
        MethodSummary s;
        s.method = method;
        std::vector<double> finals;
        std::vector<const RunRecord*> members;
        for (const auto& r : records) {
            if (r.method == method) {
                members.push_back(&r);
                finals.push_back(k >= 2 ? r.final_k2 : r.final_k1);
            }
        }
        s.runs = static_cast<int>(finals.size());
        s.mean = 0.0;
        for (double v : finals) {
            s.mean += v;
        }
        s.mean /= s.runs;
        s.median = nearest_rank(finals, 50.0);
        s.p20 = nearest_rank(finals, 20.0);
        s.p80 = nearest_rank(finals, 80.0);

        std::size_t gens = std::numeric_limits<std::size_t>::max();
        bool any_history = false;
        for (const auto* r : members) {
            if (!r->history.empty()) {
                any_history = true;
                gens = std::min(gens, r->history.size());
            } else {
                gens = 0;
            }
        }
        if (any_history && gens > 0) {
            for (const auto* r : members) {
                if (r->history.size() > gens) {
                    s.truncated = true;
                }
            }
            for (std::size_t g = 0; g < gens; ++g) {
                std::vector<double> vals;
                for (const auto* r : members) {
                    vals.push_back(r->history[g].validation_proportion);
                }
                CurvePoint pt;
                pt.generation = static_cast<int>(g);
                pt.median = nearest_rank(vals, 50.0);
                pt.p20 = nearest_rank(vals, 20.0);
                pt.p80 = nearest_rank(vals, 80.0);
                s.curve.push_back(pt);
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::optional<double> relative_difference(double partial, double global) {
    if (partial == 0.0) {
        return std::nullopt;
    }
    return 100.0 * (partial - global) / partial;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out << content;
        if (!out.good()) {
            throw IoError("short write to " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

void emit_outputs(const ExperimentConfig& cfg, const std::vector<RunRecord>& records,
                  const std::vector<MethodSummary>& summaries,
                  const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir + ": " + ec.message());
    }
    const std::filesystem::path base(dir);

    nlohmann::json j;
    j["dataset"] = cfg.dataset;
    j["k"] = cfg.k;
    j["repeats"] = cfg.repeats;
    j["base_seed"] = cfg.base_seed;
    j["methods"] = cfg.methods;
    j["records"] = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json jr;
        jr["method"] = r.method;
        jr["seed"] = r.seed;
        jr["final_k1"] = r.final_k1;
        jr["final_k2"] = r.final_k2;
        if (!r.kernel.empty()) {
            jr["kernel"] = r.kernel;
        }
        if (!r.expressions.empty()) {
            jr["expressions"] = r.expressions;
        }
        jr["history"] = nlohmann::json::array();
        for (const auto& h : r.history) {
            // wall-clock durations stay out so identical configs yield
            // byte-identical files
            jr["history"].push_back({{"generation", h.generation},
                                     {"train_objective", h.train_objective},
                                     {"validation_proportion",
                                      h.validation_proportion}});
        }
        j["records"].push_back(std::move(jr));
    }
    write_atomic(base / "results.json", j.dump(2) + "\n");

    std::string table = "dataset,method,k,runs,mean,median,p20,p80\n";
    for (const auto& s : summaries) {
        table += cfg.dataset + "," + s.method + "," + std::to_string(cfg.k) + "," +
                 std::to_string(s.runs) + "," + fmt(s.mean) + "," + fmt(s.median) +
                 "," + fmt(s.p20) + "," + fmt(s.p80) + "\n";
    }
    write_atomic(base / "table.csv", table);

    std::string curves = "method,generation,median,p20,p80\n";
    for (const auto& s : summaries) {
        for (const auto& pt : s.curve) {
            curves += s.method + "," + std::to_string(pt.generation) + "," +
                      fmt(pt.median) + "," + fmt(pt.p20) + "," + fmt(pt.p80) + "\n";
        }
    }
    write_atomic(base / "curves.csv", curves);

    bool any_gp = false;
    std::string expressions;
    for (const auto& r : records) {
        if (!r.expressions.empty()) {
            any_gp = true;
            expressions += "# method " + r.method + " seed " + std::to_string(r.seed) +
                           "\n";
            for (const auto& e : r.expressions) {
                expressions += e + "\n";
            }
        }
    }
    if (any_gp) {
        write_atomic(base / "expressions.txt", expressions);
    }
}

}  // namespace nlpca
